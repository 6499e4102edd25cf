"""Evaluate documents and execute their checks."""

from __future__ import annotations

import itertools
import json
import multiprocessing as mp
import time
import traceback
from dataclasses import dataclass, field
from typing import Callable

from ..algebra import (
    AlgebraError,
    Generator,
    StructureConstants,
    SuperAlgebra,
    analyze_split,
    jacobi_residuals,
    mutate,
    rescale,
    validate_algebra,
)
from ..cartan import bianchi_check, soften
from ..catalog import catalog_algebra
from ..clifford import build_gamma
from ..fda import (
    Cochain,
    FDAError,
    FDASpec,
    check_fda_closure,
    d4_fda,
    d11_fda,
    d11_mutated_fda,
    extend_fda,
    horizontal_model,
    vielbein_contraction,
)
from ..fixtures import (
    CATALOG_FIXTURES,
    MUTATION_FIXTURES,
    catalog_fixture,
    fierz_d4_triple,
    fierz_d11,
    mutation_fixture,
)
from ..forms import FormPolynomial, check_nilpotency
from ..variational import (
    VariationError,
    abelian_chern_simons,
    abelian_topological,
    einstein_cartan,
    euler_density,
    gauge_check,
    gauge_rule,
    macdowell_mansouri,
    macdowell_mansouri_identity,
    noether_current,
    proportionality,
    sugra_lagrangian,
    sugra_reference_equations,
    torsion_rule,
    vary,
)
from .grammar import BracketDecl, GenDecl, SpecDocument, SpecError, Statement

__all__ = [
    "CheckResult",
    "CheckReport",
    "Outcome",
    "evaluate",
    "plan_checks",
    "run_checks",
    "EXIT_PASS",
    "EXIT_FAIL",
    "EXIT_STRUCTURAL",
]

EXIT_PASS, EXIT_FAIL, EXIT_STRUCTURAL = 0, 1, 2

RESIDUAL_TERMS = 12


@dataclass(frozen=True)
class Outcome:
    passed: bool
    residual: str = ""


@dataclass
class CheckResult:
    name: str
    status: str  # pass | fail | error
    residual: str = ""
    millis: int = 0

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "residual": self.residual, "millis": self.millis}


@dataclass
class CheckReport:
    results: list = field(default_factory=list)
    structural_error: str | None = None

    @property
    def exit_code(self) -> int:
        if self.structural_error is not None:
            return EXIT_STRUCTURAL
        return EXIT_PASS if all(r.status == "pass" for r in self.results) else EXIT_FAIL

    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "error": 0}
        for r in self.results:
            out[r.status] += 1
        return out

    def render_text(self) -> str:
        lines = []
        if self.structural_error is not None:
            lines.append(f"error: {self.structural_error}")
        for r in self.results:
            lines.append(f"{r.status.upper():5} {r.name} ({r.millis} ms)")
            if r.residual:
                lines.extend("      " + ln for ln in r.residual.splitlines())
        c = self.counts()
        lines.append(f"{c['pass']} passed, {c['fail']} failed, {c['error']} errors; exit {self.exit_code}")
        return "\n".join(lines) + "\n"

    def render_json(self) -> str:
        payload = {
            "checks": [r.as_dict() for r in self.results],
            "exit": self.exit_code,
        }
        if self.structural_error is not None:
            payload["error"] = self.structural_error
        return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


# -- residual rendering -------------------------------------------------------------------


def _poly_text(p: FormPolynomial) -> str:
    items = sorted(p.items(), key=lambda kv: kv[0])
    shown = FormPolynomial.sum(FormPolynomial.monomial(m, c) for m, c in items[:RESIDUAL_TERMS])
    text = str(shown)
    if len(items) > RESIDUAL_TERMS:
        text += f" + ... ({len(items)} terms)"
    return text


def _nilpotency_outcome(report) -> Outcome:
    if report.passed:
        return Outcome(True)
    lines = [report.summary()]
    for lab in sorted(report.residuals)[:3]:
        lines.append(f"d^2 {lab} = {_poly_text(report.residuals[lab])}")
    return Outcome(False, "\n".join(lines))


def _validation_outcome(report) -> Outcome:
    if report.passed:
        return Outcome(True)
    lines = [report.summary()]
    for trip, res in report.jacobi[:5]:
        terms = ", ".join(f"{k}: {v}" for k, v in sorted(res.items()))
        lines.append(f"Jacobi({', '.join(trip)}) = {{{terms}}}")
    return Outcome(False, "\n".join(lines))


def _map_outcome(residual: dict) -> Outcome:
    if not residual:
        return Outcome(True)
    keys = sorted(residual)
    lines = [f"{len(keys)} nonzero components"]
    for k in keys[:5]:
        lines.append(f"{k}: {residual[k]}")
    return Outcome(False, "\n".join(lines))


# -- check implementations ------------------------------------------------------------------


def check_jacobi(alg: SuperAlgebra) -> Outcome:
    res = jacobi_residuals(alg)
    if not res:
        return Outcome(True)
    labels = [g.label for g in alg.generators]
    lines = [f"{len(res)} Jacobi violations"]
    for trip in sorted(res)[:5]:
        terms = ", ".join(f"{labels[e]}: {v}" for e, v in sorted(res[trip].items()))
        lines.append(f"Jacobi({', '.join(labels[i] for i in trip)}) = {{{terms}}}")
    return Outcome(False, "\n".join(lines))


def check_validate(alg: SuperAlgebra) -> Outcome:
    return _validation_outcome(validate_algebra(alg))


def check_split(report) -> Outcome:
    if report.is_reductive:
        return Outcome(True)
    return Outcome(False, "; ".join(" ".join(v) for v in report.violations[:5]))


def check_flat(alg: SuperAlgebra) -> Outcome:
    return _nilpotency_outcome(check_nilpotency(soften(alg, "flat", validate=False).rules))


def check_bianchi(alg: SuperAlgebra) -> Outcome:
    return _nilpotency_outcome(bianchi_check(soften(alg, validate=False)))


def check_variation(L) -> Outcome:
    res = vary(L).residual()
    return Outcome(True) if res.is_zero() else Outcome(False, _poly_text(res))


def check_gauge(L, rule) -> Outcome:
    gc = gauge_check(L, rule)
    if gc.status != "non-invariant":
        return Outcome(True, "")
    return Outcome(False, f"{gc.status}: {_poly_text(gc.remainder)}")


def check_noether(L, rule) -> Outcome:
    onshell = torsion_rule(L.model) if any(g.name == "P" for g in L.model.algebra.generators) else None
    try:
        n = noether_current(L, rule, onshell=onshell)
    except VariationError as exc:
        return Outcome(False, str(exc))
    if n.status.startswith("exact"):
        return Outcome(True)
    return Outcome(False, f"{n.status}: {_poly_text(n.remainder)}")


def check_fda(fda: FDASpec) -> Outcome:
    return _nilpotency_outcome(check_fda_closure(fda))


def check_mm_identity() -> Outcome:
    r = macdowell_mansouri_identity()
    if r.passed:
        return Outcome(True)
    lines = []
    if not r.identity_residual.is_zero():
        lines.append("identity: " + _poly_text(r.identity_residual))
    for g in sorted(r.equation_mismatches)[:3]:
        lines.append(f"E[{g.label}]: {_poly_text(r.equation_mismatches[g])}")
    return Outcome(False, "\n".join(lines))


def check_sugra_equations() -> Outcome:
    model = soften(catalog_algebra("super-poincare", 4), convention="separate")
    derived = vary(sugra_lagrangian(model)).field_equations
    reference = sugra_reference_equations(model)
    bad = []
    for g, ref in reference.items():
        if proportionality(derived.get(g, FormPolynomial()), ref) is None:
            bad.append(g.label)
    if not bad:
        return Outcome(True)
    return Outcome(False, f"not proportional to the reference: {', '.join(bad)}")


# -- document evaluation ------------------------------------------------------------------------


def _define_algebra(st: Statement) -> SuperAlgebra:
    gens = []
    for decl in st.args:
        if not isinstance(decl, GenDecl):
            continue
        par = 1 if decl.parity == "odd" else 0
        if not decl.indices:
            gens.append(Generator(decl.name, (), par))
            continue
        k, n = len(decl.indices), decl.range
        if decl.symmetry == "asym":
            idx = itertools.combinations(range(n), k)
        elif decl.symmetry == "sym":
            idx = itertools.combinations_with_replacement(range(n), k)
        else:
            idx = itertools.product(range(n), repeat=k)
        gens.extend(Generator(decl.name, tuple(i), par) for i in idx)
    pos = {g.key: i for i, g in enumerate(gens)}
    if len(pos) != len(gens):
        raise SpecError("duplicate", "generator declared twice", st.line, st.col)
    full = {}

    def where(label):
        p = pos.get((label.name, label.index))
        if p is None:
            raise SpecError("reference", f"undeclared generator {label.render()}", st.line, st.col)
        return p

    for br in st.args:
        if not isinstance(br, BracketDecl):
            continue
        b, c = where(br.left), where(br.right)
        for lab, v in br.terms:
            key = (where(lab), b, c)
            if key in full and full[key] != v:
                raise SpecError("duplicate", f"bracket [{br.left.render()}, {br.right.render()}] given twice", st.line, st.col)
            full[key] = v
    parities = [g.parity for g in gens]
    return SuperAlgebra(gens, StructureConstants.from_full(full, parities), name=st.name)


def _build(st: Statement, env: dict):
    a = st.args

    def ref(word):
        return env[word.name]

    if st.keyword == "algebra":
        if st.func == "catalog":
            return catalog_algebra(a[0].value, *(int(x.value.constant()[0]) for x in a[1:]))
        if st.func == "mutate":
            delta = a[4].value if len(a) > 4 else 1
            return mutate(ref(a[0]), a[1].render(), a[2].render(), a[3].render(), delta)
        if st.func == "rescale":
            return rescale(ref(a[0]), [w.name for w in a[2:]], a[1].value)
        if st.func == "define":
            return _define_algebra(st)
    if st.keyword == "split":
        return analyze_split(ref(a[0]), [w.name for w in a[1:]])
    if st.keyword == "connection":
        conv = a[1].name if len(a) > 1 else "total"
        mode = "flat" if st.func == "flat" else "softened"
        return soften(ref(a[0]), mode, validate=False, convention=conv)
    if st.keyword == "lagrangian":
        if st.func == "einstein_cartan":
            return einstein_cartan(cosmological=None if a else 0)
        return {
            "macdowell_mansouri": macdowell_mansouri,
            "euler": euler_density,
            "sugra": sugra_lagrangian,
            "topological": abelian_topological,
            "chern_simons": abelian_chern_simons,
        }[st.func]()
    if st.keyword == "gauge":
        L = ref(a[0])
        return gauge_rule(L.model, [w.name for w in a[1:]] or None, name=st.name)
    if st.keyword == "fda":
        if st.func == "d4":
            return d4_fda()
        if st.func == "d11":
            return d11_fda(six_form=bool(a))
        if st.func == "d11_mutated":
            return d11_mutated_fda()
        if st.func == "horizontal":
            alg = ref(a[0])
            sub = [w.name for w in a[1:]]
            base = horizontal_model(alg, sub)
            return FDASpec(base, [], tuple(base.connection[i] for i in alg.select(sub)))
    if st.keyword == "extend":
        fda = ref(a[0])
        alg = fda.base.algebra
        rep = build_gamma(alg.dimension, alg.signature)
        k = int(a[2].value.constant()[0])
        c = vielbein_contraction(fda.base, rep, k).scale(-a[3].value)
        return extend_fda(fda, Cochain(c, st.name), a[1].name)
    raise SpecError("syntax", f"cannot evaluate {st.render()}", st.line, st.col)


def evaluate(doc: SpecDocument) -> dict:
    """Build every defined object; structural problems raise :class:`SpecError`."""
    env: dict = {}
    for st in doc.statements:
        if st.keyword == "check":
            continue
        try:
            env[st.name] = _build(st, env)
        except SpecError:
            raise
        except (AlgebraError, FDAError, VariationError, ValueError, KeyError) as exc:
            raise SpecError("evaluation", f"{st.name}: {exc}", st.line, st.col) from None
    return env


# -- planning -----------------------------------------------------------------------------------

_CHECKS: dict = {
    "jacobi": check_jacobi,
    "validate": check_validate,
    "split": check_split,
    "nilpotency": lambda m: _nilpotency_outcome(check_nilpotency(m.rules)),
    "bianchi": lambda m: _nilpotency_outcome(bianchi_check(m)),
    "variation": check_variation,
    "gauge": check_gauge,
    "noether": check_noether,
    "fda_closure": check_fda,
    "mm_identity": check_mm_identity,
    "sugra_equations": check_sugra_equations,
}


def _suite(name: str) -> list[tuple[str, Callable[[], Outcome]]]:
    cat = list(CATALOG_FIXTURES)
    if name == "all-catalog-jacobi":
        return [(f"jacobi({n})", lambda n=n: check_validate(catalog_fixture(n))) for n in cat]
    if name == "catalog-nilpotency":
        return [(f"nilpotency({n})", lambda n=n: check_flat(catalog_fixture(n))) for n in cat]
    if name == "catalog-bianchi":
        return [(f"bianchi({n})", lambda n=n: check_bianchi(catalog_fixture(n))) for n in cat]
    if name == "mutation-suite":
        return [(f"jacobi({n})", lambda n=n: check_jacobi(mutation_fixture(n))) for n in MUTATION_FIXTURES]
    if name == "fierz":
        return [
            ("fierz(d4-triple)", lambda: _map_outcome(fierz_d4_triple())),
            ("fierz(d11-germ)", lambda: _map_outcome(fierz_d11())),
        ]
    if name == "d4-fda":
        return [("fda_closure(d4)", lambda: check_fda(d4_fda()))]
    if name == "d11-fda":
        return [("fda_closure(d11)", lambda: check_fda(d11_fda()))]
    if name == "ec-mm":
        return [
            ("variation(einstein-cartan)", lambda: check_variation(einstein_cartan())),
            ("variation(macdowell-mansouri)", lambda: check_variation(macdowell_mansouri())),
            ("mm_identity()", check_mm_identity),
            ("noether(einstein-cartan, lorentz)", lambda: _noether_builtin(einstein_cartan())),
            ("noether(macdowell-mansouri, lorentz)", lambda: _noether_builtin(macdowell_mansouri())),
        ]
    if name == "sugra-equations":
        return [("sugra_equations()", check_sugra_equations)]
    raise KeyError(name)


def _noether_builtin(L) -> Outcome:
    return check_noether(L, gauge_rule(L.model, ["M"]))


def plan_checks(doc: SpecDocument, env: dict) -> list[tuple[str, Callable[[], Outcome]]]:
    tasks = []
    for st in doc.checks():
        if st.args is None:
            tasks.extend(_suite(st.func))
            continue
        fn = _CHECKS[st.func]
        objs = [env[x.name] for x in st.args]
        tasks.append((st.call(), lambda fn=fn, objs=objs: fn(*objs)))
    return tasks


# -- execution ----------------------------------------------------------------------------------


def _run_one(fn: Callable[[], Outcome]) -> tuple[str, str]:
    try:
        out = fn()
    except Exception as exc:  # a crashing check is reported, not fatal
        return "error", f"{type(exc).__name__}: {exc}\n{traceback.format_exc(limit=3)}".strip()
    return ("pass" if out.passed else "fail"), out.residual


def _child(fn, conn) -> None:
    conn.send(_run_one(fn))
    conn.close()


def _execute(tasks: list, jobs: int, timeout: float | None) -> list[CheckResult]:
    if jobs <= 1 and timeout is None:
        results = []
        for name, fn in tasks:
            t0 = time.perf_counter()
            status, residual = _run_one(fn)
            results.append(CheckResult(name, status, residual, int((time.perf_counter() - t0) * 1000)))
        return results
    ctx = mp.get_context("fork")
    pending = list(enumerate(tasks))
    running: dict = {}
    done: dict = {}
    while pending or running:
        while pending and len(running) < max(1, jobs):
            i, (name, fn) = pending.pop(0)
            recv, send = ctx.Pipe(duplex=False)
            proc = ctx.Process(target=_child, args=(fn, send), daemon=True)
            proc.start()
            send.close()
            running[i] = (name, proc, recv, time.perf_counter())
        for i, (name, proc, recv, t0) in list(running.items()):
            elapsed = time.perf_counter() - t0
            if recv.poll():
                try:
                    status, residual = recv.recv()
                except EOFError:
                    status, residual = "error", "check process exited without a result"
                proc.join()
            elif not proc.is_alive():
                status, residual = "error", f"check process died (exit code {proc.exitcode})"
            elif timeout is not None and elapsed > timeout:
                proc.terminate()
                proc.join()
                status, residual = "error", f"timeout after {timeout:g} s"
            else:
                continue
            done[i] = CheckResult(name, status, residual, int(elapsed * 1000))
            recv.close()
            del running[i]
        if running:
            time.sleep(0.005)
    return [done[i] for i in range(len(tasks))]


def run_checks(doc: SpecDocument, jobs: int = 1, timeout: float | None = None) -> CheckReport:
    """Evaluate definitions, then run every check in document order."""
    try:
        env = evaluate(doc)
        tasks = plan_checks(doc, env)
    except SpecError as exc:
        return CheckReport([], str(exc))
    return CheckReport(_execute(tasks, jobs, timeout))
