"""Acceptance criteria, one test each, at their stated tolerances and time budgets.

Every identity here is exact, so "tolerance" means exact equality of
canonical polynomials.  A summary line per criterion is printed at the end
of the run (see ``conftest.py``).
"""

import json
import subprocess
import sys
import time

import pytest

from supercartan.algebra import analyze_split, validate_algebra
from supercartan.cartan import bianchi_check, generic_expansion, soften, split_curvature
from supercartan.catalog import catalog_algebra
from supercartan.clifford import FierzTerm, build_gamma, fierz_residual
from supercartan.fda import (
    ce_differential,
    check_fda_closure,
    d11_cocycle,
    d11_fda,
    d11_mutated_fda,
    horizontal_model,
    vielbein_contraction,
)
from supercartan.fixtures import (
    CATALOG_FIXTURES,
    MUTATION_FIXTURES,
    catalog_fixture,
    fierz_d4_control,
    fierz_d4_triple,
    fierz_d11,
    mutation_fixture,
)
from supercartan.forms import FormPolynomial, check_nilpotency, sector_decompose, wedge
from supercartan.scalar import Scalar
from supercartan.variational import (
    einstein_cartan,
    euler_density,
    gauge_rule,
    levi_civita,
    macdowell_mansouri,
    macdowell_mansouri_identity,
    noether_current,
    proportionality,
    sugra_lagrangian,
    sugra_reference_equations,
    torsion_rule,
    vary,
    variation_symbol,
)

EPS = levi_civita(4)


def factors(derived: dict, reference: dict) -> set:
    return {str(proportionality(derived.get(g, FormPolynomial()), ref)) for g, ref in reference.items()}


@pytest.mark.criterion(1, "algebra catalog suite")
def test_criterion_01_catalog():
    t0 = time.perf_counter()
    names = ["iso(1,3)", "so(1,4)", "so(2,3)", "so(2,4)", "osp(1|4)", "super-poincare(4)", "super-poincare(11)"]
    for n in names:
        report = validate_algebra(catalog_fixture(n))
        assert report.passed, (n, report.summary())
    for n in MUTATION_FIXTURES:
        assert not validate_algebra(mutation_fixture(n)).passed, n
    assert time.perf_counter() - t0 < 180


@pytest.mark.criterion(2, "Maurer-Cartan nilpotency and equivalence with Jacobi")
def test_criterion_02_nilpotency():
    t0 = time.perf_counter()
    for n in CATALOG_FIXTURES:
        assert check_nilpotency(soften(catalog_fixture(n), "flat").rules).passed, n
    assert len(MUTATION_FIXTURES) >= 3
    for n in MUTATION_FIXTURES:
        alg = mutation_fixture(n)
        jacobi_ok = validate_algebra(alg).passed
        nil_ok = check_nilpotency(soften(alg, "flat", validate=False).rules).passed
        assert jacobi_ok is False and nil_ok is False, n
    assert time.perf_counter() - t0 < 60


@pytest.mark.criterion(3, "Bianchi suite")
def test_criterion_03_bianchi():
    t0 = time.perf_counter()
    for n in CATALOG_FIXTURES:
        assert bianchi_check(soften(catalog_fixture(n))).passed, n
    assert time.perf_counter() - t0 < 120


@pytest.mark.criterion(4, "MacDowell-Mansouri decomposition and contraction")
def test_criterion_04_mm_split():
    lam2 = Scalar.param("lam") ** 2
    for name, extra, eps in (("so(1,4)", 4, 1), ("so(2,3)", 0, -1)):
        alg = catalog_fixture(name)
        sub = [g.label for g in alg.generators if extra not in g.index]
        cs = split_curvature(soften(alg), analyze_split(alg, sub), contraction_parameter="lam")
        m = cs.model
        inner = [i for i in range(5) if i != extra]

        def e(a):
            lo, hi = min(a, extra), max(a, extra)
            return m.poly(f"M[{lo} {hi}]").scale(1 if a > extra else -1)

        for i, a in enumerate(inner):
            for b in inner[i + 1:]:
                rsym = next(s for s in cs.definitions if s.name == "R_omega" and s.index == (a, b))
                expected = FormPolynomial.gen(rsym) - wedge(e(a), e(b)).scale(lam2 * eps)
                assert cs.proper_curvature[f"M[{a} {b}]"] == expected, (name, a, b)
    ds = catalog_algebra("ds", 1, 3)
    cs = split_curvature(soften(ds), analyze_split(ds, ["M"]), contraction_parameter="lam")
    iso = catalog_algebra("iso", 1, 3)
    ref = split_curvature(soften(iso), analyze_split(iso, ["M"]))
    for label, poly in {**cs.proper_curvature, **cs.torsion}.items():
        assert poly.subs(lam=0) == {**ref.proper_curvature, **ref.torsion}[label]
    for sym, poly in cs.definitions.items():
        assert poly.subs(lam=0) == ref.definitions[sym]


def _family(model):
    R = {}
    for a in range(4):
        for b in range(4):
            if a != b:
                g = FormPolynomial.gen(model.curvature(f"M[{min(a, b)} {max(a, b)}]"))
                R[(a, b)] = g if a < b else -g
    V = [model.poly(f"P[{a}]") for a in range(4)]
    T = [FormPolynomial.gen(model.curvature(f"P[{a}]")) for a in range(4)]
    return R, V, T


@pytest.mark.criterion(5, "Einstein-Cartan variation")
def test_criterion_05_einstein_cartan():
    L = einstein_cartan()
    m = L.model
    res = vary(L)
    R, V, T = _family(m)
    third = Scalar.param("Lambda") / 3
    omega_ref, v_ref = {}, {}
    for a in range(4):
        for b in range(a + 1, 4):
            omega_ref[m.form(f"M[{a} {b}]")] = FormPolynomial.sum(
                wedge(T[c], V[d]).scale(EPS[(a, b, c, d)]) for c in range(4) for d in range(4) if (a, b, c, d) in EPS
            )
    for c in range(4):
        v_ref[m.form(f"P[{c}]")] = FormPolynomial.sum(
            wedge(R[(a, b)] - wedge(V[a], V[b]).scale(third), V[d]).scale(EPS[(a, b, c, d)])
            for a in range(4)
            for b in range(4)
            for d in range(4)
            if (a, b, c, d) in EPS
        )
    theta_ref = FormPolynomial.sum(
        wedge(FormPolynomial.gen(variation_symbol(m.form(f"M[{a} {b}]"))), V[c], V[d]).scale(EPS[(a, b, c, d)])
        for a in range(4)
        for b in range(a + 1, 4)
        for c in range(4)
        for d in range(4)
        if (a, b, c, d) in EPS
    )
    k_omega, k_v = factors(res.field_equations, omega_ref), factors(res.field_equations, v_ref)
    assert len(k_omega) == 1 and "None" not in k_omega, k_omega
    assert len(k_v) == 1 and "None" not in k_v, k_v
    assert set(res.field_equations) == set(omega_ref) | set(v_ref)
    assert proportionality(res.theta, theta_ref) is not None
    assert res.residual().is_zero()


@pytest.mark.criterion(6, "MacDowell-Mansouri / Einstein-Cartan identity")
def test_criterion_06_mm_identity():
    ident = macdowell_mansouri_identity()
    assert ident.identity_residual.is_zero()
    assert ident.equation_mismatches == {}
    assert ident.ratio == -Scalar.param("eps") * Scalar.param("lam") ** 2
    assert vary(euler_density()).field_equations == {}


@pytest.mark.criterion(7, "Noether current exact on-shell with torsion rule only")
def test_criterion_07_noether():
    for L in (einstein_cartan(), macdowell_mansouri()):
        onshell = torsion_rule(L.model)
        assert all(g.name == "R_V" for g in onshell.rules)
        n = noether_current(L, gauge_rule(L.model, ["M"]), onshell=onshell)
        assert n.status in ("exact", "exact on-shell"), (L.name, n.status)
        assert n.charge is not None and n.remainder.is_zero()


@pytest.mark.criterion(8, "Fierz identities")
def test_criterion_08_fierz():
    assert fierz_d4_triple() == {}
    assert fierz_d4_control() != {}
    t0 = time.perf_counter()
    assert fierz_d11() == {}
    assert time.perf_counter() - t0 < 120


@pytest.mark.criterion(9, "D=11 free differential algebra closure")
def test_criterion_09_d11_fda():
    t0 = time.perf_counter()
    rep = build_gamma(11)
    assert check_fda_closure(d11_fda(rep), rep).passed
    assert not check_fda_closure(d11_mutated_fda(rep), rep).passed
    base = horizontal_model(catalog_algebra("super-poincare", 11), ["M"])
    closure_zero = ce_differential(d11_cocycle(base, rep), base).is_zero()
    fierz_zero = fierz_residual(rep, [FierzTerm(1, (("a", "b"), ("a",)))], free=("b",)) == {}
    assert closure_zero and fierz_zero
    wrong_closure_zero = ce_differential(vielbein_contraction(base, rep, 1), base).is_zero()
    wrong_fierz_zero = fierz_residual(rep, [FierzTerm(1, (("a",), ("a",)))]) == {}
    assert wrong_closure_zero == wrong_fierz_zero is False
    assert time.perf_counter() - t0 < 300


@pytest.mark.criterion(10, "D=4 supergravity field equations and sectors")
def test_criterion_10_sugra():
    t0 = time.perf_counter()
    L = sugra_lagrangian()
    m = L.model
    res = vary(L)
    ref = sugra_reference_equations(m)
    problems = []
    for name, label in (("omega", "spin connection"), ("V", "vielbein"), ("psi", "gravitino")):
        ks = factors(res.field_equations, {g: e for g, e in ref.items() if g.name == name})
        if len(ks) != 1 or "None" in ks:
            problems.append(f"{label} equation not proportional to its reference form (factors {sorted(ks)})")
    expansion = generic_expansion(m)
    part = {"V": ["V"], "psi": ["psi"]}
    four = {(3, 0), (2, 1), (1, 2), (0, 3)}
    for name, label in (("omega", "spin connection"), ("V", "vielbein"), ("psi", "gravitino")):
        eq = FormPolynomial.sum(e.substitute(expansion) for g, e in res.field_equations.items() if g.name == name)
        got = set(sector_decompose(eq, part))
        if got != four:
            problems.append(f"{label} equation sectors {sorted(got)}")
    assert time.perf_counter() - t0 < 60
    assert not problems, "; ".join(problems)


def _cli(args, stdin=None):
    proc = subprocess.run(
        [sys.executable, "-m", "supercartan", *args], input=stdin, capture_output=True, text=True, timeout=600
    )
    return proc.returncode, proc.stdout


@pytest.mark.criterion(11, "command-line contract")
def test_criterion_11_cli():
    suites = ["all-catalog-jacobi", "catalog-nilpotency", "fierz", "d4-fda", "d11-fda", "ec-mm"]
    args = ["run", "-j", "4"]
    for s in suites:
        args += ["--suite", s]
    code, _ = _cli(args)
    assert code == 0
    code, _ = _cli(["run", "--suite", "mutation-suite"])
    assert code == 1
    code, _ = _cli(["run", "-"], stdin="check jacobi(undefined_algebra)\n")
    assert code == 2
    doc = 'algebra g = catalog("iso", 1, 3)\nalgebra b = mutate(g, P[0], M[0 1], P[1])\ncheck jacobi(g)\ncheck jacobi(b)\n'
    code_t, text = _cli(["run", "-"], stdin=doc)
    code_j, js = _cli(["run", "-", "--format", "json"], stdin=doc)
    report = json.loads(js)
    text_status = [line.split()[0].lower() for line in text.splitlines() if line.split()[:1] in (["PASS"], ["FAIL"], ["ERROR"])]
    assert text_status == [c["status"] for c in report["checks"]] == ["pass", "fail"]
    assert code_t == code_j == report["exit"] == 1
