"""Chevalley-Eilenberg cochains and free differential algebras.

Cochains are constant-coefficient polynomials in the flat Maurer-Cartan
forms of a superalgebra.  An FDA is grown one potential at a time: for a
closed cochain ``Omega`` of degree ``p+1`` a new ``p``-form ``A`` is added with
``dA = -Omega``.  Later cochains may contain earlier potentials.

Spinor bilinears are always stored in components, so every zero test is a
plain comparison of canonical polynomials.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .algebra import SuperAlgebra
from .cartan import ConnectionModel, soften
from .catalog import catalog_algebra
from .clifford import GammaRep, build_gamma
from .forms import (
    DifferentialRuleSet,
    FormPolynomial,
    GeneratorForm,
    NilpotencyReport,
    RuleCoverageError,
    bilinear,
    check_nilpotency,
    differential,
    wedge,
)
from .scalar import ZERO, Scalar

__all__ = [
    "FDAError",
    "Cochain",
    "FDAStep",
    "FDASpec",
    "CocycleSpace",
    "horizontal_model",
    "ce_differential",
    "relative_cocycles",
    "extend_fda",
    "check_fda_closure",
    "psibar_gamma_psi",
    "vielbein_contraction",
    "d4_fda",
    "d11_fda",
    "d11_cocycle",
    "d11_wrong_cocycle",
    "d11_six_form_cocycle",
    "d11_mutated_fda",
]

POTENTIAL = 8


class FDAError(ValueError):
    def __init__(self, message: str, residual: FormPolynomial | None = None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class Cochain:
    form: FormPolynomial
    name: str = ""

    @property
    def degree(self) -> int:
        return self.form.degree

    def __post_init__(self):
        if not self.form.is_zero() and not self.form.is_homogeneous():
            raise FDAError(f"cochain {self.name or self.form} is not homogeneous")
        for m, c in self.form.items():
            if not c.is_constant():
                raise FDAError(f"cochain coefficient {c} is not constant")

    def is_relative(self, excluded: Iterable[GeneratorForm]) -> bool:
        return not (self.form.generators() & set(excluded))


@dataclass(frozen=True)
class FDAStep:
    potential: GeneratorForm
    cocycle: Cochain
    trivial: bool = False


@dataclass
class FDASpec:
    """Flat base system plus ordered potential steps ``d A_k = -Omega_k``."""

    base: ConnectionModel
    steps: list = field(default_factory=list)
    dropped: tuple = ()  # connection forms held at zero

    @property
    def rules(self) -> DifferentialRuleSet:
        rules = DifferentialRuleSet(dict(self.base.rules.items()), name=self.base.rules.name)
        for st in self.steps:
            rules.set(st.potential, -st.cocycle.form)
        return rules

    def potential(self, name: str) -> GeneratorForm:
        for st in self.steps:
            if st.potential.name == name:
                return st.potential
        raise KeyError(name)

    def __len__(self) -> int:
        return len(self.steps)


def horizontal_model(alg: SuperAlgebra, subalgebra: Sequence) -> ConnectionModel:
    """Flat model of ``alg`` with the connection along ``subalgebra`` set to zero."""
    model = soften(alg, "flat", validate=False)
    drop = {model.connection[i] for i in alg.select(list(subalgebra))}
    zero = {g: FormPolynomial() for g in drop}
    rules = DifferentialRuleSet(name=model.rules.name + "/horizontal")
    for g, img in model.rules.items():
        if g not in drop:
            rules.set(g, img.substitute(zero))
    return ConnectionModel(alg, "flat", model.connection, None, rules, model.mc, notes="horizontal")


def _as_form(c) -> FormPolynomial:
    return c.form if isinstance(c, Cochain) else c


def ce_differential(c, model, extensions: Sequence[FDAStep] = ()) -> FormPolynomial:
    """Algebraic differential of a cochain under the base rules plus FDA steps.

    ``model`` may be a :class:`ConnectionModel` or an :class:`FDASpec`.
    """
    if isinstance(model, FDASpec):
        rules = model.rules
    else:
        rules = DifferentialRuleSet(dict(model.rules.items()))
    for st in extensions:
        rules.set(st.potential, -st.cocycle.form)
    try:
        return differential(_as_form(c), rules)
    except RuleCoverageError as exc:
        raise FDAError(f"cochain uses a generator with no differential rule: {exc}") from None


# -- exact linear algebra over Scalars ----------------------------------------------------


def _rank_basis(vectors: list[dict], pivot_key=repr) -> tuple[list[dict], list[int]]:
    """Reduced row echelon form of sparse vectors.

    Returns the reduced rows and the indices of inputs that raised the rank.
    """
    pivots: list[tuple] = []  # (pivot key, row)
    independent = []
    for i, v in enumerate(vectors):
        row = {k: c for k, c in v.items() if not c.is_zero()}
        for key, prow in pivots:
            _eliminate(row, key, prow)
        if not row:
            continue
        key = min(row, key=pivot_key)
        inv = Scalar.coerce(1) / row[key]
        row = {k: x * inv for k, x in row.items()}
        for _, prow in pivots:
            _eliminate(prow, key, row)
        pivots.append((key, row))
        independent.append(i)
    return [r for _, r in pivots], independent


def _eliminate(row: dict, key, pivot_row: dict) -> None:
    c = row.get(key)
    if c is None:
        return
    for k, x in pivot_row.items():
        y = row.get(k, ZERO) - c * x
        if y.is_zero():
            row.pop(k, None)
        else:
            row[k] = y


def _kernel(columns: list[dict]) -> list[list[Scalar]]:
    """Basis of ``{x : sum_i x_i columns[i] = 0}`` as dense coefficient lists."""
    n = len(columns)
    tagged = []
    for i, col in enumerate(columns):
        v = {("m", repr(k)): c for k, c in col.items()}
        v[("t", i)] = Scalar.coerce(1)
        tagged.append(v)
    rows, _ = _rank_basis(tagged, pivot_key=lambda k: (k[0] != "m", repr(k)))
    return [[r.get(("t", i), ZERO) for i in range(n)] for r in rows if all(k[0] == "t" for k in r)]


def _in_span(target: FormPolynomial, spanning: list[FormPolynomial]) -> bool:
    basis, _ = _rank_basis([dict(p.items()) for p in spanning])
    _, indep = _rank_basis(basis + [dict(target.items())])
    return len(indep) == len(basis)


@dataclass
class CocycleSpace:
    """Closed, non-exact combinations of an ansatz (both relative to the ansatz)."""

    ansatz: list
    vectors: list  # coefficient lists over ``ansatz``
    closed_dimension: int
    exact_dimension: int
    flagged_empty: bool = False

    def cochains(self) -> list[Cochain]:
        out = []
        for k, vec in enumerate(self.vectors):
            pieces = [_as_form(a).scale(c) for a, c in zip(self.ansatz, vec) if not c.is_zero()]
            out.append(Cochain(FormPolynomial.sum(pieces), f"cocycle{k}"))
        return out

    def __len__(self) -> int:
        return len(self.vectors)


def relative_cocycles(
    alg: SuperAlgebra,
    subalgebra: Sequence,
    degree: int,
    ansatz: Sequence,
    lower_ansatz: Sequence = (),
) -> CocycleSpace:
    """Cocycles of ``degree`` inside ``span(ansatz)``, modulo ``d(span(lower_ansatz))``.

    Ansatz entries of another degree are dropped; entries containing a
    connection form along ``subalgebra`` are rejected.  The differential is
    the full flat one, so non-invariant candidates are not closed.
    """
    model = soften(alg, "flat", validate=False)
    excluded = [model.connection[i] for i in alg.select(list(subalgebra))]
    kept = []
    for a in ansatz:
        f = _as_form(a)
        if f.is_zero() or f.degree != degree:
            continue
        if f.generators() & set(excluded):
            raise FDAError(f"ansatz entry is not H-relative: {f}")
        kept.append(a)
    if not kept:
        return CocycleSpace([], [], 0, 0, flagged_empty=True)
    images = [dict(ce_differential(a, model).items()) for a in kept]
    closed = _kernel(images)
    closed_forms = [FormPolynomial.sum(_as_form(a).scale(c) for a, c in zip(kept, v)) for v in closed]
    exact = [ce_differential(b, model) for b in lower_ansatz if _as_form(b).degree == degree - 1]
    exact = [e for e in exact if not e.is_zero()]
    exact_basis, _ = _rank_basis([dict(e.items()) for e in exact])
    _, indep = _rank_basis(exact_basis + [dict(f.items()) for f in closed_forms])
    keep = [i - len(exact_basis) for i in indep if i >= len(exact_basis)]
    return CocycleSpace(kept, [closed[i] for i in keep], len(closed), len(closed) - len(keep))


def extend_fda(
    fda: FDASpec,
    cocycle,
    name: str,
    exact_ansatz: Sequence = (),
    parity: int = 0,
) -> FDASpec:
    """Append ``d name = -cocycle``; refuses a cocycle that is not closed.

    The step is flagged trivial when the cocycle lies in ``d(span(exact_ansatz))``.
    """
    c = cocycle if isinstance(cocycle, Cochain) else Cochain(cocycle, name)
    if any(st.potential.name == name for st in fda.steps):
        raise FDAError(f"potential {name!r} already defined")
    residual = ce_differential(c, fda)
    if not residual.is_zero():
        raise FDAError(f"cochain for {name!r} is not closed ({len(residual)} residual terms)", residual)
    exact = [ce_differential(b, fda) for b in exact_ansatz]
    trivial = bool(exact) and _in_span(c.form, exact)
    pot = GeneratorForm(name, (), c.degree - 1, parity, POTENTIAL)
    return FDASpec(fda.base, list(fda.steps) + [FDAStep(pot, c, trivial)], fda.dropped)


def check_fda_closure(fda: FDASpec, rep: GammaRep | None = None) -> NilpotencyReport:
    """``d^2`` on every generator and potential of the FDA."""
    if rep is not None:
        alg = fda.base.algebra
        n_odd = sum(alg.parities)
        if alg.dimension != rep.dimension or n_odd % rep.spinor_size:
            raise FDAError(
                f"gamma representation (D={rep.dimension}, {rep.spinor_size} components) "
                f"does not match {alg.name}"
            )
    return check_nilpotency(fda.rules)


# -- spinor sugar and built-in systems --------------------------------------------------


def psibar_gamma_psi(model: ConnectionModel, rep: GammaRep, *indices: int, lower: bool = True) -> FormPolynomial:
    """``psibar Gamma_{indices} psi`` in components."""
    psi = [model.form(f"Q[{al}]") for al in range(rep.spinor_size)]
    return bilinear(rep.cgamma(*indices, lower=lower), psi)


def vielbein_contraction(model: ConnectionModel, rep: GammaRep, rank: int) -> FormPolynomial:
    """``psibar Gamma_{a1..ak} psi V^{a1} ... V^{ak}`` summed over all index tuples."""
    D = rep.dimension
    V = [model.form(f"P[{a}]") for a in range(D)]
    pieces = []
    for idx in itertools.combinations(range(D), rank):
        pieces.append(wedge(psibar_gamma_psi(model, rep, *idx), *(V[a] for a in idx)))
    return FormPolynomial.sum(pieces).scale(math.factorial(rank))


def _base_fda(D: int) -> FDASpec:
    alg = catalog_algebra("super-poincare", D)
    model = horizontal_model(alg, ["M"])
    dropped = tuple(model.connection[i] for i in alg.select(["M"]))
    return FDASpec(model, [], dropped)


def d4_fda(rep: GammaRep | None = None) -> FDASpec:
    """D=4 super-Poincare (Lorentz-flat) with a 2-form ``B``, ``dB = psibar gamma_a psi V^a``."""
    rep = rep or build_gamma(4, (1, 3))
    base = _base_fda(4)
    c = vielbein_contraction(base.base, rep, 1)
    return extend_fda(base, Cochain(-c, "psi gamma psi V"), "B")


def d11_cocycle(model: ConnectionModel, rep: GammaRep, coefficient=Scalar.coerce(1) / 2) -> FormPolynomial:
    """``c Psibar Gamma_{ab} Psi V^a V^b`` (``c = 1/2``)."""
    return vielbein_contraction(model, rep, 2).scale(coefficient)


def d11_wrong_cocycle(model: ConnectionModel, rep: GammaRep, b: int = 1) -> FormPolynomial:
    """``Psibar Gamma_a Psi V^a V^b`` for one fixed ``b``: wrong tensor structure."""
    V = model.form(f"P[{b}]")
    return wedge(vielbein_contraction(model, rep, 1), V)


def d11_six_form_cocycle(
    fda: FDASpec,
    rep: GammaRep,
    a_coefficient=Scalar.coerce(15),
    gamma_coefficient=Scalar.gaussian(0, 1) / 2,
) -> FormPolynomial:
    """``a A dA + g Psibar Gamma_{a1..a5} Psi V^{a1..a5}`` with ``dA`` substituted.

    Returned with the overall sign of ``dB - ... = 0``, i.e. as the image of
    ``dB``; pass its negative to :func:`extend_fda`.
    """
    A = fda.potential("A")
    dA = fda.rules[A]
    five = vielbein_contraction(fda.base, rep, 5)
    return wedge(FormPolynomial.gen(A), dA).scale(a_coefficient) + five.scale(gamma_coefficient)


def d11_fda(rep: GammaRep | None = None, six_form: bool = False, **coefficients) -> FDASpec:
    """D=11 vacuum FDA: ``dA = 1/2 Psibar Gamma_ab Psi V^a V^b`` and optionally ``B``.

    Index contractions run over all ordered index tuples; with that reading
    the coefficients ``15`` and ``i/2`` close exactly.
    """
    rep = rep or build_gamma(11)
    fda = _base_fda(11)
    fda = extend_fda(fda, Cochain(-d11_cocycle(fda.base, rep), "F4"), "A", parity=0)
    if six_form:
        fda = extend_fda(fda, Cochain(-d11_six_form_cocycle(fda, rep, **coefficients), "F7"), "B")
    return fda


def d11_mutated_fda(rep: GammaRep | None = None, b: int = 1) -> FDASpec:
    """The D=11 germ with ``Gamma_ab`` replaced by ``Gamma_a eta_b``-type structure.

    Built without :func:`extend_fda` (which would refuse it) so the closure
    check itself can report the failure.
    """
    rep = rep or build_gamma(11)
    fda = _base_fda(11)
    c = Cochain(-d11_wrong_cocycle(fda.base, rep, b), "wrong F4")
    pot = GeneratorForm("A", (), 3, 0, POTENTIAL)
    return FDASpec(fda.base, [FDAStep(pot, c)], fda.dropped)
