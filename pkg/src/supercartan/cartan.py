"""Maurer-Cartan and softened (curved) differential systems of an algebra.

For generators ``T_A`` with dual connection 1-forms ``rho^A`` the flat
(Klein) system is

    d rho^A = -1/2 sum_{B,C} s(B,C) C^A_{BC} rho^B rho^C

and the softened system adds a curvature 2-form: ``d rho^A = ... + R^A``.
The sign ``s(B,C)`` is ``-1`` when ``B`` is odd and ``+1`` otherwise; with
the total-parity commutation rule this is the choice for which ``d^2 = 0``
holds exactly when the graded Jacobi identity does.  The Bianchi rule for
``R^A`` is obtained as ``d R^A = -d_R(mc^A)`` where ``mc^A`` is the quadratic
part above and ``d_R`` is the derivation sending ``rho^B -> R^B``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import AlgebraError, SplitReport, SuperAlgebra, analyze_split, rescale, validate_algebra
from .forms import (
    DifferentialRuleSet,
    FormPolynomial,
    GeneratorForm,
    NilpotencyReport,
    check_nilpotency,
    differential,
    to_separate_convention,
)
from .scalar import Scalar

__all__ = [
    "FORM_NAMES",
    "ConnectionModel",
    "CurvatureSplit",
    "soften",
    "bianchi_check",
    "split_curvature",
    "maurer_cartan_part",
    "generic_expansion",
]

FORM_NAMES = {"M": "omega", "P": "V", "Q": "psi", "T": "sigma", "S": "s", "K": "k", "Dil": "dil"}

CONNECTION, CURVATURE, SYMBOL, COMPONENT = 0, 1, 2, 7

_HALF = Scalar(Fraction(1, 2))


def form_name(generator_name: str) -> str:
    return FORM_NAMES.get(generator_name, generator_name.lower())


def mc_sign(par_b: int, par_c: int) -> int:
    return -1 if par_b else 1


def maurer_cartan_part(alg: SuperAlgebra, forms: list[GeneratorForm]) -> dict[int, FormPolynomial]:
    """``{A: -1/2 sum s(B,C) C^A_{BC} rho^B rho^C}`` for every generator position."""
    par = alg.parities
    acc: dict = {}
    for (a, b, c), v in alg.full_table().items():
        coeff = -_HALF * v * mc_sign(par[b], par[c])
        acc.setdefault(a, []).append(FormPolynomial.monomial((forms[b], forms[c]), coeff))
    return {a: FormPolynomial.sum(acc.get(a, [])) for a in range(len(alg))}


@dataclass
class ConnectionModel:
    algebra: SuperAlgebra
    mode: str
    connection: list  # GeneratorForm per generator position
    curvatures: list | None
    rules: DifferentialRuleSet
    mc: dict = field(default_factory=dict)  # position -> quadratic part of d rho
    convention: str = "total"
    notes: str = (
        "Local trivializations are glued by H-valued transition functions; "
        "only the algebraic (structure-constant) content is modeled."
    )

    def position(self, label) -> int:
        return self.algebra.position(label)

    def form(self, label) -> GeneratorForm:
        return self.connection[self.position(label)]

    def curvature(self, label) -> GeneratorForm:
        if self.curvatures is None:
            raise ValueError("flat model has no curvature symbols")
        return self.curvatures[self.position(label)]

    def poly(self, label) -> FormPolynomial:
        return FormPolynomial.gen(self.form(label))

    def curvature_definition(self, label) -> FormPolynomial:
        """``R^A`` written out: ``d rho^A - mc^A`` with ``d rho^A`` kept as a symbol."""
        a = self.position(label)
        g = self.connection[a]
        drho = GeneratorForm("d" + g.name, g.index, 2, g.parity, SYMBOL)
        return FormPolynomial.gen(drho) - self.mc[a]

    def d(self, f) -> FormPolynomial:
        return differential(f, self.rules)


def _forms_for(alg: SuperAlgebra, degree: int, prefix: str = "", order: int = CONNECTION) -> list[GeneratorForm]:
    return [
        GeneratorForm(prefix + form_name(g.name), g.index, degree, g.parity, order) for g in alg.generators
    ]


def soften(
    alg: SuperAlgebra,
    mode: str = "softened",
    validate: bool = True,
    convention: str = "total",
) -> ConnectionModel:
    """Flat (Maurer-Cartan) or softened differential system of ``alg``.

    ``convention="separate"`` reads the structure equations in the
    separate-parity sign convention and transports them into this package's
    representation (see :func:`supercartan.forms.to_separate_convention`).
    """
    if mode not in ("flat", "softened"):
        raise ValueError(f"mode must be 'flat' or 'softened', not {mode!r}")
    if convention not in ("total", "separate"):
        raise ValueError(f"unknown sign convention {convention!r}")
    if validate:
        report = validate_algebra(alg)
        if not report:
            raise AlgebraError(f"refusing to build a connection on an invalid algebra: {report.summary()}")
    conn = _forms_for(alg, 1)
    mc = maurer_cartan_part(alg, conn)
    if convention == "separate":
        mc = {a: to_separate_convention(p) for a, p in mc.items()}
    if mode == "flat":
        rules = DifferentialRuleSet({conn[a]: mc[a] for a in range(len(alg))}, name=f"mc:{alg.name}")
        return ConnectionModel(alg, mode, conn, None, rules, mc, convention=convention)
    curv = _forms_for(alg, 2, "R_", CURVATURE)
    to_curv = DifferentialRuleSet({conn[a]: FormPolynomial.gen(curv[a]) for a in range(len(alg))})
    rules = DifferentialRuleSet(name=f"soft:{alg.name}")
    for a in range(len(alg)):
        rules.set(conn[a], mc[a] + FormPolynomial.gen(curv[a]))
        rules.set(curv[a], -differential(mc[a], to_curv))
    return ConnectionModel(alg, mode, conn, curv, rules, mc, convention=convention)


def bianchi_check(model: ConnectionModel) -> NilpotencyReport:
    """``d^2`` on connection forms and curvature symbols of a softened model."""
    if model.mode != "softened":
        raise ValueError("bianchi_check needs a softened model; use check_nilpotency on flat rules")
    return check_nilpotency(model.rules)


@dataclass
class CurvatureSplit:
    """Curvature split along ``g = h + f``.

    ``proper_curvature`` holds the components along ``h`` and ``torsion``
    those along ``f``, each written with the symbols in ``definitions``:
    ``R_x`` (curvature of the ``h`` connection alone) and ``Dx`` (covariant
    derivative of a soldering form).  ``unsplit`` is the full curvature with
    ``d rho`` kept as the symbol ``d<name>``.
    """

    proper_curvature: dict
    torsion: dict
    definitions: dict  # GeneratorForm symbol -> FormPolynomial in d-symbols and forms
    unsplit: dict
    split: SplitReport
    model: ConnectionModel

    def component(self, label) -> FormPolynomial:
        return self.proper_curvature.get(label, self.torsion.get(label))

    def recombine(self) -> dict:
        out = {}
        for comp in (self.proper_curvature, self.torsion):
            for label, poly in comp.items():
                out[label] = poly.substitute(self.definitions)
        return out


def split_curvature(
    model: ConnectionModel,
    split: SplitReport,
    contraction_parameter: str | None = None,
) -> CurvatureSplit:
    """Split the curvature of ``model`` along a reductive decomposition.

    With ``contraction_parameter`` (e.g. ``"lam"``) every complement
    generator is first rescaled by that parameter, so the soldering form
    enters the connection as ``lam * e``.
    """
    if not split.is_reductive:
        raise AlgebraError("split_curvature needs a reductive split")
    alg = model.algebra
    if contraction_parameter:
        alg = rescale(alg, list(split.complement), contraction_parameter)
        model = soften(alg, model.mode, validate=False, convention=model.convention)
        split = analyze_split(alg, list(split.subalgebra))
    sub = set(alg.select(list(split.subalgebra)))
    conn = model.connection
    par = alg.parities
    pieces: dict = {}  # (A, kind) -> list of polys, kind in hh, hf, ff
    for (a, b, c), v in alg.full_table().items():
        kind = "hh" if (b in sub and c in sub) else "ff" if (b not in sub and c not in sub) else "hf"
        coeff = -_HALF * v * mc_sign(par[b], par[c])
        term = FormPolynomial.monomial((conn[b], conn[c]), -coeff)
        if model.convention == "separate":
            term = to_separate_convention(term)
        pieces.setdefault((a, kind), []).append(term)
    definitions = {}
    proper, torsion, unsplit = {}, {}, {}
    for a, g in enumerate(conn):
        label = alg.generators[a].label
        dsym = FormPolynomial.gen(GeneratorForm("d" + g.name, g.index, 2, g.parity, SYMBOL))
        if a in sub:
            sym = GeneratorForm("R_" + g.name, g.index, 2, g.parity, SYMBOL)
            definitions[sym] = dsym + FormPolynomial.sum(pieces.get((a, "hh"), []))
            rest = FormPolynomial.sum(pieces.get((a, "ff"), []) + pieces.get((a, "hf"), []))
            proper[label] = FormPolynomial.gen(sym) + rest
        else:
            sym = GeneratorForm("D" + g.name, g.index, 2, g.parity, SYMBOL)
            definitions[sym] = dsym + FormPolynomial.sum(pieces.get((a, "hf"), []))
            rest = FormPolynomial.sum(pieces.get((a, "ff"), []) + pieces.get((a, "hh"), []))
            torsion[label] = FormPolynomial.gen(sym) + rest
        unsplit[label] = model.curvature_definition(label)
    return CurvatureSplit(proper, torsion, definitions, unsplit, split, model)


def generic_expansion(model: ConnectionModel, coframe=("P", "Q")) -> dict:
    """Expand every curvature symbol along products of the coframe 1-forms.

    ``R^A = sum R^A_{XY} e^X e^Y`` over unordered pairs of coframe forms,
    with fresh 0-form component symbols ``c_R_<name>[A-index | X, Y]`` whose
    parity makes each term homogeneous.  Returned as a substitution map.
    """
    if model.curvatures is None:
        raise ValueError("generic_expansion needs a softened model")
    frame = [model.connection[i] for i in model.algebra.select(list(coframe))]
    pairs = []
    for i, x in enumerate(frame):
        for y in frame[i:]:
            if x == y and x.odd:
                continue
            pairs.append((x, y))
    out = {}
    for r in model.curvatures:
        terms = []
        for x, y in pairs:
            comp = GeneratorForm(
                "c_" + r.name,
                r.index + ("|", x.name, *x.index, y.name, *y.index),
                0,
                r.parity + x.parity + y.parity,
                COMPONENT,
            )
            terms.append(FormPolynomial.monomial((comp, x, y), 1))
        out[r] = FormPolynomial.sum(terms)
    return out
