"""First-order Lagrangians on a connection model: variation, gauge checks, Noether currents.

Everything lives in the generator set of a softened :class:`ConnectionModel`
(connection forms plus independent curvature symbols), whose rules make it a
free differential algebra.  A variation ``delta`` is an even derivation with
``delta rho = var_rho`` (a symbol of the same degree and parity as ``rho``);
on curvature symbols it is induced from ``R = d rho - mc(rho)``:

    delta R^A = d(var^A) - delta(mc^A)

where ``d(var^A)`` is the symbol ``dvar^A``.  One integration by parts pass
moves every ``dvar`` to a boundary term, giving ``delta L = sum var E + d theta``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebra import analyze_split
from .cartan import ConnectionModel, soften, split_curvature
from .catalog import catalog_algebra
from .clifford import GammaRep, GMat, build_gamma
from .forms import (
    DifferentialRuleSet,
    FormPolynomial,
    GeneratorForm,
    RuleCoverageError,
    _merge,
    differential,
    wedge,
    wedge_separate,
)
from .scalar import ZERO, Scalar

__all__ = [
    "VariationError",
    "InvariantPairing",
    "levi_civita",
    "LagrangianForm",
    "VariationResult",
    "GaugeRule",
    "GaugeCheck",
    "NoetherResult",
    "OnShellRuleSet",
    "apply_derivation",
    "vary",
    "gauge_check",
    "noether_current",
    "onshell_reduce",
    "gauge_rule",
    "torsion_rule",
    "einstein_cartan",
    "euler_density",
    "macdowell_mansouri",
    "macdowell_mansouri_identity",
    "MMIdentity",
    "sugra_lagrangian",
    "gamma5",
    "sugra_reference_equations",
    "proportionality",
    "abelian_topological",
    "abelian_chern_simons",
]

VARIATION, DVARIATION, PARAMETER, DPARAMETER = 3, 4, 5, 6


class VariationError(ValueError):
    pass


# -- symbols ---------------------------------------------------------------------


def variation_symbol(g: GeneratorForm) -> GeneratorForm:
    return GeneratorForm("var_" + g.name, g.index, g.degree, g.parity, VARIATION)


def dvariation_symbol(g: GeneratorForm) -> GeneratorForm:
    return GeneratorForm("dvar_" + g.name, g.index, g.degree + 1, g.parity, DVARIATION)


def parameter_symbol(g: GeneratorForm) -> GeneratorForm:
    return GeneratorForm("chi_" + g.name, g.index, g.degree - 1, g.parity, PARAMETER)


def dparameter_symbol(g: GeneratorForm) -> GeneratorForm:
    return GeneratorForm("dchi_" + g.name, g.index, g.degree, g.parity, DPARAMETER)


# -- pairings --------------------------------------------------------------------


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def levi_civita(n: int = 4) -> dict[tuple, int]:
    """``{(a1..an): sign}`` with ``eps_{0 1 .. n-1} = +1`` (lower indices)."""
    return {perm: _perm_sign(perm) for perm in itertools.permutations(range(n))}


@dataclass(frozen=True)
class InvariantPairing:
    """``M . N = M^{ab} N^{cd} t_{abcd}`` for a totally antisymmetric tensor ``t``."""

    name: str
    tensor: Mapping  # {(a, b, c, d): Scalar}
    arity: int = 4

    @classmethod
    def levi_civita(cls, n: int = 4) -> "InvariantPairing":
        return cls("epsilon", {k: Scalar(v) for k, v in levi_civita(n).items()}, n)

    def is_totally_antisymmetric(self) -> bool:
        for idx, v in self.tensor.items():
            for i in range(self.arity - 1):
                swapped = list(idx)
                swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
                if self.tensor.get(tuple(swapped), ZERO) != -v:
                    return False
        return True

    def pair(self, m: Mapping[tuple, FormPolynomial], n: Mapping[tuple, FormPolynomial]) -> FormPolynomial:
        """Contract two antisymmetric 2-index families given on ordered pairs ``a < b``."""
        pieces = []
        for (a, b, c, d), v in self.tensor.items():
            x, y = _antisym_get(m, a, b), _antisym_get(n, c, d)
            if x is not None and y is not None:
                pieces.append(wedge(x, y).scale(v))
        return FormPolynomial.sum(pieces)


def _antisym_get(family: Mapping[tuple, FormPolynomial], a: int, b: int):
    if a == b:
        return None
    if a < b:
        return family.get((a, b))
    val = family.get((b, a))
    return None if val is None else -val


# -- derivations -------------------------------------------------------------------


def apply_derivation(f: FormPolynomial, images: Mapping[GeneratorForm, FormPolynomial], odd: bool = False) -> FormPolynomial:
    """Derivation fixed by its values on generators (others map to zero).

    With ``odd=True`` passing a factor ``x`` costs ``(-1)^(p_x + e_x)``.
    """
    acc: dict = {}
    for mono, c in f.items():
        sign = 1
        for k, x in enumerate(mono):
            img = images.get(x)
            if img is not None and img:
                prefix, suffix = mono[:k], mono[k + 1:]
                for im, ic in img.items():
                    res = _merge(prefix, im)
                    if res is None:
                        continue
                    s1, left = res
                    res = _merge(left, suffix)
                    if res is None:
                        continue
                    s2, m = res
                    v = ic * c
                    if s1 * s2 * sign < 0:
                        v = -v
                    old = acc.get(m)
                    acc[m] = v if old is None else old + v
            if odd and x.odd:
                sign = -sign
    return FormPolynomial({m: v for m, v in acc.items() if v})


def _induced_curvature_images(model: ConnectionModel, deltas: Mapping[GeneratorForm, FormPolynomial], d_delta) -> dict:
    """``delta R^A = d(delta rho^A) - delta(mc^A)`` for every curvature symbol."""
    out = {}
    for a, (g, r) in enumerate(zip(model.connection, model.curvatures)):
        img = d_delta(g) - apply_derivation(model.mc[a], deltas)
        if img:
            out[r] = img
    return out


def _require_softened(model: ConnectionModel) -> None:
    if model.mode != "softened":
        raise VariationError("variational calculus needs a softened connection model")


# -- Lagrangians ---------------------------------------------------------------------


@dataclass
class LagrangianForm:
    name: str
    form: FormPolynomial
    fields: tuple  # dynamical connection GeneratorForms
    model: ConnectionModel
    degree: int = 4

    def __post_init__(self):
        self.fields = tuple(self.fields)
        degs = self.form.degrees()
        if degs and degs != {self.degree}:
            raise VariationError(f"Lagrangian {self.name} is not homogeneous of degree {self.degree}: {sorted(degs)}")
        known = set(self.model.connection)
        for f in self.fields:
            if f not in known:
                raise VariationError(f"dynamical field {f.label} is not a connection form of the model")


@dataclass
class VariationResult:
    lagrangian: LagrangianForm
    field_equations: dict  # connection GeneratorForm -> FormPolynomial (nonzero only)
    theta: FormPolynomial
    delta_l: FormPolynomial
    rules: DifferentialRuleSet = field(repr=False, default=None)

    def equation(self, field_name: str) -> dict:
        """``{index: E}`` for all components of a field (zeros omitted)."""
        return {g.index: e for g, e in self.field_equations.items() if g.name == field_name}

    def reconstruct(self) -> FormPolynomial:
        pieces = [wedge(variation_symbol(g), e) for g, e in self.field_equations.items()]
        return FormPolynomial.sum(pieces) + differential(self.theta, self.rules)

    def residual(self) -> FormPolynomial:
        """``delta L - sum var E - d theta``; zero by construction."""
        return self.delta_l - self.reconstruct()


def _extended_rules(model: ConnectionModel, fields: Iterable[GeneratorForm]) -> DifferentialRuleSet:
    extra = {}
    for g in fields:
        v, dv = variation_symbol(g), dvariation_symbol(g)
        extra[v] = FormPolynomial.gen(dv)
        extra[dv] = FormPolynomial()
    return model.rules.merged(extra)


def _split_off(mono: tuple, target_orders: set) -> tuple[int, GeneratorForm, tuple]:
    """Move the unique factor with ``order`` in ``target_orders`` to the front."""
    hits = [k for k, x in enumerate(mono) if x.order in target_orders]
    if len(hits) != 1:
        raise VariationError(
            f"expected exactly one variation/parameter factor in {' '.join(x.label for x in mono)}"
        )
    k = hits[0]
    x = mono[k]
    sign = 1
    if x.odd:
        for y in mono[:k]:
            if y.odd:
                sign = -sign
    return sign, x, mono[:k] + mono[k + 1:]


def vary(L: LagrangianForm, model: ConnectionModel | None = None) -> VariationResult:
    """``delta L = sum_phi var_phi E_phi + d theta`` with one integration-by-parts pass."""
    model = model or L.model
    _require_softened(model)
    deltas = {g: FormPolynomial.gen(variation_symbol(g)) for g in L.fields}
    images = dict(deltas)
    images.update(
        _induced_curvature_images(
            model, deltas, lambda g: FormPolynomial.gen(dvariation_symbol(g)) if g in deltas else FormPolynomial()
        )
    )
    delta_l = apply_derivation(L.form, images)
    rules = _extended_rules(model, L.fields)
    base_of = {variation_symbol(g): g for g in L.fields}
    base_of.update({dvariation_symbol(g): g for g in L.fields})
    theta_parts, direct = [], []
    for mono, c in delta_l.items():
        sign, x, rest = _split_off(mono, {VARIATION, DVARIATION})
        coeff = c if sign == 1 else -c
        g = base_of[x]
        rest_poly = FormPolynomial({rest: coeff})
        if x.order == VARIATION:
            direct.append((g, rest_poly))
            continue
        # dvar Z = d(var Z) - (-1)^(p+e) var dZ
        v = variation_symbol(g)
        theta_parts.append(wedge(v, rest_poly))
        dz = differential(rest_poly, model.rules)
        direct.append((g, dz if v.odd else -dz))
    eqs: dict = {}
    for g, e in direct:
        eqs[g] = eqs.get(g, FormPolynomial()) + e
    eqs = {g: e for g, e in sorted(eqs.items(), key=lambda kv: kv[0].key) if e}
    return VariationResult(L, eqs, FormPolynomial.sum(theta_parts), delta_l, rules)


# -- gauge transformations -----------------------------------------------------------


@dataclass
class GaugeRule:
    """``delta_chi rho`` for connection forms, linear in parameters ``chi``/``dchi``."""

    name: str
    rules: dict  # connection GeneratorForm -> FormPolynomial
    parameters: tuple  # parameter GeneratorForms (degree p-1)

    def __post_init__(self):
        for g, img in self.rules.items():
            degs = img.degrees()
            if degs and degs != {g.degree}:
                raise VariationError(f"gauge rule for {g.label} changes the form degree")


def _param_rules(params: Iterable[GeneratorForm]) -> dict:
    out = {}
    for p in params:
        dp = GeneratorForm("d" + p.name, p.index, p.degree + 1, p.parity, DPARAMETER)
        out[p] = FormPolynomial.gen(dp)
        out[dp] = FormPolynomial()
    return out


def gauge_rule(model: ConnectionModel, subset=None, name: str = "gauge") -> GaugeRule:
    """Infinitesimal gauge transformation ``delta rho = d chi + [rho, chi]`` along ``subset``.

    ``subset`` selects the algebra generators carrying a parameter (default:
    all).  The transformation is the linearisation of the structure equations:
    ``delta rho^A = dchi^A + i_chi(mc^A)`` with ``i_chi`` the odd derivation
    ``rho^B -> chi^B``.
    """
    alg = model.algebra
    positions = range(len(alg)) if subset is None else alg.select(subset)
    chi = {}
    for a in positions:
        g = model.connection[a]
        chi[g] = parameter_symbol(g)
    contraction = {g: FormPolynomial.gen(p) for g, p in chi.items()}
    rules = {}
    for a, g in enumerate(model.connection):
        img = apply_derivation(model.mc[a], contraction, odd=True)
        if g in chi:
            img = img + FormPolynomial.gen(GeneratorForm("d" + chi[g].name, g.index, g.degree, g.parity, DPARAMETER))
        rules[g] = img
    return GaugeRule(name, rules, tuple(chi.values()))


@dataclass
class GaugeCheck:
    status: str  # "zero" | "exact" | "non-invariant"
    residual: FormPolynomial
    primitive: FormPolynomial  # alpha with d alpha = residual when exact
    remainder: FormPolynomial


def _gauge_images(L: LagrangianForm, rules: GaugeRule, model: ConnectionModel) -> tuple[dict, DifferentialRuleSet]:
    used = {x for mono, _ in L.form.items() for x in mono}
    for x in used:
        if x in model.connection and x not in rules.rules:
            raise RuleCoverageError(f"gauge rule {rules.name} does not cover {x.label}")
    ext = model.rules.merged(_param_rules(rules.parameters))
    deltas = dict(rules.rules)
    images = dict(deltas)
    images.update(_induced_curvature_images(model, deltas, lambda g: differential(deltas.get(g, FormPolynomial()), ext)))
    return images, ext


def _primitive(f: FormPolynomial, ext: DifferentialRuleSet) -> tuple[FormPolynomial, FormPolynomial]:
    """Split ``f`` (linear in parameters) as ``d q + remainder`` with no ``dchi`` in the remainder."""
    q_parts = []
    for mono, c in f.items():
        sign, x, rest = _split_off(mono, {PARAMETER, DPARAMETER})
        if x.order != DPARAMETER:
            continue
        p = GeneratorForm(x.name[1:], x.index, x.degree - 1, x.parity, PARAMETER)
        q_parts.append(wedge(p, FormPolynomial({rest: c if sign == 1 else -c})))
    q = FormPolynomial.sum(q_parts)
    return q, f - differential(q, ext)


def gauge_check(L: LagrangianForm, rules: GaugeRule, model: ConnectionModel | None = None) -> GaugeCheck:
    model = model or L.model
    _require_softened(model)
    images, ext = _gauge_images(L, rules, model)
    res = apply_derivation(L.form, images)
    if not res:
        return GaugeCheck("zero", res, FormPolynomial(), FormPolynomial())
    alpha, remainder = _primitive(res, ext)
    return GaugeCheck("exact" if not remainder else "non-invariant", res, alpha, remainder)


# -- on-shell reduction ----------------------------------------------------------------


class OnShellRuleSet:
    """Rewrites of designated symbols (curvatures, field-equation symbols)."""

    def __init__(self, rules: Mapping[GeneratorForm, FormPolynomial] | None = None, name: str = ""):
        self.name = name
        self.rules = {}
        for g, rhs in (rules or {}).items():
            rhs = FormPolynomial() if rhs == 0 else rhs
            for mono in rhs.terms:
                deg = sum(x.degree for x in mono)
                par = sum(x.parity for x in mono) % 2
                if deg != g.degree or par != g.parity:
                    raise VariationError(f"on-shell rule for {g.label} changes degree or parity")
            self.rules[g] = rhs
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        deps = {g: {x for mono in rhs.terms for x in mono if x in self.rules} for g, rhs in self.rules.items()}
        state: dict = {}

        def visit(g, path):
            if state.get(g) == 1:
                raise VariationError(f"cyclic on-shell rules: {' -> '.join(x.label for x in path + [g])}")
            if state.get(g) == 2:
                return
            state[g] = 1
            for h in deps[g]:
                visit(h, path + [g])
            state[g] = 2

        for g in self.rules:
            visit(g, [])

    def __len__(self) -> int:
        return len(self.rules)


def onshell_reduce(f: FormPolynomial, rules: OnShellRuleSet) -> FormPolynomial:
    """Apply the rewrites until no rule symbol is left."""
    for _ in range(len(rules) + 1):
        if not any(x in rules.rules for x in f.generators()):
            return f
        f = f.substitute(rules.rules)
    return f


def torsion_rule(model: ConnectionModel, subset=None) -> OnShellRuleSet:
    """Curvature symbols of the complement (soldering) generators set to zero."""
    alg = model.algebra
    if subset is None:
        subset = [g.label for g in alg.generators if g.name == "P"]
    return OnShellRuleSet({model.curvatures[a]: FormPolynomial() for a in alg.select(subset)}, "torsion")


@dataclass
class NoetherResult:
    current: FormPolynomial
    charge: FormPolynomial | None
    status: str  # "exact", "exact on-shell", "not exact"
    remainder: FormPolynomial


def noether_current(
    L: LagrangianForm,
    rules: GaugeRule,
    model: ConnectionModel | None = None,
    onshell: OnShellRuleSet | None = None,
) -> NoetherResult:
    """``J = theta(delta_chi) - alpha`` and, when exact (on-shell), ``q`` with ``J = d q``."""
    model = model or L.model
    check = gauge_check(L, rules, model)
    if check.status == "non-invariant":
        raise VariationError(f"{L.name} is not gauge invariant under {rules.name}")
    var = vary(L, model)
    subst = {variation_symbol(g): img for g, img in rules.rules.items() if g in L.fields}
    J = var.theta.substitute(subst) - check.primitive
    ext = model.rules.merged(_param_rules(rules.parameters))
    q, remainder = _primitive(J, ext)
    if not remainder:
        return NoetherResult(J, q, "exact", remainder)
    if onshell is not None:
        reduced = onshell_reduce(remainder, onshell)
        if not reduced:
            return NoetherResult(J, onshell_reduce(q, onshell), "exact on-shell", reduced)
        remainder = reduced
    return NoetherResult(J, None, "not exact", remainder)


# -- built-in Lagrangians ----------------------------------------------------------------


def _poincare_model(dimension: int = 4) -> ConnectionModel:
    return soften(catalog_algebra("iso", 1, dimension - 1))


def _lorentz_family(model: ConnectionModel, source: str = "curvature") -> dict:
    D = model.algebra.dimension
    out = {}
    for a, b in itertools.combinations(range(D), 2):
        g = model.curvature(f"M[{a} {b}]") if source == "curvature" else model.form(f"M[{a} {b}]")
        out[(a, b)] = FormPolynomial.gen(g)
    return out


def _vielbein_products(model: ConnectionModel) -> dict:
    D = model.algebra.dimension
    V = [model.form(f"P[{a}]") for a in range(D)]
    return {(a, b): wedge(V[a], V[b]) for a, b in itertools.combinations(range(D), 2)}


def einstein_cartan(model: ConnectionModel | None = None, cosmological=None) -> LagrangianForm:
    """``(R^{ab} V^c V^d - Lambda/6 V^a V^b V^c V^d) eps_{abcd}``."""
    model = model or _poincare_model()
    Lam = Scalar.param("Lambda") if cosmological is None else Scalar.coerce(cosmological)
    eps = InvariantPairing.levi_civita(4)
    R = _lorentz_family(model)
    VV = _vielbein_products(model)
    form = eps.pair(R, VV) - eps.pair(VV, VV).scale(Lam * Scalar(Fraction(1, 6)))
    fields = [model.form(g.label) for g in model.algebra.generators if g.name in ("M", "P")]
    return LagrangianForm("einstein-cartan", form, fields, model)


def euler_density(model: ConnectionModel | None = None) -> LagrangianForm:
    """``1/2 R . R``."""
    model = model or _poincare_model()
    eps = InvariantPairing.levi_civita(4)
    R = _lorentz_family(model)
    fields = [model.form(g.label) for g in model.algebra.generators if g.name in ("M", "P")]
    return LagrangianForm("euler", eps.pair(R, R).scale(Scalar(Fraction(1, 2))), fields, model)


def macdowell_mansouri_curvature(model: ConnectionModel | None = None, parameter: str = "lam") -> dict:
    """Lorentz block ``F^{ab}`` of the rescaled de Sitter family, in the Poincare model's symbols."""
    model = model or _poincare_model()
    ds = catalog_algebra("ds", 1, 3)
    split = analyze_split(ds, ["M"])
    cs = split_curvature(soften(ds), split, parameter)
    rename = {}
    for sym in cs.definitions:
        if sym.name.startswith("R_"):
            rename[sym] = FormPolynomial.gen(model.curvature(f"M[{sym.index[0]} {sym.index[1]}]"))
    out = {}
    for label, poly in cs.proper_curvature.items():
        g = ds.generator(label)
        out[g.index] = poly.substitute(rename)
    return out


def macdowell_mansouri(model: ConnectionModel | None = None, parameter: str = "lam") -> LagrangianForm:
    """``1/2 F . F`` with ``F = R - eps lam^2 e e`` from the de Sitter curvature split."""
    model = model or _poincare_model()
    F = macdowell_mansouri_curvature(model, parameter)
    eps = InvariantPairing.levi_civita(4)
    fields = [model.form(g.label) for g in model.algebra.generators if g.name in ("M", "P")]
    return LagrangianForm("macdowell-mansouri", eps.pair(F, F).scale(Scalar(Fraction(1, 2))), fields, model)


@dataclass
class MMIdentity:
    """``L_MM - (1/2 R.R - eps lam^2 L_EC)`` and the field-equation comparison."""

    identity_residual: FormPolynomial
    equation_mismatches: dict  # field -> E_MM - k E_EC (nonzero only)
    ratio: Scalar

    @property
    def passed(self) -> bool:
        return self.identity_residual.is_zero() and not self.equation_mismatches


def macdowell_mansouri_identity(parameter: str = "lam") -> MMIdentity:
    """Compare MacDowell-Mansouri with Euler plus Einstein-Cartan.

    With ``F = R - eps lam^2 e e``: ``L_MM = 1/2 R.R - eps lam^2 L_EC`` at
    ``Lambda = 3 eps lam^2``, and since the Euler term has no field equation
    ``E_MM = -eps lam^2 E_EC``.
    """
    lam, eps = Scalar.param(parameter), Scalar.param("eps")
    k = -eps * lam**2
    L_mm = macdowell_mansouri(parameter=parameter)
    L_ec = einstein_cartan(L_mm.model, cosmological=3 * eps * lam**2)
    euler = euler_density(L_mm.model)
    residual = L_mm.form - (euler.form + L_ec.form.scale(k))
    e_mm = vary(L_mm).field_equations
    e_ec = vary(L_ec).field_equations
    mismatches = {}
    for g in set(e_mm) | set(e_ec):
        diff = e_mm.get(g, FormPolynomial()) - e_ec.get(g, FormPolynomial()).scale(k)
        if diff:
            mismatches[g] = diff
    return MMIdentity(residual, mismatches, k)


def gamma5(rep: GammaRep, convention: str = "total") -> GMat:
    """``gamma_5 = +-i gamma^0 gamma^1 gamma^2 gamma^3`` (squares to one).

    The phase is the one for which the spin-connection equation of the
    supergravity Lagrangian closes on the supertorsion: ``+i`` in the
    total-parity convention, ``-i`` in the separate-parity one.
    """
    g = rep.gamma(0, 1, 2, 3).times_i()
    return g if convention == "total" else -g


def sugra_lagrangian(
    model: ConnectionModel | None = None,
    rep: GammaRep | None = None,
    convention: str = "separate",
) -> LagrangianForm:
    """``R^{ab} V^c V^d eps_{abcd} + 4 psibar gamma_5 gamma_a D psi V^a`` on super-Poincare(4).

    By default both the structure equations and the Lagrangian are read in
    the separate-parity sign convention and transported into the package
    representation.
    """
    model = model or soften(catalog_algebra("super-poincare", 4), convention=convention)
    convention = model.convention
    rep = rep or build_gamma(4, (1, 3))
    prod = wedge_separate if convention == "separate" else wedge
    eps = InvariantPairing.levi_civita(4)
    R = _lorentz_family(model)
    VV = _vielbein_products(model)
    psi, rho, V = _sugra_fields(model, rep)
    g5 = gamma5(rep, convention)
    pieces = [eps.pair(R, VV)]
    for a in range(4):
        m = rep.conjugation @ g5 @ rep.gamma(a, lower=True)
        for al, be in m.nonzero():
            pieces.append(prod(psi[al], rho[be], V[a]).scale(m.entry(al, be) * 4))
    fields = [model.form(g.label) for g in model.algebra.generators]
    return LagrangianForm("sugra-4", FormPolynomial.sum(pieces), fields, model)


def _sugra_fields(model: ConnectionModel, rep: GammaRep):
    n = rep.spinor_size
    psi = [model.form(f"Q[{al}]") for al in range(n)]
    rho = [model.curvature(f"Q[{al}]") for al in range(n)]
    V = [model.form(f"P[{a}]") for a in range(4)]
    return psi, rho, V


def sugra_reference_equations(model: ConnectionModel, rep: GammaRep | None = None) -> dict:
    """Hand-written supergravity field equations, keyed like ``VariationResult.field_equations``.

    * ``omega[a b]``: ``R^c V^d eps_{abcd}``
    * ``V[d]``: ``R^{ab} V^c eps_{abcd} - 2 psibar gamma_5 gamma_d rho``
    * ``psi[alpha]``: ``(C gamma_5 gamma_a)_{alpha beta} (2 rho^beta V^a - psi^beta R^a)``

    Products are taken in the model's sign convention.  Agreement with the
    derived equations is up to one overall factor per equation.
    """
    rep = rep or build_gamma(4, (1, 3))
    convention = model.convention
    prod = wedge_separate if convention == "separate" else wedge
    eps = InvariantPairing.levi_civita(4)
    psi, rho, V = _sugra_fields(model, rep)
    T = [model.curvature(f"P[{a}]") for a in range(4)]
    g5 = gamma5(rep, convention)
    out = {}
    for a in range(4):
        for b in range(a + 1, 4):
            terms = []
            for c in range(4):
                for d in range(4):
                    e = eps.tensor.get((a, b, c, d), 0)
                    if e:
                        terms.append(prod(T[c], V[d]).scale(e))
            out[model.form(f"M[{a} {b}]")] = FormPolynomial.sum(terms)
    for d in range(4):
        terms = []
        for a in range(4):
            for b in range(4):
                for c in range(4):
                    e = eps.tensor.get((a, b, c, d), 0)
                    if e:
                        terms.append(prod(_antisym_get(_lorentz_family(model), a, b), V[c]).scale(e))
        m = rep.conjugation @ g5 @ rep.gamma(d, lower=True)
        for al, be in m.nonzero():
            terms.append(prod(psi[al], rho[be]).scale(m.entry(al, be) * -2))
        out[V[d]] = FormPolynomial.sum(terms)
    for al in range(rep.spinor_size):
        terms = []
        for a in range(4):
            m = rep.conjugation @ g5 @ rep.gamma(a, lower=True)
            for be in range(rep.spinor_size):
                c = m.entry(al, be)
                if c.is_zero():
                    continue
                terms.append(prod(rho[be], V[a]).scale(c * 2))
                terms.append(prod(psi[be], T[a]).scale(-c))
        out[psi[al]] = FormPolynomial.sum(terms)
    return out


def proportionality(derived: FormPolynomial, reference: FormPolynomial):
    """The scalar ``k`` with ``derived == k * reference``, or ``None``."""
    if reference.is_zero():
        return Scalar(0) if derived.is_zero() else None
    m, c = next(iter(reference.items()))
    k = derived.coefficient(m) / c
    return k if derived == reference.scale(k) else None


def abelian_topological() -> LagrangianForm:
    """``dA dA`` on a single abelian generator (``dA`` is the curvature symbol)."""
    model = soften(catalog_algebra("abelian", 1))
    F = FormPolynomial.gen(model.curvatures[0])
    return LagrangianForm("dA-dA", wedge(F, F), [model.connection[0]], model)


def abelian_chern_simons() -> LagrangianForm:
    """``A dA`` (degree 3): not gauge invariant, but invariant up to ``d``."""
    model = soften(catalog_algebra("abelian", 1))
    A = model.connection[0]
    return LagrangianForm("A-dA", wedge(A, model.curvatures[0]), [A], model, degree=3)
