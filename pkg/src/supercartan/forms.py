"""Sparse bigraded exterior algebra.

A :class:`GeneratorForm` carries a form degree ``p`` and a Grassmann parity
``e``; two generators commute up to the sign ``(-1)^((p1+e1)(p2+e2))`` (the
total-parity rule).  Gravitino 1-forms (``p = e = 1``) therefore commute,
vielbein 1-forms anticommute, and a factor with odd total parity may not
repeat in a monomial.

Monomials are tuples of generators sorted by :attr:`GeneratorForm.key`;
the sign produced by sorting is absorbed into the coefficient.

>>> V0, V1 = GeneratorForm("V", (0,), 1), GeneratorForm("V", (1,), 1)
>>> str(FormPolynomial.gen(V1) * V0)
'-V[0] V[1]'
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .scalar import ONE, ZERO, Scalar

__all__ = [
    "GeneratorForm",
    "FormPolynomial",
    "DifferentialRuleSet",
    "NilpotencyReport",
    "RuleCoverageError",
    "PartitionError",
    "wedge",
    "differential",
    "check_nilpotency",
    "sector_decompose",
    "spinor_contract",
    "bilinear",
    "separate_sign",
    "to_separate_convention",
    "wedge_separate",
]


class RuleCoverageError(KeyError):
    """A generator reached by the differential has no rule."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "missing rule"


class PartitionError(ValueError):
    pass


class GeneratorForm:
    """A generating form ``name[index]`` of degree ``degree`` and parity ``parity``.

    ``order`` is a coarse class used first in the canonical ordering
    (connection forms, curvatures, potentials, variations, ...).
    """

    __slots__ = ("name", "index", "degree", "parity", "order", "key", "odd", "_hash")

    def __init__(self, name: str, index: tuple = (), degree: int = 1, parity: int = 0, order: int = 0):
        if degree < 0:
            raise ValueError("form degree must be non-negative")
        self.name = name
        self.index = tuple(index)
        self.degree = degree
        self.parity = parity % 2
        self.order = order
        self.key = (order, name, self.index, degree, self.parity)
        self.odd = (degree + self.parity) % 2 == 1
        self._hash = hash(self.key)

    def __eq__(self, other) -> bool:
        return isinstance(other, GeneratorForm) and self.key == other.key

    def __lt__(self, other: "GeneratorForm") -> bool:
        return self.key < other.key

    def __hash__(self) -> int:
        return self._hash

    @property
    def label(self) -> str:
        if not self.index:
            return self.name
        return f"{self.name}[{' '.join(map(str, self.index))}]"

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"GeneratorForm({self.label}, p={self.degree}, e={self.parity})"

    def with_order(self, order: int) -> "GeneratorForm":
        return GeneratorForm(self.name, self.index, self.degree, self.parity, order)


def _canon(factors: Sequence[GeneratorForm]) -> tuple[int, tuple] | None:
    """Sort factors; return (sign, monomial) or None when the product vanishes."""
    items = list(factors)
    sign = 1
    n = len(items)
    for i in range(1, n):  # insertion sort, counting odd-odd transpositions
        x = items[i]
        j = i - 1
        while j >= 0 and x.key < items[j].key:
            if x.odd and items[j].odd:
                sign = -sign
            items[j + 1] = items[j]
            j -= 1
        items[j + 1] = x
    for i in range(n - 1):
        if items[i].odd and items[i].key == items[i + 1].key:
            return None
    return sign, tuple(items)


def _merge(m1: tuple, m2: tuple) -> tuple[int, tuple] | None:
    """Product of two canonical monomials."""
    if not m1:
        return 1, m2
    if not m2:
        return 1, m1
    if m1[-1].key < m2[0].key:
        return 1, m1 + m2
    out = []
    sign = 1
    i = j = 0
    odd_left = sum(1 for x in m1 if x.odd)  # odd factors of m1 not yet emitted
    n1, n2 = len(m1), len(m2)
    while i < n1 and j < n2:
        x, y = m1[i], m2[j]
        if y.key < x.key:
            if y.odd and odd_left % 2:
                sign = -sign
            out.append(y)
            j += 1
        elif x.key == y.key and x.odd:
            return None
        else:
            out.append(x)
            if x.odd:
                odd_left -= 1
            i += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return sign, tuple(out)


def _total_odd(mono: tuple) -> int:
    return sum(1 for x in mono if x.odd) % 2


class FormPolynomial:
    """Sparse sum of scalar-weighted canonical monomials."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | None = None):
        self._terms = {} if terms is None else {m: c for m, c in terms.items() if c}

    @classmethod
    def _raw(cls, terms: dict) -> "FormPolynomial":
        obj = cls.__new__(cls)
        obj._terms = terms
        return obj

    # -- constructors -------------------------------------------------------
    @classmethod
    def gen(cls, g: GeneratorForm, coeff=ONE) -> "FormPolynomial":
        return cls._raw({(g,): Scalar.coerce(coeff)}) if coeff else cls()

    @classmethod
    def constant(cls, value) -> "FormPolynomial":
        value = Scalar.coerce(value)
        return cls._raw({(): value}) if value else cls()

    @classmethod
    def monomial(cls, factors: Sequence[GeneratorForm], coeff=ONE) -> "FormPolynomial":
        res = _canon(factors)
        coeff = Scalar.coerce(coeff)
        if res is None or not coeff:
            return cls()
        sign, mono = res
        return cls._raw({mono: coeff if sign == 1 else -coeff})

    @classmethod
    def sum(cls, items: Iterable["FormPolynomial"]) -> "FormPolynomial":
        acc: dict = {}
        for p in items:
            _accumulate(acc, p._terms.items())
        return cls._raw({m: c for m, c in acc.items() if c})

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def degrees(self) -> set[int]:
        return {sum(x.degree for x in m) for m in self._terms}

    def parities(self) -> set[int]:
        return {sum(x.parity for x in m) % 2 for m in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1 and len(self.parities()) <= 1

    @property
    def degree(self) -> int:
        degs = self.degrees()
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous polynomial (degrees {sorted(degs)})")
        return degs.pop() if degs else 0

    @property
    def total_parity(self) -> int:
        """``(p + e) mod 2`` of a homogeneous polynomial (0 for zero)."""
        tot = {_total_odd(m) for m in self._terms}
        if len(tot) > 1:
            raise ValueError("polynomial mixes total parities")
        return tot.pop() if tot else 0

    def generators(self) -> set[GeneratorForm]:
        return {x for m in self._terms for x in m}

    def coefficient(self, factors: Sequence[GeneratorForm]) -> Scalar:
        res = _canon(factors)
        if res is None:
            return ZERO
        sign, mono = res
        c = self._terms.get(mono, ZERO)
        return c if sign == 1 else -c

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "FormPolynomial":
        other = _coerce_poly(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        _accumulate(acc, other._terms.items())
        return FormPolynomial._raw({m: c for m, c in acc.items() if c})

    __radd__ = __add__

    def __neg__(self) -> "FormPolynomial":
        return FormPolynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "FormPolynomial":
        return self + (-_coerce_poly(other))

    def __rsub__(self, other) -> "FormPolynomial":
        return _coerce_poly(other) - self

    def scale(self, s) -> "FormPolynomial":
        s = Scalar.coerce(s)
        if not s:
            return FormPolynomial()
        if s == ONE:
            return self
        return FormPolynomial._raw({m: c * s for m, c in self._terms.items() if c * s})

    def __mul__(self, other) -> "FormPolynomial":
        if isinstance(other, (FormPolynomial, GeneratorForm)):
            return wedge(self, other)
        return self.scale(other)

    def __rmul__(self, other) -> "FormPolynomial":
        if isinstance(other, GeneratorForm):
            return wedge(other, self)
        return self.scale(other)

    __xor__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, FormPolynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Scalar)):
            return self == FormPolynomial.constant(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    # -- transformations ----------------------------------------------------
    def map_coefficients(self, fn: Callable[[Scalar], Scalar]) -> "FormPolynomial":
        return FormPolynomial({m: fn(c) for m, c in self._terms.items()})

    def subs(self, **values) -> "FormPolynomial":
        """Substitute formal parameters in every coefficient."""
        return self.map_coefficients(lambda c: c.subs(values))

    def substitute(self, mapping: Mapping[GeneratorForm, "FormPolynomial"]) -> "FormPolynomial":
        """Replace generators by polynomials of the same degree and parity."""
        if not mapping:
            return self
        mapping = {g: _coerce_poly(v) for g, v in mapping.items()}
        acc: dict = {}
        for mono, c in self._terms.items():
            if not any(x in mapping for x in mono):
                _accumulate(acc, [(mono, c)])
                continue
            partial = {(): c}
            for x in mono:
                repl = mapping.get(x)
                factor = repl._terms if repl is not None else {(x,): ONE}
                partial = _mul_terms(partial, factor)
                if not partial:
                    break
            _accumulate(acc, partial.items())
        return FormPolynomial._raw({m: v for m, v in acc.items() if v})

    def filter(self, predicate: Callable[[tuple], bool]) -> "FormPolynomial":
        return FormPolynomial._raw({m: c for m, c in self._terms.items() if predicate(m)})

    def drop(self, generators: Iterable[GeneratorForm]) -> "FormPolynomial":
        """Set the listed generators to zero."""
        gone = set(generators)
        return self.filter(lambda m: not any(x in gone for x in m))

    # -- rendering ----------------------------------------------------------
    def render(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for mono in sorted(self._terms, key=lambda m: tuple(x.key for x in m)):
            c = self._terms[mono]
            word = " ".join(x.label for x in mono)
            cs = str(c)
            if not word:
                text = cs
            elif cs == "1":
                text = word
            elif cs == "-1":
                text = "-" + word
            elif len(c.terms) > 1 or (" " in cs):
                text = f"({cs}) {word}"
            else:
                text = f"{cs} {word}"
            parts.append(text)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    __str__ = render

    def __repr__(self) -> str:
        text = self.render()
        if len(text) > 200:
            text = text[:200] + " ..."
        return f"FormPolynomial({text})"


def _accumulate(acc: dict, items) -> None:
    for m, c in items:
        old = acc.get(m)
        acc[m] = c if old is None else old + c


def _mul_terms(t1: Mapping, t2: Mapping) -> dict:
    acc: dict = {}
    for m1, c1 in t1.items():
        for m2, c2 in t2.items():
            res = _merge(m1, m2)
            if res is None:
                continue
            sign, m = res
            v = c1 * c2
            if sign < 0:
                v = -v
            old = acc.get(m)
            acc[m] = v if old is None else old + v
    return {m: c for m, c in acc.items() if c}


def _coerce_poly(x) -> FormPolynomial:
    if isinstance(x, FormPolynomial):
        return x
    if isinstance(x, GeneratorForm):
        return FormPolynomial.gen(x)
    return FormPolynomial.constant(x)


def wedge(*factors) -> FormPolynomial:
    """Graded product of polynomials (or generators), left to right."""
    if not factors:
        return FormPolynomial.constant(1)
    terms = _coerce_poly(factors[0])._terms
    for f in factors[1:]:
        terms = _mul_terms(terms, _coerce_poly(f)._terms)
        if not terms:
            break
    return FormPolynomial._raw(dict(terms))


# -- differential ---------------------------------------------------------------


class DifferentialRuleSet:
    """``d`` on generators: ``{GeneratorForm: FormPolynomial}``.

    Every rule must raise the degree by exactly one and preserve the
    Grassmann parity.  Generators listed in ``constants`` are closed
    (``d g = 0``) without needing a rule.
    """

    def __init__(self, rules: Mapping[GeneratorForm, FormPolynomial] | None = None, name: str = ""):
        self.name = name
        self._rules: dict = {}
        for g, rhs in (rules or {}).items():
            self.set(g, rhs)

    def set(self, g: GeneratorForm, rhs) -> None:
        rhs = _coerce_poly(rhs)
        for mono in rhs._terms:
            deg = sum(x.degree for x in mono)
            par = sum(x.parity for x in mono) % 2
            if deg != g.degree + 1 or par != g.parity:
                raise ValueError(
                    f"rule for {g.label} has a term of degree {deg}, parity {par}; "
                    f"expected degree {g.degree + 1}, parity {g.parity}"
                )
        self._rules[g] = rhs

    def __contains__(self, g) -> bool:
        return g in self._rules

    def __getitem__(self, g: GeneratorForm) -> FormPolynomial:
        try:
            return self._rules[g]
        except KeyError:
            raise RuleCoverageError(f"no differential rule for {g.label}") from None

    def get(self, g, default=None):
        return self._rules.get(g, default)

    def generators(self) -> list[GeneratorForm]:
        return sorted(self._rules, key=lambda g: g.key)

    def items(self):
        return [(g, self._rules[g]) for g in self.generators()]

    def __len__(self) -> int:
        return len(self._rules)

    def merged(self, other: "DifferentialRuleSet | Mapping", name: str | None = None) -> "DifferentialRuleSet":
        out = DifferentialRuleSet(name=name or self.name)
        out._rules = dict(self._rules)
        items = other.items() if isinstance(other, DifferentialRuleSet) else other.items()
        for g, rhs in items:
            out.set(g, rhs)
        return out

    def map(self, fn: Callable[[FormPolynomial], FormPolynomial]) -> "DifferentialRuleSet":
        return DifferentialRuleSet({g: fn(r) for g, r in self._rules.items()}, self.name)

    def d(self, f) -> FormPolynomial:
        return differential(f, self)


def differential(f, rules: DifferentialRuleSet | Mapping, cache: dict | None = None) -> FormPolynomial:
    """Apply ``d`` with the graded Leibniz rule ``d(xy) = dx y + (-1)^(p_x+e_x) x dy``."""
    if not isinstance(rules, DifferentialRuleSet):
        rules = DifferentialRuleSet(rules)
    f = _coerce_poly(f)
    acc: dict = {}
    for mono, c in f._terms.items():
        dm = _d_monomial(mono, rules, cache)
        for m, v in dm.items():
            old = acc.get(m)
            w = v * c
            acc[m] = w if old is None else old + w
    return FormPolynomial._raw({m: v for m, v in acc.items() if v})


def _d_monomial(mono: tuple, rules: DifferentialRuleSet, cache: dict | None) -> dict:
    if cache is not None and mono in cache:
        return cache[mono]
    acc: dict = {}
    sign = 1
    for k, x in enumerate(mono):
        rhs = rules[x]._terms
        if rhs:
            prefix, suffix = mono[:k], mono[k + 1:]
            for dm, dc in rhs.items():
                res = _merge(prefix, dm)
                if res is None:
                    continue
                s1, left = res
                res = _merge(left, suffix)
                if res is None:
                    continue
                s2, m = res
                v = dc if s1 * s2 * sign == 1 else -dc
                old = acc.get(m)
                acc[m] = v if old is None else old + v
        if x.odd:
            sign = -sign
    out = {m: v for m, v in acc.items() if v}
    if cache is not None:
        cache[mono] = out
    return out


@dataclass
class NilpotencyReport:
    residuals: dict = field(default_factory=dict)  # generator label -> FormPolynomial (nonzero only)
    checked: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.residuals

    def __bool__(self) -> bool:
        return self.passed

    def summary(self) -> str:
        if self.passed:
            return f"pass ({len(self.checked)} generators)"
        worst = ", ".join(sorted(self.residuals)[:5])
        return f"fail: d^2 != 0 on {len(self.residuals)} of {len(self.checked)} generators ({worst})"


def check_nilpotency(
    rules: DifferentialRuleSet,
    generators: Iterable[GeneratorForm] | None = None,
) -> NilpotencyReport:
    """Compute ``d(d g)`` for every generator (default: all rule generators)."""
    gens = rules.generators() if generators is None else list(generators)
    report = NilpotencyReport()
    cache: dict = {}
    for g in gens:
        dd = differential(rules[g], rules, cache)
        report.checked.append(g.label)
        if dd:
            report.residuals[g.label] = dd
    return report


# -- sign conventions -------------------------------------------------------------------
#
# The other common convention lets form degree and Grassmann parity contribute
# separately, ``(-1)^(p1 p2 + e1 e2)``.  The map ``m -> (-1)^(sum_{i<j} e_i p_j) m``
# on words is an isomorphism of differential algebras between the two
# conventions (rules are transported with it), so identities written in
# either convention can be compared exactly.


def separate_sign(word: Sequence[GeneratorForm]) -> int:
    sign, eps = 1, 0
    for x in word:
        if eps and x.degree % 2:
            sign = -sign
        eps ^= x.parity
    return sign


def to_separate_convention(f: FormPolynomial) -> FormPolynomial:
    """Apply the sign twist to every canonical monomial (an involution)."""
    return FormPolynomial._raw({m: (c if separate_sign(m) == 1 else -c) for m, c in f._terms.items()})


def wedge_separate(*factors) -> FormPolynomial:
    """Product computed in the separate-parity convention, returned in this one.

    Factors are given in this module's representation; a product ``x y``
    picks up ``(-1)^(e_x p_y)`` relative to :func:`wedge`.
    """
    if not factors:
        return FormPolynomial.constant(1)
    acc = _coerce_poly(factors[0])
    for f in factors[1:]:
        g = _coerce_poly(f)
        pieces = []
        for m1, c1 in acc._terms.items():
            e1 = sum(x.parity for x in m1) % 2
            for m2, c2 in g._terms.items():
                p2 = sum(x.degree for x in m2) % 2
                term = wedge(FormPolynomial._raw({m1: c1}), FormPolynomial._raw({m2: c2}))
                pieces.append(-term if e1 and p2 else term)
        acc = FormPolynomial.sum(pieces)
    return acc


# -- sectors and spinor sugar ---------------------------------------------------------


def sector_decompose(
    f: FormPolynomial,
    partition: Mapping[str, Iterable],
    order: Sequence[str] | None = None,
) -> dict[tuple, FormPolynomial]:
    """Split ``f`` by how many factors come from each partition class.

    ``partition`` maps a class label to generator forms or generator names;
    keys of the result are count tuples in ``order`` (default: insertion
    order), e.g. ``(k, m)`` for classes ``V`` and ``psi``.  Degree-0 factors
    are coefficients and are not counted.
    """
    order = list(order or partition)
    owner: dict = {}
    for label, members in partition.items():
        for g in members:
            key = g if isinstance(g, (GeneratorForm, str)) else str(g)
            if key in owner:
                raise PartitionError(f"{key} assigned to two classes")
            owner[key] = label
    out: dict = {}
    for mono, c in f._terms.items():
        counts = dict.fromkeys(order, 0)
        for x in mono:
            if x.degree == 0:
                continue
            cls = owner.get(x, owner.get(x.name))
            if cls is None:
                raise PartitionError(f"generator {x.label} is not covered by the partition")
            counts[cls] += 1
        out.setdefault(tuple(counts[k] for k in order), {})[mono] = c
    return {k: FormPolynomial._raw(v) for k, v in sorted(out.items())}


def spinor_contract(matrix: Mapping[tuple, Scalar], left: Sequence, right: Sequence) -> FormPolynomial:
    """``sum_{ab} M_{ab} left_a right_b`` for sparse ``{(a, b): Scalar}``."""
    pieces = []
    for (a, b), v in matrix.items():
        if v:
            pieces.append(wedge(left[a], right[b]).scale(v))
    return FormPolynomial.sum(pieces)


def bilinear(cmatrix, spinor: Sequence) -> FormPolynomial:
    """``psibar M psi`` given the contracted matrix ``C M`` (a GMat or sparse map)."""
    if hasattr(cmatrix, "nonzero"):
        cmatrix = {(i, j): cmatrix.entry(i, j) for (i, j) in cmatrix.nonzero()}
    return spinor_contract(cmatrix, spinor, spinor)
