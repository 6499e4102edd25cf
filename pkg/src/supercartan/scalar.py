"""Exact coefficient ring: Gaussian rationals extended by formal commuting parameters.

A :class:`Scalar` is a finite sum ``sum_k c_k * m_k`` where each ``c_k`` is a
Gaussian rational (a pair of :class:`fractions.Fraction`) and each ``m_k`` is a
monomial in named formal parameters such as ``lam`` (an inverse length) or
``Lambda``.  Parameters registered as *sign parameters* (``eps`` by default)
satisfy ``p**2 == 1`` and are reduced on construction.

Example
-------
>>> lam = Scalar.param("lam")
>>> s = 1 - Scalar.param("eps") * lam**2
>>> str(s)
'1 - eps*lam^2'
>>> str(s.subs(lam=0))
'1'
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

SIGN_PARAMETERS = {"eps"}

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by name
_ONE: Monomial = ()

Number = Union[int, Fraction, complex, "Scalar"]


def register_sign_parameter(name: str) -> None:
    """Declare ``name`` as a sign parameter (``name**2 == 1``)."""
    SIGN_PARAMETERS.add(name)


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    exps = dict(m1)
    for name, e in m2:
        exps[name] = exps.get(name, 0) + e
    out = []
    for name in sorted(exps):
        e = exps[name]
        if name in SIGN_PARAMETERS:
            e %= 2
        if e:
            out.append((name, e))
    return tuple(out)


def _gauss(value) -> tuple[Fraction, Fraction]:
    if isinstance(value, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(value, int):
        return Fraction(value), Fraction(0)
    if isinstance(value, Fraction):
        return value, Fraction(0)
    if isinstance(value, complex):
        re_, im_ = value.real, value.imag
        if not (float(re_).is_integer() and float(im_).is_integer()):
            raise ValueError(f"refusing inexact complex literal {value!r}")
        return Fraction(int(re_)), Fraction(int(im_))
    if isinstance(value, tuple) and len(value) == 2:
        return Fraction(value[0]), Fraction(value[1])
    raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")


class Scalar:
    """Polynomial in formal parameters with Gaussian-rational coefficients.

    Instances are immutable and hashable.  The canonical form never stores a
    zero coefficient, so ``Scalar()`` (empty map) is the zero element.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, value: Number = 0, terms: Mapping | None = None):
        if terms is not None:
            self._terms = {m: c for m, c in terms.items() if c[0] or c[1]}
        elif isinstance(value, Scalar):
            self._terms = value._terms
        else:
            c = _gauss(value)
            self._terms = {_ONE: c} if (c[0] or c[1]) else {}
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def param(cls, name: str, power: int = 1) -> "Scalar":
        if power < 0:
            raise ValueError("parameter exponents must be non-negative")
        mono = _mono_mul(((name, power),), _ONE) if power else _ONE
        return cls(terms={mono: (Fraction(1), Fraction(0))})

    @classmethod
    def gaussian(cls, real, imag=0) -> "Scalar":
        return cls(terms={_ONE: (Fraction(real), Fraction(imag))})

    @classmethod
    def coerce(cls, value: Number) -> "Scalar":
        return value if isinstance(value, Scalar) else cls(value)

    I: "Scalar"

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(m == _ONE for m in self._terms)

    def constant(self) -> tuple[Fraction, Fraction]:
        """The Gaussian-rational value; raises if parameters are present."""
        if not self.is_constant():
            raise ValueError(f"{self} depends on formal parameters")
        return self._terms.get(_ONE, (Fraction(0), Fraction(0)))

    def parameters(self) -> set[str]:
        return {name for m in self._terms for name, _ in m}

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other: Number) -> "Scalar":
        other = Scalar.coerce(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for m, (a, b) in other._terms.items():
            c = out.get(m)
            if c is None:
                out[m] = (a, b)
            else:
                out[m] = (c[0] + a, c[1] + b)
        return Scalar(terms=out)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(terms={m: (-a, -b) for m, (a, b) in self._terms.items()})

    def __sub__(self, other: Number) -> "Scalar":
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other: Number) -> "Scalar":
        return Scalar.coerce(other) - self

    def __mul__(self, other: Number) -> "Scalar":
        other = Scalar.coerce(other)
        if not self._terms or not other._terms:
            return ZERO
        out: dict = {}
        for m1, (a1, b1) in self._terms.items():
            for m2, (a2, b2) in other._terms.items():
                m = _mono_mul(m1, m2)
                re_, im_ = a1 * a2 - b1 * b2, a1 * b2 + b1 * a2
                c = out.get(m)
                out[m] = (re_, im_) if c is None else (c[0] + re_, c[1] + im_)
        return Scalar(terms=out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Scalar":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = ONE
        for _ in range(n):
            result = result * self
        return result

    def inverse(self) -> "Scalar":
        """Multiplicative inverse of a single term whose parameters are all signs."""
        if len(self._terms) != 1:
            raise ZeroDivisionError(f"cannot invert {self}")
        (m, (a, b)), = self._terms.items()
        if any(name not in SIGN_PARAMETERS for name, _ in m):
            raise ZeroDivisionError(f"cannot invert {self}: non-sign parameter")
        norm = a * a + b * b
        return Scalar(terms={m: (a / norm, -b / norm)})

    def __truediv__(self, other: Number) -> "Scalar":
        return self * Scalar.coerce(other).inverse()

    def __rtruediv__(self, other: Number) -> "Scalar":
        return Scalar.coerce(other) * self.inverse()

    def conjugate(self) -> "Scalar":
        return Scalar(terms={m: (a, -b) for m, (a, b) in self._terms.items()})

    def subs(self, values: Mapping[str, Number] | None = None, **kw: Number) -> "Scalar":
        """Substitute parameters by scalars, e.g. ``s.subs(lam=0)``."""
        values = {**(values or {}), **kw}
        if not values:
            return self
        values = {k: Scalar.coerce(v) for k, v in values.items()}
        total = ZERO
        for m, c in self._terms.items():
            term = Scalar(terms={_ONE: c})
            rest = []
            for name, e in m:
                if name in values:
                    term = term * values[name] ** e
                else:
                    rest.append((name, e))
            if rest:
                term = term * Scalar(terms={tuple(rest): (Fraction(1), Fraction(0))})
            total = total + term
        return total

    # -- comparison / hashing ----------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, Scalar):
            return self._terms == other._terms
        try:
            return self._terms == Scalar(other)._terms
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- rendering ----------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for m in sorted(self._terms, key=lambda m: (len(m), m)):
            a, b = self._terms[m]
            coeff = _fmt_gauss(a, b)
            mono = "*".join(name if e == 1 else f"{name}^{e}" for name, e in m)
            if mono:
                if coeff == "1":
                    text = mono
                elif coeff == "-1":
                    text = "-" + mono
                elif a and b:
                    text = f"({coeff})*{mono}"
                else:
                    text = f"{coeff}*{mono}"
            else:
                text = coeff if not (a and b and len(self._terms) > 1) else f"({coeff})"
            pieces.append(text)
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"Scalar({str(self)!r})"


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_gauss(a: Fraction, b: Fraction) -> str:
    if not b:
        return _fmt_frac(a)
    if b == 1:
        im = "i"
    elif b == -1:
        im = "-i"
    else:
        im = _fmt_frac(b) + "i"
    if not a:
        return im
    return f"{_fmt_frac(a)}{'' if im.startswith('-') else '+'}{im}"


_NUM = r"(?:\d+(?:/\d+)?)"
_GAUSS_RE = re.compile(
    rf"^\s*(?:(?P<re>[+-]?{_NUM})(?:(?P<isign>[+-])(?P<im>{_NUM})?i)?|(?P<pure>[+-]?{_NUM}?)i)\s*$"
)


def parse_gaussian(text: str) -> Scalar:
    """Parse ``'3/2'``, ``'-i'``, ``'1/2i'`` or ``'1-2i'`` into a constant Scalar."""
    m = _GAUSS_RE.match(text)
    if not m:
        raise ValueError(f"not a Gaussian rational: {text!r}")
    if m.group("pure") is not None:
        p = m.group("pure")
        if p in ("", "+"):
            im = Fraction(1)
        elif p == "-":
            im = Fraction(-1)
        else:
            im = Fraction(p)
        return Scalar.gaussian(0, im)
    real = Fraction(m.group("re"))
    im = Fraction(0)
    if m.group("isign"):
        im = Fraction(m.group("im") or 1)
        if m.group("isign") == "-":
            im = -im
    return Scalar.gaussian(real, im)


def scalar_from_terms(items: Iterable[tuple[Mapping[str, int], tuple]]) -> Scalar:
    total = ZERO
    for mono, c in items:
        term = Scalar(c)
        for name, e in mono.items():
            term = term * Scalar.param(name, e)
        total = total + term
    return total


ZERO = Scalar()
ONE = Scalar(1)
I = Scalar.gaussian(0, 1)
Scalar.I = I
HALF = Scalar(Fraction(1, 2))
