from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from supercartan.scalar import I, ONE, ZERO, Scalar, parse_gaussian

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def scalars(draw):
    """Random polynomial scalars in lam, Lambda and the sign parameter eps."""
    total = ZERO
    for _ in range(draw(st.integers(0, 3))):
        term = Scalar.gaussian(draw(small), draw(small))
        for name in ("lam", "Lambda", "eps"):
            term = term * Scalar.param(name, draw(st.integers(0, 2)))
        total = total + term
    return total


def to_sympy(s: Scalar):
    syms = {n: sympy.Symbol(n) for n in ("lam", "Lambda", "eps")}
    out = 0
    for mono, (a, b) in s.terms.items():
        t = sympy.Rational(a.numerator, a.denominator) + sympy.I * sympy.Rational(b.numerator, b.denominator)
        for name, e in mono:
            t *= syms[name] ** e
        out += t
    return sympy.expand(out).subs(syms["eps"] ** 2, 1)


def reduce_eps(expr):
    eps = sympy.Symbol("eps")
    poly = sympy.Poly(sympy.expand(expr), eps)
    out = 0
    for (k,), c in poly.terms():
        out += c * eps ** (k % 2)
    return sympy.expand(out)


@given(scalars(), scalars())
def test_ring_operations_match_sympy(a, b):
    assert reduce_eps(to_sympy(a + b)) == reduce_eps(to_sympy(a) + to_sympy(b))
    assert reduce_eps(to_sympy(a * b)) == reduce_eps(to_sympy(a) * to_sympy(b))
    assert reduce_eps(to_sympy(a - b)) == reduce_eps(to_sympy(a) - to_sympy(b))


@given(scalars(), scalars(), scalars())
def test_distributive_and_associative(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)


@given(scalars())
def test_additive_inverse(a):
    assert (a - a).is_zero()
    assert a + ZERO == a and a * ONE == a


def test_sign_parameter_squares_to_one():
    eps = Scalar.param("eps")
    assert eps * eps == ONE
    assert eps.inverse() == eps


def test_gaussian_inverse_and_division():
    z = Scalar.gaussian(Fraction(1, 2), 3)
    assert z * z.inverse() == ONE
    assert I * I == Scalar(-1)
    with pytest.raises(ZeroDivisionError):
        Scalar.param("lam").inverse()


def test_subs_and_rendering():
    lam = Scalar.param("lam")
    s = 1 - Scalar.param("eps") * lam**2
    assert str(s) == "1 - eps*lam^2"
    assert s.subs(lam=0) == ONE
    assert s.subs({"eps": -1, "lam": 2}) == Scalar(5)


@pytest.mark.parametrize("text,value", [("3/2", (Fraction(3, 2), 0)), ("-i", (0, -1)), ("1/2i", (0, Fraction(1, 2))), ("1-2i", (1, -2))])
def test_parse_gaussian(text, value):
    assert parse_gaussian(text).constant() == (Fraction(value[0]), Fraction(value[1]))


@given(scalars())
def test_render_parse_roundtrip_for_constants(a):
    if a.is_constant():
        assert parse_gaussian(str(a)) == a
