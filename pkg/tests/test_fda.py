import collections
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from supercartan.cartan import soften
from supercartan.catalog import catalog_algebra
from supercartan.clifford import FierzTerm, fierz_residual
from supercartan.fda import (
    Cochain,
    FDAError,
    ce_differential,
    check_fda_closure,
    d4_fda,
    d11_cocycle,
    d11_fda,
    d11_mutated_fda,
    extend_fda,
    horizontal_model,
    psibar_gamma_psi,
    relative_cocycles,
    vielbein_contraction,
)
from supercartan.fixtures import fierz_d11
from supercartan.forms import FormPolynomial, wedge
from supercartan.scalar import Scalar


@pytest.fixture(scope="module")
def d4():
    return d4_fda()


@pytest.fixture(scope="module")
def d11(rep11):
    return d11_fda(rep11)


@pytest.fixture(scope="module")
def d11_base(sp11):
    return horizontal_model(sp11, ["M"])


@st.composite
def d4_cochains(draw, model):
    forms = [g for g in model.connection if g.name in ("V", "psi")]
    words = draw(st.lists(st.lists(st.sampled_from(forms), min_size=1, max_size=3), min_size=1, max_size=4))
    coeffs = draw(st.lists(st.integers(-3, 3), min_size=len(words), max_size=len(words)))
    return FormPolynomial.sum(FormPolynomial.monomial(w, c) for w, c in zip(words, coeffs))


def test_ce_differential_squares_to_zero(d4):
    model = d4.base

    @given(d4_cochains(model))
    def check(c):
        assert ce_differential(ce_differential(c, d4), d4).is_zero()

    check()


def test_horizontal_model_drops_lorentz(sp4):
    model = horizontal_model(sp4, ["M"])
    names = {g.name for g in model.rules.generators()}
    assert names == {"V", "psi"}
    for g in model.rules.generators():
        if g.name == "psi":
            assert model.rules[g].is_zero()


def test_d4_relative_cocycle_space(sp4, rep4):
    model = horizontal_model(sp4, ["M"])
    ansatz = [vielbein_contraction(model, rep4, 1)]
    space = relative_cocycles(sp4, ["M"], 3, ansatz)
    assert len(space) == 1 and space.closed_dimension == 1 and not space.flagged_empty
    V = [model.form(f"P[{a}]") for a in range(4)]
    lower = [wedge(V[a], V[b]) for a in range(4) for b in range(a + 1, 4)]
    # the vielbein bilinear is d of V V on the nose in neither direction
    space = relative_cocycles(sp4, ["M"], 3, ansatz, lower_ansatz=lower)
    assert len(space) == 1
    assert relative_cocycles(sp4, ["M"], 5, ansatz).flagged_empty


def test_exact_cocycles_are_removed(sp4):
    model = soften(sp4, "flat")
    volume = wedge(*(model.form(f"P[{a}]") for a in range(4)))
    d_volume = ce_differential(volume, model)
    assert not d_volume.is_zero()
    space = relative_cocycles(sp4, ["M"], 5, [d_volume], lower_ansatz=[volume])
    assert space.closed_dimension == 1 and space.exact_dimension == 1 and len(space) == 0


def test_non_relative_ansatz_rejected(sp4):
    model = horizontal_model(sp4, ["M"])
    with pytest.raises(FDAError):
        relative_cocycles(sp4, ["M"], 2, [wedge(model.form("M[0 1]"), model.form("P[0]"))])


def test_non_closed_single_form_is_not_a_cocycle(sp4, rep4):
    model = horizontal_model(sp4, ["M"])
    space = relative_cocycles(sp4, ["M"], 3, [wedge(psibar_gamma_psi(model, rep4, 0), model.form("P[1]"))])
    assert space.closed_dimension == 0 and len(space) == 0


def test_cochain_validation():
    model = horizontal_model(catalog_algebra("super-poincare", 4), ["M"])
    V = model.form("P[0]")
    with pytest.raises(FDAError):
        Cochain(FormPolynomial.gen(V) + wedge(V, model.form("P[1]")))
    with pytest.raises(FDAError):
        Cochain(FormPolynomial.gen(V, Scalar.param("lam")))


def test_d4_fda_closes(d4, rep4):
    assert check_fda_closure(d4, rep4).passed
    assert len(d4) == 1 and d4.potential("B").degree == 2
    assert not d4.steps[0].trivial


def test_extend_refuses_non_closed(d4, rep4):
    bad = wedge(psibar_gamma_psi(d4.base, rep4, 0), d4.base.form("P[1]"))
    with pytest.raises(FDAError) as err:
        extend_fda(d4, bad, "C")
    assert err.value.residual is not None and not err.value.residual.is_zero()
    with pytest.raises(FDAError):
        extend_fda(d4, -vielbein_contraction(d4.base, rep4, 1), "B")


def test_trivial_extension_flagged(d4):
    VV = wedge(d4.base.form("P[0]"), d4.base.form("P[1]"))
    ext = extend_fda(d4, ce_differential(VV, d4), "C", exact_ansatz=[VV])
    assert ext.steps[-1].trivial


def test_representation_mismatch(d4, rep11):
    with pytest.raises(FDAError):
        check_fda_closure(d4, rep11)


def test_d11_germ_closes(d11, rep11):
    report = check_fda_closure(d11, rep11)
    assert report.passed
    assert d11.potential("A").degree == 3


def test_d11_wrong_structure_fails(rep11):
    report = check_fda_closure(d11_mutated_fda(rep11), rep11)
    assert not report.passed
    assert set(report.residuals) == {"A"}


def test_d11_closure_agrees_with_fierz(d11_base, rep11):
    """Both routes see the same condition: zero for the germ, nonzero otherwise."""
    assert ce_differential(d11_cocycle(d11_base, rep11), d11_base).is_zero()
    assert fierz_d11() == {}
    assert not fierz_residual(rep11, [FierzTerm(1, (("a",), ("a",)))]) == {}


def test_d11_residual_matches_fierz_tensor_entrywise(d11_base, rep11):
    """``d(psibar Gamma_a psi V^a)`` is the symmetrized ``(C Gamma_a)(C Gamma^a)`` tensor."""
    r = ce_differential(vielbein_contraction(d11_base, rep11, 1), d11_base)
    fz = fierz_residual(rep11, [FierzTerm(1, (("a",), ("a",)))])
    assert len(r) == len(fz) > 0
    ratios = set()
    for mono, v in r.items():
        idx = tuple(int(x.index[0]) for x in mono)
        mult = math.prod(math.factorial(n) for n in collections.Counter(idx).values())
        ratios.add(v * mult / fz[(idx, ())])
    assert len(ratios) == 1


@pytest.mark.slow
def test_d11_six_form_closes(rep11):
    fda = d11_fda(rep11, six_form=True)
    assert check_fda_closure(fda, rep11).passed


@pytest.mark.slow
def test_six_form_coefficients_are_pinned(d11, rep11):
    from supercartan.fda import d11_six_form_cocycle

    with pytest.raises(FDAError):
        extend_fda(d11, -d11_six_form_cocycle(d11, rep11, a_coefficient=Scalar(1)), "B")
