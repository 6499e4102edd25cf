import pytest
from hypothesis import given
from hypothesis import strategies as st

from supercartan.algebra import AlgebraError, analyze_split, mutate, validate_algebra
from supercartan.cartan import bianchi_check, generic_expansion, soften, split_curvature
from supercartan.catalog import catalog_algebra
from supercartan.fixtures import CATALOG_FIXTURES, MUTATION_FIXTURES, catalog_fixture, mutation_fixture
from supercartan.forms import FormPolynomial, check_nilpotency, sector_decompose, wedge
from supercartan.scalar import Scalar

SMALL = [n for n in CATALOG_FIXTURES if n != "super-poincare(11)"]
LORENTZ = ["M[0 1]", "M[0 2]", "M[0 3]", "M[1 2]", "M[1 3]", "M[2 3]"]


@pytest.mark.parametrize("name", SMALL)
def test_flat_systems_are_nilpotent(name):
    model = soften(catalog_fixture(name), "flat")
    assert check_nilpotency(model.rules).passed


@pytest.mark.parametrize("name", SMALL)
def test_softened_systems_satisfy_bianchi(name):
    assert bianchi_check(soften(catalog_fixture(name))).passed


@pytest.mark.parametrize("name", sorted(MUTATION_FIXTURES))
def test_mutations_break_nilpotency(name):
    alg = mutation_fixture(name)
    assert not validate_algebra(alg)
    assert not check_nilpotency(soften(alg, "flat", validate=False).rules).passed


def test_invalid_algebra_is_refused():
    with pytest.raises(AlgebraError):
        soften(mutation_fixture("perturbed-poincare"))


@pytest.mark.parametrize("base", ["iso(1,3)", "so(1,4)", "osp(1|4)"])
@given(data=st.data())
def test_nilpotency_iff_jacobi(base, data):
    alg = catalog_fixture(base)
    labels = [g.label for g in alg.generators]
    par = alg.parities
    a = data.draw(st.sampled_from(range(len(labels))))
    b = data.draw(st.sampled_from(range(len(labels))))
    c = data.draw(st.sampled_from([i for i in range(len(labels)) if (par[b] + par[i]) % 2 == par[a]]))
    if b == c and not par[b]:
        return
    delta = data.draw(st.sampled_from([1, -1, 2]))
    mut = mutate(alg, labels[a], labels[b], labels[c], delta)
    jacobi_ok = validate_algebra(mut).passed
    nil_ok = check_nilpotency(soften(mut, "flat", validate=False).rules).passed
    assert jacobi_ok == nil_ok


def test_separate_convention_systems_are_nilpotent(sp4):
    assert check_nilpotency(soften(sp4, "flat", convention="separate").rules).passed
    assert bianchi_check(soften(sp4, convention="separate")).passed


def test_unknown_mode_and_convention():
    alg = catalog_algebra("iso", 1, 3)
    with pytest.raises(ValueError):
        soften(alg, "curved")
    with pytest.raises(ValueError):
        soften(alg, convention="mixed")
    with pytest.raises(ValueError):
        bianchi_check(soften(alg, "flat"))


def de_sitter_split(contraction="lam"):
    ds = catalog_algebra("ds", 1, 3)
    return ds, split_curvature(soften(ds), analyze_split(ds, ["M"]), contraction_parameter=contraction)


def test_de_sitter_curvature_split():
    ds, cs = de_sitter_split()
    eps_lam2 = Scalar.param("eps") * Scalar.param("lam") ** 2
    model = cs.model
    for a in range(4):
        for b in range(a + 1, 4):
            label = f"M[{a} {b}]"
            got = cs.proper_curvature[label]
            rsym = [s for s in cs.definitions if s.name == "R_omega" and s.index == (a, b)][0]
            expected = FormPolynomial.gen(rsym) - wedge(model.poly(f"P[{a}]"), model.poly(f"P[{b}]")).scale(eps_lam2)
            assert got == expected
    for a in range(4):
        dsym = [s for s in cs.definitions if s.name == "DV" and s.index == (a,)][0]
        assert cs.torsion[f"P[{a}]"] == FormPolynomial.gen(dsym)


@pytest.mark.parametrize("name,extra,eps", [("so(1,4)", 4, 1), ("so(2,3)", 0, -1)])
def test_matrix_algebra_splits(name, extra, eps):
    alg = catalog_fixture(name)
    sub = [g.label for g in alg.generators if extra not in g.index]
    cs = split_curvature(soften(alg), analyze_split(alg, sub), contraction_parameter="lam")
    lam2 = Scalar.param("lam") ** 2
    m = cs.model
    inner = sorted({i for g in alg.generators for i in g.index} - {extra})
    for i, a in enumerate(inner):
        for b in inner[i + 1:]:
            rsym = [s for s in cs.definitions if s.name == "R_omega" and s.index == (a, b)][0]
            va = m.poly(f"M[{min(a, extra)} {max(a, extra)}]").scale(1 if a > extra else -1)
            vb = m.poly(f"M[{min(b, extra)} {max(b, extra)}]").scale(1 if b > extra else -1)
            expected = FormPolynomial.gen(rsym) - wedge(va, vb).scale(lam2 * eps)
            assert cs.proper_curvature[f"M[{a} {b}]"] == expected


def test_contraction_limit_matches_poincare_term_by_term():
    _, cs = de_sitter_split()
    iso = catalog_algebra("iso", 1, 3)
    ref = split_curvature(soften(iso), analyze_split(iso, ["M"]))
    for comp, ref_comp in ((cs.proper_curvature, ref.proper_curvature), (cs.torsion, ref.torsion)):
        assert set(comp) == set(ref_comp)
        for label, poly in comp.items():
            assert poly.subs(lam=0) == ref_comp[label]
    for sym, poly in cs.definitions.items():
        assert poly.subs(lam=0) == ref.definitions[sym]


def test_recombine_gives_the_unsplit_curvature():
    _, cs = de_sitter_split(contraction=None)
    recombined = cs.recombine()
    for label, poly in cs.unsplit.items():
        assert recombined[label] == poly


def test_non_reductive_split_refused():
    iso = catalog_algebra("iso", 1, 3)
    with pytest.raises(AlgebraError):
        split_curvature(soften(iso), analyze_split(iso, ["P[0]", "M[0 1]"]))


def test_generic_expansion_sectors(sp4):
    model = soften(sp4)
    exp = generic_expansion(model)
    assert set(exp) == set(model.curvatures)
    frame = {"V": ["V"], "psi": ["psi"]}
    for r, poly in exp.items():
        assert poly.degree == 2 and poly.total_parity == r.odd
        assert set(sector_decompose(poly, frame)) == {(2, 0), (1, 1), (0, 2)}
    # 6 VV + 16 V psi + 10 psi psi
    assert len(exp[model.curvatures[0]]) == 6 + 16 + 10
