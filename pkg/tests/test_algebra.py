import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from supercartan.algebra import (
    AlgebraError,
    Generator,
    StructureConstants,
    SuperAlgebra,
    analyze_split,
    jacobi_residuals,
    mutate,
    relabel,
    rescale,
    validate_algebra,
)
from supercartan.catalog import catalog_algebra
from supercartan.fixtures import CATALOG_FIXTURES, MUTATION_FIXTURES, catalog_fixture, mutation_fixture
from supercartan.scalar import Scalar


def numeric_so(r, s):
    """Vector-representation matrices of M[a b], built directly with numpy."""
    D = r + s
    eta = np.diag([-1.0] * r + [1.0] * s)
    mats = {}
    for a, b in itertools.combinations(range(D), 2):
        m = np.zeros((D, D))
        m[a, :] += eta[b, :]
        m[b, :] -= eta[a, :]
        mats[(a, b)] = m
    return mats


@pytest.mark.parametrize("r,s", [(1, 3), (1, 4), (2, 3), (0, 3)])
def test_so_brackets_match_matrix_commutators(r, s):
    alg = catalog_algebra("so", r, s)
    mats = numeric_so(r, s)
    keys = list(mats)
    basis = np.stack([mats[k].ravel() for k in keys], axis=1)
    for x, y in itertools.combinations(keys, 2):
        comm = mats[x] @ mats[y] - mats[y] @ mats[x]
        coeffs, *_ = np.linalg.lstsq(basis, comm.ravel(), rcond=None)
        got = alg.bracket(f"M[{x[0]} {x[1]}]", f"M[{y[0]} {y[1]}]")
        expected = {keys[i]: round(c) for i, c in enumerate(coeffs) if abs(c) > 1e-9}
        labels = {alg.generators[i].index: v for i, v in got.items()}
        assert {k: Scalar(v) for k, v in expected.items()} == labels


@pytest.mark.parametrize("name", [n for n in CATALOG_FIXTURES if n != "super-poincare(11)"])
def test_catalog_validates(name):
    report = validate_algebra(catalog_fixture(name))
    assert report.passed, report.summary()


@pytest.mark.parametrize("name", list(MUTATION_FIXTURES))
def test_mutations_break_jacobi(name):
    report = validate_algebra(mutation_fixture(name))
    assert not report.passed and report.jacobi and not report.antisymmetry


def test_antisymmetry_defect_detected():
    gens = [Generator("X"), Generator("Y"), Generator("Z")]
    full = {(2, 0, 1): Scalar(1), (2, 1, 0): Scalar(1)}  # [X,Y] = Z and [Y,X] = Z
    alg = SuperAlgebra(gens, StructureConstants.from_full(full, [0, 0, 0]))
    report = validate_algebra(alg)
    assert report.antisymmetry and not report.passed


def test_parity_violation_detected():
    gens = [Generator("X"), Generator("Q", (), 1)]
    alg = SuperAlgebra(gens, {(1, 0, 0): Scalar(1)})
    assert validate_algebra(alg).parity


def test_duplicate_generator_rejected():
    with pytest.raises(AlgebraError):
        SuperAlgebra([Generator("X"), Generator("X")], {})


def test_jacobi_residual_of_bad_bracket_is_nonzero():
    # [X,Y] = Y, [X,Z] = Y, [Y,Z] = X is not a Lie algebra
    gens = [Generator("X"), Generator("Y"), Generator("Z")]
    alg = SuperAlgebra(gens, {(1, 0, 1): Scalar(1), (1, 0, 2): Scalar(1), (0, 1, 2): Scalar(1)})
    assert jacobi_residuals(alg)


def test_reductive_splits():
    assert analyze_split(catalog_algebra("iso", 1, 3), ["M"]).is_reductive
    assert analyze_split(catalog_algebra("so", 1, 4), ["M[0 1]", "M[0 2]", "M[0 3]", "M[1 2]", "M[1 3]", "M[2 3]"]).is_reductive
    sp = analyze_split(catalog_algebra("super-poincare", 4), ["M"])
    assert sp.is_reductive and set(sp.complement) >= {"P[0]", "Q[0]"}


def test_non_closed_subset():
    rep = analyze_split(catalog_algebra("iso", 1, 3), ["P[0]", "M[0 1]"])
    assert not rep.is_subalgebra_closed and not rep.is_reductive


def test_conformal_grading():
    alg = catalog_algebra("conformal", 1, 3)
    rep = analyze_split(alg, ["M", "Dil", "K"], grading_hint=alg.metadata["grading"])
    assert rep.grading_verified
    assert rep.is_subalgebra_closed
    bad = dict(alg.metadata["grading"], K=-1)
    assert analyze_split(alg, ["M", "Dil", "K"], grading_hint=bad).grading_verified is False


def test_contraction_limit_is_poincare():
    ds = catalog_algebra("ds", 1, 3)
    contracted = rescale(ds, ["P"], "lam").subs(lam=0)
    poincare = catalog_algebra("iso", 1, 3)
    assert [g.key for g in contracted.generators] == [g.key for g in poincare.generators]
    assert contracted.full_table() == poincare.full_table()


def test_de_sitter_sign_specializations():
    ds = catalog_algebra("ds", 1, 3)
    assert validate_algebra(ds.subs(eps=1)).passed
    assert validate_algebra(ds.subs(eps=-1)).passed
    assert ds.subs(eps=1).full_table() != ds.subs(eps=-1).full_table()


def test_relabel_preserves_validity():
    alg = relabel(catalog_algebra("iso", 1, 3), {"P[0]": ("T", (0,), -1)})
    assert validate_algebra(alg).passed
    assert alg.bracket("M[0 1]", "P[1]") == {alg.position("T[0]"): Scalar(-1)}


@given(st.integers(0, 3), st.integers(1, 8))
def test_poincare_and_lorentz_splits_are_reductive(r, s):
    if r + s > 11 or r + s < 2:
        return
    assert analyze_split(catalog_algebra("iso", r, s), ["M"]).is_reductive
    so = catalog_algebra("so", r, s)
    assert analyze_split(so, [g.label for g in so.generators]).is_reductive


def test_mutate_restores_with_opposite_delta():
    base = catalog_fixture("iso(1,3)")
    back = mutate(mutate(base, "P[0]", "M[0 1]", "P[1]", 1), "P[0]", "M[0 1]", "P[1]", -1)
    assert back.full_table() == base.full_table()
