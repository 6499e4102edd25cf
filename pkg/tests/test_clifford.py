import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from supercartan.clifford import (
    CliffordError,
    FierzSpecError,
    FierzTerm,
    _symmetrize,
    bilinear_table,
    build_gamma,
    fierz_residual,
)
from supercartan.fixtures import fierz_d4_control, fierz_d4_triple, fierz_d11
from supercartan.scalar import Scalar


def cplx(m):
    return m.re.astype(complex) + 1j * m.im


def numpy_symmetric_ranks(rep):
    """Ranks k with C Gamma^{(k)} symmetric, from complex numpy matrices."""
    C = cplx(rep.conjugation)
    g = [cplx(x) for x in rep.gammas]
    out = []
    for k in range(rep.dimension + 1):
        idx = tuple(range(k))
        m = np.eye(rep.spinor_size, dtype=complex)
        for a in idx:
            m = m @ g[a]
        cm = C @ m
        if np.allclose(cm, cm.T):
            out.append(k)
        else:
            assert np.allclose(cm, -cm.T)
    return out


@pytest.mark.parametrize("D,sig", [(2, (1, 1)), (3, (1, 2)), (4, (1, 3)), (5, (1, 4)), (4, (2, 2)), (10, (1, 9)), (11, (1, 10))])
def test_clifford_relation_numpy(D, sig):
    rep = build_gamma(D, sig)
    g = [cplx(x) for x in rep.gammas]
    eta = np.diag(rep.eta)
    for a, b in itertools.product(range(D), repeat=2):
        assert np.allclose(g[a] @ g[b] + g[b] @ g[a], 2 * eta[a, b] * np.eye(rep.spinor_size))
    C = cplx(rep.conjugation)
    Cinv = np.linalg.inv(C)
    for a in range(D):
        assert np.allclose(C @ g[a] @ Cinv, rep.conjugation_sign * g[a].T)
    assert rep.clifford_defects() == []


def test_symmetric_ranks_d4(rep4):
    assert bilinear_table(rep4).symmetric_ranks() == [1, 2]
    assert numpy_symmetric_ranks(rep4) == [1, 2]


def test_symmetric_ranks_d11(rep11):
    assert bilinear_table(rep11).symmetric_ranks() == [1, 2, 5, 6, 9, 10]
    assert numpy_symmetric_ranks(rep11) == [1, 2, 5, 6, 9, 10]


def test_unsupported_dimensions():
    for D in (1, 13):
        with pytest.raises(CliffordError):
            build_gamma(D)
    with pytest.raises(CliffordError):
        build_gamma(4, (1, 2))


def numpy_fierz_d4(symmetrize):
    rep = build_gamma(4, (1, 3))
    C = cplx(rep.conjugation)
    g = [cplx(x) for x in rep.gammas]
    lower = [C @ (rep.eta[a] * g[a]) for a in range(4)]
    upper = [C @ g[a] for a in range(4)]
    t = sum(np.einsum("ij,kl->ijkl", lower[a], upper[a]) for a in range(4))
    if symmetrize:
        t = sum(np.transpose(t, list(p) + [3]) for p in itertools.permutations(range(3)))
    return t


def test_d4_triple_identity_against_numpy():
    assert fierz_d4_triple() == {}
    assert np.allclose(numpy_fierz_d4(True), 0)


def test_d4_control_against_numpy():
    control = fierz_d4_control()
    t = numpy_fierz_d4(False)
    nz = {tuple(int(i) for i in idx) for idx in zip(*np.nonzero(np.abs(t) > 1e-12))}
    assert {k[0] for k in control} == nz
    assert len(control) == 16
    for (idx, _), v in control.items():
        re, im = v.constant()
        assert complex(float(re), float(im)) == pytest.approx(t[idx])


def test_d11_germ_identity():
    assert fierz_d11() == {}


def test_d11_wrong_structure_nonzero(rep11):
    assert fierz_residual(rep11, [FierzTerm(1, (("a",), ("a",)))]) != {}


@given(st.integers(-4, 4).filter(bool), st.integers(-3, 3))
def test_fierz_linearity(k, m):
    rep = build_gamma(4, (1, 3))
    base = fierz_residual(rep, [FierzTerm(1, (("a",), ("a",)))], symmetrize=(0, 1))
    scaled = fierz_residual(rep, [FierzTerm(Scalar.gaussian(k, m), (("a",), ("a",)))], symmetrize=(0, 1))
    assert set(scaled) == set(base)
    for key, v in base.items():
        assert scaled[key] == v * Scalar.gaussian(k, m)


def test_fierz_sum_of_terms_is_linear(rep4):
    t = FierzTerm(1, (("a",), ("a",)))
    one = fierz_residual(rep4, [t], symmetrize=(0, 1, 2, 3))
    three = fierz_residual(rep4, [t, t, FierzTerm(1, (("a",), ("a",)))], symmetrize=(0, 1, 2, 3))
    assert three == {k: v * 3 for k, v in one.items()}


@given(hnp.arrays(np.int64, (3, 3, 3), elements=st.integers(-5, 5)))
def test_symmetrizer_is_a_projector_up_to_scale(t):
    s = _symmetrize(t, (0, 1, 2))
    assert np.array_equal(_symmetrize(s, (0, 1, 2)), math.factorial(3) * s)
    assert np.array_equal(s, np.transpose(s, (1, 0, 2)))


def test_fierz_spec_errors(rep4):
    with pytest.raises(FierzSpecError):
        fierz_residual(rep4, [FierzTerm(1, (("a",), ("b",)))])
    with pytest.raises(FierzSpecError):
        fierz_residual(rep4, [FierzTerm(1, (("a", "a"), ()))])
    with pytest.raises(FierzSpecError):
        fierz_residual(rep4, [FierzTerm(1, (("a",), ("a",)))], free=("a",))
