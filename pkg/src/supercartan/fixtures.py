"""Named fixtures shared by the command-line suites and the tests."""

from __future__ import annotations

from .algebra import SuperAlgebra, mutate
from .catalog import catalog_algebra
from .clifford import FierzTerm, build_gamma, fierz_residual

__all__ = [
    "CATALOG_FIXTURES",
    "MUTATION_FIXTURES",
    "catalog_fixture",
    "mutation_fixture",
    "fierz_d4_triple",
    "fierz_d4_control",
    "fierz_d11",
]

# name -> catalog call
CATALOG_FIXTURES = {
    "iso(1,3)": ("iso", 1, 3),
    "so(1,4)": ("so", 1, 4),
    "so(2,3)": ("so", 2, 3),
    "so(2,4)": ("so", 2, 4),
    "conformal(1,3)": ("conformal", 1, 3),
    "ds(1,3)": ("ds", 1, 3),
    "osp(1|4)": ("osp(1|4)",),
    "super-poincare(4)": ("super-poincare", 4),
    "super-poincare(11)": ("super-poincare", 11),
}

# name -> (base fixture, a, b, c): add 1 to the stored C^a_{bc}
MUTATION_FIXTURES = {
    "perturbed-poincare": ("iso(1,3)", "P[0]", "M[0 1]", "P[1]"),
    "perturbed-so(1,4)": ("so(1,4)", "M[0 1]", "M[0 2]", "M[1 2]"),
    "perturbed-osp(1|4)": ("osp(1|4)", "S[0 0]", "Q[0]", "Q[0]"),
    "perturbed-super-poincare": ("super-poincare(4)", "P[0]", "Q[0]", "Q[1]"),
}


def catalog_fixture(name: str) -> SuperAlgebra:
    spec = CATALOG_FIXTURES[name]
    return catalog_algebra(spec[0], *spec[1:])


def mutation_fixture(name: str) -> SuperAlgebra:
    base, a, b, c = MUTATION_FIXTURES[name]
    return mutate(catalog_fixture(base), a, b, c, 1)


def fierz_d4_triple() -> dict:
    """``(C gamma_a)_{(ab} (C gamma^a)_{c) d}``: the three-gravitino identity in D=4."""
    rep = build_gamma(4, (1, 3))
    return fierz_residual(rep, [FierzTerm(1, (("a",), ("a",)))], symmetrize=(0, 1, 2))


def fierz_d4_control() -> dict:
    """The same product without symmetrization (nonzero)."""
    rep = build_gamma(4, (1, 3))
    return fierz_residual(rep, [FierzTerm(1, (("a",), ("a",)))], symmetrize=())


def fierz_d11() -> dict:
    """``(C Gamma_{ab})_{(ab} (C Gamma^a)_{cd)}`` with ``b`` free, D=11."""
    rep = build_gamma(11)
    return fierz_residual(rep, [FierzTerm(1, (("a", "b"), ("a",)))], free=("b",))
