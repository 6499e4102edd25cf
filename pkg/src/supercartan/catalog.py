"""Catalog of the (super)algebras used throughout the package.

Conventions (fixed here, once):

* Vector indices run ``0 .. D-1`` with ``eta = diag(-1 x r, +1 x s)``.
* ``M[a b]`` (``a < b``) acts on vectors as
  ``(M_ab)^c_d = delta^c_a eta_bd - delta^c_b eta_ad``; every bosonic bracket
  is the matrix commutator of these generators (extended by translations
  ``P[a]`` for ``iso``).
* ``[M_ab, Q_alpha] = Q_beta (S_ab)^beta_alpha`` with
  ``S_ab = 1/4 (gamma_a gamma_b - gamma_b gamma_a)`` built from
  :mod:`supercartan.clifford`.
* ``{Q_alpha, Q_beta} = i (C gamma^a)_{alpha beta} P_a`` so that the
  Maurer-Cartan equation of the translation form reads
  ``dV^a = -omega^a_b V^b + (i/2) psibar gamma^a psi``.
* The de Sitter family ``ds`` is ``so(r, s+1)`` written with an extra
  direction of norm ``eps`` (a sign parameter): ``P[a] = M[a D]``.
  ``eps = +1`` gives ``so(1,4)``, ``eps = -1`` gives ``so(2,3)`` for ``(1,3)``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .algebra import AlgebraError, Generator, StructureConstants, SuperAlgebra
from .clifford import GammaRep, build_gamma
from .scalar import ONE, ZERO, Scalar

__all__ = [
    "CatalogError",
    "catalog_algebra",
    "algebra_from_matrices",
    "CATALOG_NAMES",
    "CATALOG_ARITY",
]


class CatalogError(AlgebraError):
    pass


Matrix = dict  # {(i, j): Scalar}, sparse


def _mat_mul(x: Matrix, y: Matrix) -> Matrix:
    rows: dict = {}
    for (k, j), v in y.items():
        rows.setdefault(k, []).append((j, v))
    out: dict = {}
    for (i, k), u in x.items():
        for j, v in rows.get(k, ()):
            out[(i, j)] = out.get((i, j), ZERO) + u * v
    return {k: v for k, v in out.items() if v}


def _mat_comb(terms) -> Matrix:
    out: dict = {}
    for coeff, m in terms:
        for k, v in m.items():
            out[k] = out.get(k, ZERO) + coeff * v
    return {k: v for k, v in out.items() if v}


def algebra_from_matrices(
    generators: Sequence[Generator],
    matrices: Sequence[Matrix],
    name: str = "",
    **meta,
) -> SuperAlgebra:
    """Structure constants of a matrix (super)algebra.

    Brackets are graded commutators ``XY - (-1)^(|X||Y|) YX``.  Each basis
    matrix needs a pivot entry where it alone is nonzero; commutators are
    decomposed through the pivots and the decomposition is verified exactly.
    """
    n = len(generators)
    pivots = []
    for i, m in enumerate(matrices):
        for pos, v in sorted(m.items()):
            if all(pos not in matrices[j] for j in range(n) if j != i):
                pivots.append((pos, v))
                break
        else:
            raise CatalogError(f"no pivot entry for basis element {generators[i].label}")
    full = {}
    par = [g.parity for g in generators]
    for b in range(n):
        for c in range(b, n):
            sign = ONE if par[b] * par[c] else -ONE
            prod = _mat_comb([(ONE, _mat_mul(matrices[b], matrices[c])), (sign, _mat_mul(matrices[c], matrices[b]))])
            if not prod:
                continue
            coeffs = {}
            for a, (pos, pv) in enumerate(pivots):
                if pos in prod:
                    coeffs[a] = prod[pos] / pv
            check = _mat_comb([(v, matrices[a]) for a, v in coeffs.items()])
            if check != prod:
                raise CatalogError(
                    f"bracket [{generators[b].label}, {generators[c].label}] leaves the span of the basis"
                )
            for a, v in coeffs.items():
                full[(a, b, c)] = v
    return SuperAlgebra(generators, StructureConstants.from_full(full, par), name, **meta)


def _so_matrix(metric: Sequence, a: int, b: int) -> Matrix:
    """``(M_ab)^c_d = delta^c_a g_bd - delta^c_b g_ad`` for a diagonal/sparse metric."""
    out = {}
    for (i, j), g in metric.items():
        if i == b:
            out[(a, j)] = out.get((a, j), ZERO) + g
        if i == a:
            out[(b, j)] = out.get((b, j), ZERO) - g
    return {k: v for k, v in out.items() if v}


def _eta(r: int, s: int) -> list[int]:
    return [-1] * r + [1] * s


def _check_signature(r: int, s: int, low: int = 1, high: int = 12) -> None:
    if r < 0 or s < 0 or not low <= r + s <= high:
        raise CatalogError(f"unsupported signature ({r}, {s})")


def so(r: int, s: int) -> SuperAlgebra:
    _check_signature(r, s, 2)
    D = r + s
    metric = {(i, i): Scalar(e) for i, e in enumerate(_eta(r, s))}
    gens, mats = [], []
    for a, b in itertools.combinations(range(D), 2):
        gens.append(Generator("M", (a, b)))
        mats.append(_so_matrix(metric, a, b))
    return algebra_from_matrices(gens, mats, name=f"so({r},{s})", dimension=D, signature=(r, s))


def iso(r: int, s: int) -> SuperAlgebra:
    _check_signature(r, s)
    D = r + s
    metric = {(i, i): Scalar(e) for i, e in enumerate(_eta(r, s))}
    gens, mats = [], []
    for a, b in itertools.combinations(range(D), 2):
        gens.append(Generator("M", (a, b)))
        mats.append(_so_matrix(metric, a, b))
    for a in range(D):
        gens.append(Generator("P", (a,)))
        mats.append({(a, D): ONE})
    return algebra_from_matrices(gens, mats, name=f"iso({r},{s})", dimension=D, signature=(r, s))


def de_sitter(r: int = 1, s: int = 3, eps: Scalar | int | None = None) -> SuperAlgebra:
    """``so`` of ``eta + (eps)``: Lorentz ``M[a b]`` plus ``P[a] = M[a D]``."""
    _check_signature(r, s)
    D = r + s
    eps = Scalar.param("eps") if eps is None else Scalar.coerce(eps)
    metric = {(i, i): Scalar(e) for i, e in enumerate(_eta(r, s))}
    metric[(D, D)] = eps
    gens, mats = [], []
    for a, b in itertools.combinations(range(D), 2):
        gens.append(Generator("M", (a, b)))
        mats.append(_so_matrix(metric, a, b))
    for a in range(D):
        gens.append(Generator("P", (a,)))
        mats.append(_so_matrix(metric, a, D))
    return algebra_from_matrices(
        gens, mats, name=f"ds({r},{s})", dimension=D, signature=(r, s), metadata={"eps": str(eps)}
    )


def conformal(r: int, s: int) -> SuperAlgebra:
    """``so(r+1, s+1)`` in light-cone basis, |1|-graded as ``P + (M, Dil) + K``.

    Extra directions ``+``/``-`` (positions ``D``, ``D+1``) have metric
    ``g_{+-} = 1``; ``P[a] = M_{a+}``, ``K[a] = M_{a-}``, ``Dil = M_{+-}``.
    Metadata ``grading`` records degrees -1, 0, +1.
    """
    _check_signature(r, s)
    D = r + s
    metric = {(i, i): Scalar(e) for i, e in enumerate(_eta(r, s))}
    metric[(D, D + 1)] = ONE
    metric[(D + 1, D)] = ONE
    gens, mats = [], []
    for a, b in itertools.combinations(range(D), 2):
        gens.append(Generator("M", (a, b)))
        mats.append(_so_matrix(metric, a, b))
    gens.append(Generator("Dil"))
    mats.append(_so_matrix(metric, D, D + 1))
    for a in range(D):
        gens.append(Generator("P", (a,)))
        mats.append(_so_matrix(metric, a, D))
    for a in range(D):
        gens.append(Generator("K", (a,)))
        mats.append(_so_matrix(metric, a, D + 1))
    grading = {"M": 0, "Dil": 0, "P": -1, "K": 1}
    return algebra_from_matrices(
        gens,
        mats,
        name=f"so({r + 1},{s + 1})",
        dimension=D,
        signature=(r, s),
        metadata={"grading": grading},
    )


def osp14() -> SuperAlgebra:
    """``osp(1|4)`` as 5x5 supermatrices (rows 0-3 even, row 4 odd).

    With the symplectic form ``J = [[0, 1], [-1, 0]]`` the even part is
    ``S[a b] = J^-1 (e_a e_b^T + e_b e_a^T)`` (``a <= b``, sp(4)) and the odd
    part ``Q[a]`` has column ``J^-1 e_a`` and row ``e_a^T``.
    """
    jinv = {(0, 2): -ONE, (1, 3): -ONE, (2, 0): ONE, (3, 1): ONE}
    gens, mats = [], []
    for a, b in itertools.combinations_with_replacement(range(4), 2):
        sym = {(a, b): ONE}
        sym[(b, a)] = sym.get((b, a), ZERO) + ONE
        gens.append(Generator("S", (a, b)))
        mats.append(_mat_mul(jinv, sym))
    for a in range(4):
        m = {(i, 4): v for (i, k), v in jinv.items() if k == a}
        m[(4, a)] = ONE
        gens.append(Generator("Q", (a,), 1))
        mats.append(m)
    return algebra_from_matrices(gens, mats, name="osp(1|4)", dimension=4, signature=(1, 3))


def _spin_generators(rep: GammaRep) -> dict:
    """``S_ab = 1/4 [gamma_a, gamma_b]`` as sparse Scalar matrices, keyed (a, b)."""
    out = {}
    quarter = Scalar(Fraction(1, 4))
    for a, b in itertools.combinations(range(rep.dimension), 2):
        g = rep.gamma(a, b, lower=True)
        h = rep.gamma(b, a, lower=True)
        m = g - h
        out[(a, b)] = {(i, j): m.entry(i, j) * quarter for (i, j) in m.nonzero()}
    return out


def super_poincare(D: int, N: int = 1, signature: tuple | None = None) -> SuperAlgebra:
    if N != 1:
        raise CatalogError("only N=1 super-Poincare algebras are available")
    if signature is None:
        signature = (1, D - 1)
    r, s = signature
    _check_signature(r, s, 2)
    base = iso(r, s)
    rep = build_gamma(D, signature)
    n = rep.spinor_size
    gens = list(base.generators) + [Generator("Q", (al,), 1) for al in range(n)]
    pos = {g.key: i for i, g in enumerate(gens)}
    full = dict(base.full_table())
    spin = _spin_generators(rep)
    for (a, b), m in spin.items():
        mi = pos[("M", (a, b))]
        for (beta, alpha), v in m.items():
            full[(pos[("Q", (beta,))], mi, pos[("Q", (alpha,))])] = v
    plus_i = Scalar.gaussian(0, 1)
    for a in range(D):
        cg = rep.cgamma(a, lower=False)
        pa = pos[("P", (a,))]
        for (al, be) in cg.nonzero():
            full[(pa, pos[("Q", (al,))], pos[("Q", (be,))])] = plus_i * cg.entry(al, be)
    par = [g.parity for g in gens]
    return SuperAlgebra(
        gens,
        StructureConstants.from_full(full, par),
        f"super-poincare({D},{N})",
        D,
        signature,
        {"spinor_size": n},
    )


def abelian(n: int, odd: int = 0) -> SuperAlgebra:
    gens = [Generator("T", (i,)) for i in range(n)] + [Generator("S", (i,), 1) for i in range(odd)]
    return SuperAlgebra(gens, {}, f"abelian({n}|{odd})", None, None)


CATALOG_NAMES = ("so", "iso", "ds", "conformal", "osp(1|4)", "super-poincare", "abelian")
CATALOG_ARITY = {
    "so": (2,),
    "iso": (2,),
    "ds": (0, 2),
    "conformal": (2,),
    "osp(1|4)": (0,),
    "super-poincare": (1, 2),
    "abelian": (1, 2),
}


@lru_cache(maxsize=None)
def _cached(name: str, args: tuple) -> SuperAlgebra:
    if name == "so":
        return so(*args)
    if name == "iso":
        return iso(*args)
    if name == "ds":
        return de_sitter(*args)
    if name == "conformal":
        return conformal(*args)
    if name == "osp(1|4)":
        if args:
            raise CatalogError("osp(1|4) takes no parameters")
        return osp14()
    if name == "super-poincare":
        return super_poincare(*args)
    if name == "abelian":
        return abelian(*args)
    raise CatalogError(f"unknown catalog algebra {name!r}; known: {', '.join(CATALOG_NAMES)}")


def catalog_algebra(name: str, *params) -> SuperAlgebra:
    """Look up a catalog algebra, e.g. ``catalog_algebra("so", 1, 4)``.

    Names: ``so(r,s)``, ``iso(r,s)``, ``ds(r,s)`` (de Sitter family with sign
    parameter ``eps``), ``conformal(r,s)`` (graded ``so(r+1,s+1)``),
    ``osp(1|4)``, ``super-poincare(D[,N])``, ``abelian(n[,odd])``.
    """
    try:
        params = tuple(int(p) for p in params)
    except (TypeError, ValueError):
        raise CatalogError(f"non-integer parameters {params!r}") from None
    arity = CATALOG_ARITY.get(name)
    if arity is not None and len(params) not in arity:
        raise CatalogError(f"{name} takes {' or '.join(map(str, arity))} parameters, got {len(params)}")
    try:
        return _cached(name, params)
    except TypeError as exc:
        raise CatalogError(str(exc)) from None
