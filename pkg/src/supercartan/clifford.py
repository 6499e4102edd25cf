"""Gamma matrices, charge conjugation, bilinear symmetry tables and Fierz residuals.

Every matrix built here is a *monomial* matrix (one nonzero per row and
column) with entries in ``{0, +-1, +-i}``, stored as a pair of ``int64``
arrays so all products and contractions are exact integer arithmetic.

Conventions: the metric is ``eta = diag(-1 x r, +1 x s)`` for signature
``(r, s)``; ``gamma^a`` carries an upper index and ``{gamma^a, gamma^b} =
2 eta^{ab}``.  Lower-index matrices are ``gamma_a = eta_aa gamma^a``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np

from .scalar import Scalar

__all__ = [
    "CliffordError",
    "FierzSpecError",
    "GMat",
    "GammaRep",
    "BilinearTable",
    "FierzTerm",
    "build_gamma",
    "bilinear_table",
    "fierz_residual",
]


class CliffordError(ValueError):
    pass


class FierzSpecError(ValueError):
    pass


class GMat:
    """Square matrix of Gaussian integers (``re + i*im``)."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        self.re = np.asarray(re, dtype=np.int64)
        self.im = np.zeros_like(self.re) if im is None else np.asarray(im, dtype=np.int64)

    @classmethod
    def identity(cls, n: int) -> "GMat":
        return cls(np.eye(n, dtype=np.int64))

    @property
    def n(self) -> int:
        return self.re.shape[0]

    def __matmul__(self, other: "GMat") -> "GMat":
        return GMat(self.re @ other.re - self.im @ other.im, self.re @ other.im + self.im @ other.re)

    def __add__(self, other: "GMat") -> "GMat":
        return GMat(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GMat") -> "GMat":
        return GMat(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GMat":
        return GMat(-self.re, -self.im)

    def scale(self, k: int) -> "GMat":
        return GMat(self.re * k, self.im * k)

    def times_i(self) -> "GMat":
        return GMat(-self.im, self.re.copy())

    @property
    def T(self) -> "GMat":
        return GMat(self.re.T.copy(), self.im.T.copy())

    def kron(self, other: "GMat") -> "GMat":
        return GMat(
            np.kron(self.re, other.re) - np.kron(self.im, other.im),
            np.kron(self.re, other.im) + np.kron(self.im, other.re),
        )

    def is_zero(self) -> bool:
        return not (self.re.any() or self.im.any())

    def __eq__(self, other) -> bool:
        return isinstance(other, GMat) and np.array_equal(self.re, other.re) and np.array_equal(self.im, other.im)

    def entry(self, i: int, j: int) -> Scalar:
        return Scalar.gaussian(int(self.re[i, j]), int(self.im[i, j]))

    def nonzero(self) -> list[tuple[int, int]]:
        return list(zip(*np.nonzero(self.re | self.im)))

    def is_monomial(self) -> bool:
        mask = (self.re != 0) | (self.im != 0)
        return bool((mask.sum(axis=0) == 1).all() and (mask.sum(axis=1) == 1).all())

    def __repr__(self) -> str:
        return f"GMat(n={self.n})"


_SIGMA = {
    0: GMat([[1, 0], [0, 1]]),
    1: GMat([[0, 1], [1, 0]]),
    2: GMat([[0, 0], [0, 0]], [[0, -1], [1, 0]]),
    3: GMat([[1, 0], [0, -1]]),
}


def _euclidean_gammas(D: int) -> list[GMat]:
    k = D // 2
    out = []
    for j in range(k):
        for s in (1, 2):
            factors = [_SIGMA[3]] * j + [_SIGMA[s]] + [_SIGMA[0]] * (k - j - 1)
            out.append(reduce(GMat.kron, factors))
    if D % 2:
        out.append(reduce(GMat.kron, [_SIGMA[3]] * k))
    return out


def _solve_conjugation(gammas: Sequence[GMat], sign: int) -> GMat | None:
    """Monomial solution of ``C g = sign g^T C`` for all gammas, or None.

    Each gamma is monomial, so every scalar equation links exactly two
    unknowns ``C_{i,p(j)} = sign * g_i / g_j * C_{p(i),j}`` with a unit
    ratio.  The linear system is solved exactly by union-find with ratios
    tracked as powers of i.
    """
    n = gammas[0].n
    parent = list(range(n * n))
    phase = [0] * (n * n)  # value(x) = i**phase[x] * value(root)
    bad = set()

    def find(x):
        if parent[x] == x:
            return x, 0
        root, ph = find(parent[x])
        parent[x] = root
        phase[x] = (phase[x] + ph) % 4
        return root, phase[x]

    def unit_power(re, im) -> int:
        return {(1, 0): 0, (0, 1): 1, (-1, 0): 2, (0, -1): 3}[(int(re), int(im))]

    s_pow = 0 if sign == 1 else 2
    for g in gammas:
        perm = {}
        val = {}
        for (r, c) in g.nonzero():
            perm[c] = r
            val[c] = unit_power(g.re[r, c], g.im[r, c])
        for i in range(n):
            for j in range(n):
                x = i * n + perm[j]
                y = perm[i] * n + j
                # value(x) = i**k * value(y)
                k = (s_pow + val[i] - val[j]) % 4
                rx, px = find(x)
                ry, py = find(y)
                if rx == ry:
                    if (px - py - k) % 4:
                        bad.add(rx)
                else:
                    parent[rx] = ry
                    phase[rx] = (k + py - px) % 4
                    if rx in bad:
                        bad.add(ry)
    comps = {}
    for x in range(n * n):
        root, ph = find(x)
        comps.setdefault(root, []).append((x, ph))
    roots = [r for r in comps if find(r)[0] not in bad and r not in bad]
    for x in range(n * n):  # canonical: first free position gets value 1
        root, ph = find(x)
        if root in bad or root not in roots:
            continue
        re = np.zeros((n, n), dtype=np.int64)
        im = np.zeros((n, n), dtype=np.int64)
        for y, py in comps[root]:
            p = (py - ph) % 4
            a, b = [(1, 0), (0, 1), (-1, 0), (0, -1)][p]
            re[y // n, y % n] = a
            im[y // n, y % n] = b
        cand = GMat(re, im)
        if cand.is_monomial():
            return cand
    return None


@dataclass(frozen=True, eq=False)
class GammaRep:
    dimension: int
    signature: tuple
    gammas: tuple  # upper-index gamma^a as GMat
    conjugation: GMat
    conjugation_sign: int  # C gamma^a C^-1 = sign * (gamma^a)^T

    @property
    def spinor_size(self) -> int:
        return self.gammas[0].n

    @cached_property
    def eta(self) -> tuple:
        r, s = self.signature
        return tuple([-1] * r + [1] * s)

    def gamma(self, *indices: int, lower: bool = False) -> GMat:
        """Ordered product ``gamma^{a1} ... gamma^{ak}`` (lowered with eta if asked).

        For distinct indices this equals the antisymmetrized ``gamma^{a1..ak}``.
        """
        out = GMat.identity(self.spinor_size)
        sign = 1
        for a in indices:
            out = out @ self.gammas[a]
            if lower:
                sign *= self.eta[a]
        return out.scale(sign) if sign != 1 else out

    def antisymmetric(self, *indices: int, lower: bool = True) -> GMat:
        """``Gamma_{a1..ak}`` with unit-weight antisymmetrization (zero on repeats)."""
        if len(set(indices)) < len(indices):
            return GMat(np.zeros((self.spinor_size,) * 2, dtype=np.int64))
        order = sorted(indices)
        sign = _perm_sign([order.index(a) for a in indices])
        m = self.gamma(*order, lower=lower)
        return m if sign == 1 else -m

    def cgamma(self, *indices: int, lower: bool = True) -> GMat:
        """``C Gamma_{a1..ak}``: the matrix contracted between two spinors."""
        return self.conjugation @ self.antisymmetric(*indices, lower=lower)

    @cached_property
    def gamma5(self) -> GMat:
        """``gamma^0 gamma^1 ... gamma^{D-1}`` (even D); normalisation left to callers."""
        return self.gamma(*range(self.dimension))

    def clifford_defects(self) -> list[tuple[int, int]]:
        n = self.spinor_size
        bad = []
        for a in range(self.dimension):
            for b in range(self.dimension):
                anti = self.gammas[a] @ self.gammas[b] + self.gammas[b] @ self.gammas[a]
                target = GMat.identity(n).scale(2 * self.eta[a]) if a == b else GMat(np.zeros((n, n), dtype=np.int64))
                if anti != target:
                    bad.append((a, b))
        return bad


def build_gamma(D: int, signature: tuple | None = None, conjugation_sign: int | None = None) -> GammaRep:
    """Gamma matrices for ``Cl(r, s)``, ``r`` timelike (``eta = -1``) directions first."""
    if not 2 <= D <= 12:
        raise CliffordError(f"unsupported dimension D={D} (need 2 <= D <= 12)")
    if signature is None:
        signature = (1, D - 1)
    r, s = signature
    if r + s != D or r < 0 or s < 0:
        raise CliffordError(f"signature {signature} does not match D={D}")
    gammas = [e.times_i() if a < r else e for a, e in enumerate(_euclidean_gammas(D))]
    signs = (conjugation_sign,) if conjugation_sign else (-1, 1)
    for sign in signs:
        C = _solve_conjugation(gammas, sign)
        if C is not None:
            rep = GammaRep(D, (r, s), tuple(gammas), C, sign)
            if rep.clifford_defects():
                raise CliffordError("internal error: Clifford relation violated")
            return rep
    raise CliffordError(f"no charge conjugation matrix for D={D}, signature {signature}")


@dataclass(frozen=True)
class BilinearTable:
    """Transposition sign ``s_k`` of ``C Gamma^{(k)}`` for each rank ``k``."""

    dimension: int
    signs: tuple  # signs[k] in {+1, -1}

    def symmetric_ranks(self) -> list[int]:
        return [k for k, s in enumerate(self.signs) if s == 1]

    def __getitem__(self, k: int) -> int:
        return self.signs[k]


def bilinear_table(rep: GammaRep) -> BilinearTable:
    signs = []
    for k in range(rep.dimension + 1):
        sign = None
        for combo in itertools.combinations(range(rep.dimension), k):
            m = rep.cgamma(*combo)
            if m.T == m:
                s = 1
            elif m.T == -m:
                s = -1
            else:
                raise CliffordError(f"C Gamma{combo} is neither symmetric nor antisymmetric")
            if sign is None:
                sign = s
            elif s != sign:
                raise CliffordError(f"inconsistent transposition sign within rank {k}")
        signs.append(sign)
    return BilinearTable(rep.dimension, tuple(signs))


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


# -- Fierz residuals -----------------------------------------------------------


@dataclass(frozen=True)
class FierzTerm:
    """``coefficient * prod_k (C Gamma_{labels_k})_{s_{2k} s_{2k+1}}``.

    ``bilinears`` lists the lower vector labels of each factor, e.g.
    ``(("a", "b"), ("a",))`` for ``(C Gamma_{ab})(C Gamma_a)``.  A label used
    twice is contracted with ``eta``; a label used once must be declared free.
    """

    coefficient: object
    bilinears: tuple

    def __post_init__(self):
        object.__setattr__(self, "bilinears", tuple(tuple(b) for b in self.bilinears))


_MAX_TENSOR_RANK = 4


def _rank_tensor(rep: GammaRep, k: int) -> tuple[np.ndarray, np.ndarray]:
    D, n = rep.dimension, rep.spinor_size
    if k > _MAX_TENSOR_RANK:
        raise FierzSpecError(f"bilinears of rank {k} > {_MAX_TENSOR_RANK} are not supported here")
    re = np.zeros((D,) * k + (n, n), dtype=np.int64)
    im = np.zeros_like(re)
    for combo in itertools.combinations(range(D), k):
        m = rep.cgamma(*combo)
        for perm in itertools.permutations(range(k)):
            idx = tuple(combo[p] for p in perm)
            sign = _perm_sign(perm)
            re[idx] = sign * m.re
            im[idx] = sign * m.im
    return re, im


def fierz_residual(
    rep: GammaRep,
    terms: Iterable[FierzTerm],
    free: Sequence[str] = (),
    symmetrize: Sequence[int] | None = None,
) -> dict[tuple, Scalar]:
    """Symmetrized spinor tensor of a sum of bilinear products.

    Spinor slots are numbered ``2k, 2k+1`` for bilinear ``k``; ``symmetrize``
    selects which slots are projected onto their totally symmetric part
    (default: all).  Returns ``{(spinor indices, free vector values): value}``
    with only nonzero entries, symmetric slots listed in non-decreasing order.
    An empty map means the identity holds.
    """
    terms = list(terms)
    if not terms:
        return {}
    nbil = {len(t.bilinears) for t in terms}
    if len(nbil) != 1:
        raise FierzSpecError("all terms must have the same number of bilinears")
    nslots = 2 * nbil.pop()
    sym = tuple(range(nslots)) if symmetrize is None else tuple(symmetrize)
    if len(set(sym)) != len(sym) or any(not 0 <= s < nslots for s in sym):
        raise FierzSpecError(f"bad symmetrized slots {sym}")
    free = tuple(free)
    D, n = rep.dimension, rep.spinor_size
    eta = np.array(rep.eta, dtype=np.int64)

    for t in terms:
        counts: dict = {}
        for bil in t.bilinears:
            if len(set(bil)) != len(bil):
                raise FierzSpecError(f"repeated label inside one bilinear {bil}")
            for lab in bil:
                counts[lab] = counts.get(lab, 0) + 1
        for lab, c in counts.items():
            if c > 2:
                raise FierzSpecError(f"label {lab!r} appears {c} times")
            if c == 2 and lab in free:
                raise FierzSpecError(f"free label {lab!r} is contracted")
            if c == 1 and lab not in free:
                raise FierzSpecError(f"label {lab!r} appears once but is not declared free")
        missing = [f for f in free if f not in counts]
        if missing:
            raise FierzSpecError(f"free labels {missing} do not occur in every term")

    denom = 1
    for t in terms:
        a, b = Scalar.coerce(t.coefficient).constant()
        denom = math.lcm(denom, a.denominator, b.denominator)
    tensors: dict = {}
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    label_letter: dict = {}
    slot_letters = [next(letters) for _ in range(nslots)]

    def letter(lab):
        if lab not in label_letter:
            label_letter[lab] = next(letters)
        return label_letter[lab]

    out: dict = {}
    for assignment in itertools.product(range(D), repeat=len(free)):
        fixed = dict(zip(free, assignment))
        tot_re = np.zeros((n,) * nslots, dtype=np.int64)
        tot_im = np.zeros_like(tot_re)
        for t in terms:
            a, b = Scalar.coerce(t.coefficient).constant()
            cre, cim = int(a * denom), int(b * denom)
            ops, subs = [], []
            raised = set()
            for k, bil in enumerate(t.bilinears):
                rk = len(bil)
                if rk not in tensors:
                    tensors[rk] = _rank_tensor(rep, rk)
                re, im = tensors[rk]
                idx = tuple(fixed.get(lab, slice(None)) for lab in bil)
                re, im = re[idx], im[idx]
                sub = ""
                for axis_lab in [lab for lab in bil if lab not in fixed]:
                    if axis_lab not in raised:
                        raised.add(axis_lab)
                        shape = [1] * re.ndim
                        shape[len(sub)] = D
                        re = re * eta.reshape(shape)
                        im = im * eta.reshape(shape)
                    sub += letter(axis_lab)
                sub += slot_letters[2 * k] + slot_letters[2 * k + 1]
                ops.append((re, im))
                subs.append(sub)
            spec = ",".join(subs) + "->" + "".join(slot_letters)
            pre, pim = _gaussian_einsum(spec, ops)
            tot_re += cre * pre - cim * pim
            tot_im += cre * pim + cim * pre
        sre, sim = _symmetrize(tot_re, sym), _symmetrize(tot_im, sym)
        for idx in zip(*np.nonzero(sre | sim)):
            if any(idx[sym[i]] > idx[sym[i + 1]] for i in range(len(sym) - 1)):
                continue
            scale = denom * math.factorial(len(sym))
            key = (tuple(int(x) for x in idx), assignment)
            out_val = Scalar.gaussian(Fraction(int(sre[idx]), scale), Fraction(int(sim[idx]), scale))
            out[key] = out_val
    return out


def _gaussian_einsum(spec: str, ops: list) -> tuple[np.ndarray, np.ndarray]:
    """Exact einsum over Gaussian-integer operands given as (re, im) pairs."""
    out_re = out_im = None
    m = len(ops)
    for choice in itertools.product((0, 1), repeat=m):
        arrays = [ops[k][choice[k]] for k in range(m)]
        if any(not arr.any() for arr in arrays):
            continue
        val = np.einsum(spec, *arrays, optimize=True)
        q = sum(choice)
        sign = -1 if (q // 2) % 2 else 1
        if q % 2 == 0:
            out_re = val * sign if out_re is None else out_re + val * sign
        else:
            out_im = val * sign if out_im is None else out_im + val * sign
    shape = np.einsum(spec, *[o[0] for o in ops], optimize=True).shape if (out_re is None or out_im is None) else None
    if out_re is None:
        out_re = np.zeros(shape, dtype=np.int64)
    if out_im is None:
        out_im = np.zeros(shape if shape is not None else out_re.shape, dtype=np.int64)
    return out_re, out_im


def _symmetrize(t: np.ndarray, slots: Sequence[int]) -> np.ndarray:
    """Sum over all permutations of the given axes (unnormalised)."""
    if len(slots) < 2:
        return t
    out = np.zeros_like(t)
    axes = list(range(t.ndim))
    for perm in itertools.permutations(slots):
        ax = axes.copy()
        for src, dst in zip(slots, perm):
            ax[src] = dst
        out += np.transpose(t, ax)
    return out
