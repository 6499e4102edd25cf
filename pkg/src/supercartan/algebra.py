"""Graded Lie superalgebras given by structure constants.

Brackets are stored as ``C^A_{BC}`` (coefficient of ``A`` in ``[B, C}``) for
``B <= C`` in generator order only; the other half is reconstructed from graded
antisymmetry ``C^A_{CB} = -(-1)^(e_B e_C) C^A_{BC}``.  Odd-odd brackets
(anticommutators) share the same table.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .scalar import ONE, ZERO, Scalar

__all__ = [
    "AlgebraError",
    "Generator",
    "StructureConstants",
    "SuperAlgebra",
    "ValidationReport",
    "SplitReport",
    "validate_algebra",
    "analyze_split",
    "rescale",
    "relabel",
    "mutate",
]


class AlgebraError(ValueError):
    """Structural problem with an algebra definition (not a Jacobi failure)."""


@dataclass(frozen=True, order=True)
class Generator:
    name: str
    index: tuple = ()
    parity: int = 0

    @property
    def key(self) -> tuple:
        return (self.name, self.index)

    @property
    def label(self) -> str:
        if not self.index:
            return self.name
        return f"{self.name}[{' '.join(map(str, self.index))}]"

    def __str__(self) -> str:
        return self.label


def parse_label(label) -> tuple:
    """``'M[0 1]'`` -> ``('M', (0, 1))``; tuples pass through."""
    if isinstance(label, Generator):
        return label.key
    if isinstance(label, tuple):
        return (label[0], tuple(label[1]) if len(label) > 1 else ())
    text = label.strip()
    if "[" not in text:
        return (text, ())
    name, rest = text.split("[", 1)
    inner = rest.rstrip("]").split()
    return (name.strip(), tuple(int(x) if x.lstrip("-").isdigit() else x for x in inner))


@dataclass(frozen=True)
class StructureConstants:
    """Sparse half-table ``{(A, B, C): Scalar}`` with integer positions, ``B <= C``."""

    entries: Mapping[tuple, Scalar]
    defects: tuple = ()  # (A, B, C, residual) pairs that contradicted antisymmetry

    @classmethod
    def from_full(cls, full: Mapping[tuple, Scalar], parities: Sequence[int]) -> "StructureConstants":
        """Normalize a possibly double-specified table onto the ``B <= C`` half."""
        half: dict = {}
        seen: dict = {}
        defects = []
        for (a, b, c), value in full.items():
            value = Scalar.coerce(value)
            if value.is_zero():
                continue
            if b > c:
                sign = 1 if (parities[b] * parities[c]) % 2 else -1
                key, value = (a, c, b), value * sign
            else:
                key = (a, b, c)
            if key in seen:
                if seen[key] != value:
                    defects.append((key, seen[key] - value))
                continue
            seen[key] = value
            half[key] = value
        return cls(dict(half), tuple(defects))


class SuperAlgebra:
    """A finite-dimensional Lie superalgebra in a fixed generator basis."""

    def __init__(
        self,
        generators: Sequence[Generator],
        constants: StructureConstants | Mapping,
        name: str = "",
        dimension: int | None = None,
        signature: tuple | None = None,
        metadata: Mapping | None = None,
    ):
        self.generators = tuple(generators)
        self.name = name
        self.dimension = dimension
        self.signature = signature
        self.metadata = dict(metadata or {})
        self._pos = {}
        for i, g in enumerate(self.generators):
            if g.key in self._pos:
                raise AlgebraError(f"duplicate generator {g.label}")
            self._pos[g.key] = i
        if not isinstance(constants, StructureConstants):
            constants = StructureConstants.from_full(constants, self.parities)
        n = len(self.generators)
        for (a, b, c) in constants.entries:
            if not (0 <= a < n and 0 <= b < n and 0 <= c < n):
                raise AlgebraError(f"structure constant refers to undeclared generator: {(a, b, c)}")
        self.constants = constants
        self._full = None

    # -- lookup -------------------------------------------------------------
    @property
    def parities(self) -> list[int]:
        return [g.parity for g in self.generators]

    def __len__(self) -> int:
        return len(self.generators)

    def position(self, label) -> int:
        key = parse_label(label)
        try:
            return self._pos[key]
        except KeyError:
            raise AlgebraError(f"undeclared generator {label!r} in {self.name or 'algebra'}") from None

    def generator(self, label) -> Generator:
        return self.generators[self.position(label)]

    def select(self, spec) -> list[int]:
        """Positions for a generator subset: labels, base names, or a predicate."""
        if callable(spec):
            return [i for i, g in enumerate(self.generators) if spec(g)]
        out = []
        for item in spec:
            if isinstance(item, int):
                out.append(item)
                continue
            key = parse_label(item)
            if key in self._pos:
                out.append(self._pos[key])
                continue
            matches = [i for i, g in enumerate(self.generators) if g.name == key[0] and not key[1]]
            if not matches:
                raise AlgebraError(f"undeclared generator {item!r}")
            out.extend(matches)
        return sorted(set(out))

    def counts(self) -> tuple[int, int]:
        odd = sum(self.parities)
        return len(self.generators) - odd, odd

    # -- brackets -----------------------------------------------------------
    def full_table(self) -> dict:
        """``{(A, B, C): Scalar}`` over all ordered (B, C), reconstructed by antisymmetry."""
        if self._full is None:
            par = self.parities
            full = {}
            for (a, b, c), v in self.constants.entries.items():
                full[(a, b, c)] = v
                if b != c:
                    full[(a, c, b)] = v if (par[b] * par[c]) % 2 else -v
            self._full = full
        return self._full

    def bracket(self, b, c) -> dict[int, Scalar]:
        """``{A: C^A_{bc}}`` for positions or labels ``b``, ``c``."""
        b = b if isinstance(b, int) else self.position(b)
        c = c if isinstance(c, int) else self.position(c)
        return {a: v for (a, bb, cc), v in self.full_table().items() if bb == b and cc == c}

    def structure_constant(self, a, b, c) -> Scalar:
        a, b, c = (x if isinstance(x, int) else self.position(x) for x in (a, b, c))
        return self.full_table().get((a, b, c), ZERO)

    def subs(self, **values) -> "SuperAlgebra":
        entries = {k: v.subs(values) for k, v in self.constants.entries.items()}
        return SuperAlgebra(
            self.generators,
            StructureConstants({k: v for k, v in entries.items() if v}, self.constants.defects),
            self.name,
            self.dimension,
            self.signature,
            self.metadata,
        )

    def __repr__(self) -> str:
        even, odd = self.counts()
        return f"<SuperAlgebra {self.name or '?'}: {even} even, {odd} odd>"


@dataclass
class ValidationReport:
    passed: bool
    antisymmetry: list = field(default_factory=list)
    parity: list = field(default_factory=list)
    jacobi: list = field(default_factory=list)  # (labels (A, B, C), {E label: residual})

    def __bool__(self) -> bool:
        return self.passed

    def summary(self) -> str:
        if self.passed:
            return "pass"
        return (
            f"fail: {len(self.antisymmetry)} antisymmetry, {len(self.parity)} parity, "
            f"{len(self.jacobi)} Jacobi violations"
        )


def jacobi_residuals(alg: SuperAlgebra) -> dict[tuple, dict[int, Scalar]]:
    """Nonzero graded Jacobi residuals keyed by sorted position triples.

    The residual for (A, B, C) and output E is
    ``sum_cyclic (-1)^(e_A e_C) C^E_{AD} C^D_{BC}``.
    """
    par = alg.parities
    full = alg.full_table()
    by_pair = defaultdict(list)  # (B, C) -> [(D, c)]
    by_right = defaultdict(list)  # D -> [(A, E, c)]  for C^E_{AD}
    for (e, a, d), v in full.items():
        by_right[d].append((a, e, v))
    for (d, b, c), v in full.items():
        by_pair[(b, c)].append((d, v))

    partial: dict = defaultdict(dict)  # (A, B, C) -> {E: T}
    for (b, c), outs in by_pair.items():
        for d, v1 in outs:
            for a, e, v2 in by_right.get(d, ()):
                term = v2 * v1
                if (par[a] * par[c]) % 2:
                    term = -term
                slot = partial[(a, b, c)]
                slot[e] = slot[e] + term if e in slot else term

    result: dict = {}
    triples = {tuple(sorted(k)) for k in partial}
    for x, y, z in sorted(triples):
        res: dict = {}
        for trip in ((x, y, z), (y, z, x), (z, x, y)):
            for e, t in partial.get(trip, {}).items():
                res[e] = res[e] + t if e in res else t
        nz = {e: v for e, v in res.items() if v}
        if nz:
            result[(x, y, z)] = nz
    return result


def validate_algebra(alg: SuperAlgebra) -> ValidationReport:
    """Check graded antisymmetry, parity consistency and the graded Jacobi identity."""
    par = alg.parities
    labels = [g.label for g in alg.generators]
    antisym = []
    for (key, residual) in alg.constants.defects:
        antisym.append((tuple(labels[i] for i in key), residual))
    for (a, b, c), v in alg.constants.entries.items():
        if b == c and par[b] == 0 and v:
            antisym.append(((labels[a], labels[b], labels[c]), v))
    parity = [
        (labels[a], labels[b], labels[c])
        for (a, b, c), v in alg.constants.entries.items()
        if v and par[a] != (par[b] + par[c]) % 2
    ]
    jac = [
        (tuple(labels[i] for i in trip), {labels[e]: v for e, v in res.items()})
        for trip, res in sorted(jacobi_residuals(alg).items())
    ]
    return ValidationReport(not (antisym or parity or jac), antisym, parity, jac)


@dataclass
class SplitReport:
    subalgebra: tuple  # generator labels
    complement: tuple
    is_subalgebra_closed: bool
    is_reductive: bool
    grading: dict | None = None
    grading_verified: bool | None = None
    violations: list = field(default_factory=list)


def analyze_split(alg: SuperAlgebra, subset, grading_hint: Mapping | None = None) -> SplitReport:
    """Closure, reductivity and (optionally) grading additivity of ``g = h + f``."""
    sub = set(alg.select(subset))
    if not sub:
        raise AlgebraError("split subset must be nonempty")
    comp = set(range(len(alg))) - sub
    labels = [g.label for g in alg.generators]
    closed, reductive = True, True
    violations = []
    for (a, b, c), v in alg.full_table().items():
        if not v:
            continue
        if b in sub and c in sub and a not in sub:
            closed = False
            violations.append(("closure", labels[b], labels[c], labels[a]))
        if b in sub and c in comp and a not in comp:
            reductive = False
            violations.append(("reductive", labels[b], labels[c], labels[a]))
    grading = None
    verified = None
    if grading_hint is not None:
        grading = {}
        for item, deg in grading_hint.items():
            for i in alg.select([item]):
                grading[i] = int(deg)
        missing = set(range(len(alg))) - set(grading)
        if missing:
            raise AlgebraError(f"grading hint misses {[labels[i] for i in sorted(missing)]}")
        verified = True
        for (a, b, c), v in alg.full_table().items():
            if v and grading[a] != grading[b] + grading[c]:
                verified = False
                violations.append(("grading", labels[b], labels[c], labels[a]))
        grading = {labels[i]: d for i, d in sorted(grading.items())}
    return SplitReport(
        tuple(labels[i] for i in sorted(sub)),
        tuple(labels[i] for i in sorted(comp)),
        closed,
        closed and reductive,
        grading,
        verified,
        violations,
    )


def rescale(alg: SuperAlgebra, generators, parameter: str) -> SuperAlgebra:
    """Replace each listed generator ``T`` by ``lam*T``.

    Constants pick up ``lam**(n_B + n_C - n_A)`` with ``n = 1`` on rescaled
    generators; a negative exponent (non-reductive data) is refused.
    """
    scaled = set(alg.select(generators))
    entries = {}
    for (a, b, c), v in alg.constants.entries.items():
        power = (b in scaled) + (c in scaled) - (a in scaled)
        if power < 0:
            raise AlgebraError(
                f"rescaling {parameter} would need a negative power on "
                f"[{alg.generators[b]}, {alg.generators[c]}] -> {alg.generators[a]}"
            )
        entries[(a, b, c)] = v * Scalar.param(parameter, power) if power else v
    meta = dict(alg.metadata)
    meta["rescaled"] = (parameter, tuple(alg.generators[i].label for i in sorted(scaled)))
    return SuperAlgebra(alg.generators, StructureConstants(entries), alg.name, alg.dimension, alg.signature, meta)


def relabel(alg: SuperAlgebra, mapping: Mapping, name: str | None = None) -> SuperAlgebra:
    """Rename generators; values are ``(name, index)`` or ``(name, index, sign)``.

    A sign of -1 replaces the basis element by its negative.
    """
    signs = [ONE] * len(alg)
    gens = list(alg.generators)
    for old, new in mapping.items():
        i = alg.position(old)
        sign = new[2] if len(new) > 2 else 1
        gens[i] = Generator(new[0], tuple(new[1]), gens[i].parity)
        signs[i] = Scalar(sign)
    entries = {}
    for (a, b, c), v in alg.constants.entries.items():
        entries[(a, b, c)] = v * signs[a] * signs[b] * signs[c]
    return SuperAlgebra(gens, StructureConstants(entries), name or alg.name, alg.dimension, alg.signature, alg.metadata)


def mutate(alg: SuperAlgebra, a, b, c, delta=1) -> SuperAlgebra:
    """Add ``delta`` to the stored constant ``C^a_{bc}`` (a Jacobi-breaking fixture)."""
    pa, pb, pc = alg.position(a), alg.position(b), alg.position(c)
    par = alg.parities
    delta = Scalar.coerce(delta)
    if pb > pc:
        pb, pc = pc, pb
        delta = delta if (par[pb] * par[pc]) % 2 else -delta
    entries = dict(alg.constants.entries)
    entries[(pa, pb, pc)] = entries.get((pa, pb, pc), ZERO) + delta
    entries = {k: v for k, v in entries.items() if v}
    return SuperAlgebra(
        alg.generators, StructureConstants(entries), (alg.name or "algebra") + "*", alg.dimension, alg.signature, alg.metadata
    )
