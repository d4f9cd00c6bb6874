"""Set partitions as commutative subalgebras of C^N, and witness posets.

A partition ``P`` of the spectrum ``{0, ..., N-1}`` stands for the subalgebra
of functions constant on each block of ``P``. Larger subalgebras have finer
partitions: the one-block partition is the scalars (least element) and the
all-singletons partition is all of C^N (greatest element).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .poset import FinitePoset

DEFAULT_GUARD = 7


class GuardExceeded(ValueError):
    pass


def _check_guard(n: int, guard: int) -> None:
    if n > guard:
        raise GuardExceeded(f"size {n} exceeds guard {guard}")


@dataclass(frozen=True)
class Partition:
    """Partition of ``{0, ..., n-1}`` into nonempty blocks, kept canonical.

    Blocks are sorted tuples, ordered by their least point.
    """

    blocks: tuple[tuple[int, ...], ...]
    n: int = field(default=-1)

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(int(x) for x in b)) for b in self.blocks))
        points = [x for b in blocks for x in b]
        n = len(points) if self.n < 0 else self.n
        if any(len(b) == 0 for b in blocks):
            raise ValueError("partition has an empty block")
        if sorted(points) != list(range(n)):
            raise ValueError(f"blocks {blocks!r} do not partition range({n})")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "n", n)

    @classmethod
    def from_block_labels(cls, labels: Sequence[int]) -> Partition:
        groups: dict[int, list[int]] = {}
        for x, b in enumerate(labels):
            groups.setdefault(b, []).append(x)
        return cls(tuple(tuple(g) for g in groups.values()), len(labels))

    @classmethod
    def one_block(cls, n: int) -> Partition:
        return cls((tuple(range(n)),), n) if n else cls((), 0)

    @classmethod
    def singletons(cls, n: int) -> Partition:
        return cls(tuple((x,) for x in range(n)), n)

    @classmethod
    def parse(cls, text: str) -> Partition:
        """Inverse of :meth:`label`, e.g. ``"0,1|2"``."""
        text = text.strip()
        if not text:
            return cls((), 0)
        return cls(tuple(tuple(int(x) for x in part.split(",")) for part in text.split("|")))

    @property
    def rank(self) -> int:
        """Number of blocks, which is the dimension of the subalgebra."""
        return len(self.blocks)

    def label(self) -> str:
        return "|".join(",".join(str(x) for x in b) for b in self.blocks)

    def __str__(self) -> str:
        return self.label()

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]

    def block_of(self) -> np.ndarray:
        out = np.empty(self.n, dtype=np.int64)
        for i, b in enumerate(self.blocks):
            out[list(b)] = i
        return out

    def sort_key(self) -> tuple:
        return (self.rank, self.blocks)


def _same_spectrum(p: Partition, q: Partition) -> None:
    if p.n != q.n:
        raise ValueError(f"spectrum mismatch: {p.n} vs {q.n} points")


def subalgebra_leq(p: Partition, q: Partition) -> bool:
    """Inclusion of subalgebras: every block of ``q`` lies inside a block of ``p``."""
    _same_spectrum(p, q)
    owner = p.block_of()
    return all(len({owner[x] for x in b}) == 1 for b in q.blocks)


def meet_partitions(p: Partition, q: Partition) -> Partition:
    """Intersection of subalgebras: blocks are the connected components of
    the union of both block relations."""
    _same_spectrum(p, q)
    parent = list(range(p.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for b in p.blocks + q.blocks:
        root = find(b[0])
        for x in b[1:]:
            parent[find(x)] = root
    return Partition.from_block_labels([find(x) for x in range(p.n)])


def join_partitions(p: Partition, q: Partition) -> Partition:
    """Generated subalgebra: the common refinement of both partitions."""
    _same_spectrum(p, q)
    cells = [tuple(sorted(set(a) & set(b))) for a in p.blocks for b in q.blocks]
    return Partition(tuple(c for c in cells if c), p.n)


def enumerate_partitions(n: int) -> Iterator[Partition]:
    """All partitions of ``n`` points, via restricted growth strings."""
    if n == 0:
        yield Partition((), 0)
        return
    labels = [0] * n

    def grow(i: int, top: int) -> Iterator[Partition]:
        if i == n:
            yield Partition.from_block_labels(labels)
            return
        for b in range(top + 2):
            labels[i] = b
            yield from grow(i + 1, max(top, b))

    yield from grow(1, 0)


def sorted_partitions(n: int, guard: int = DEFAULT_GUARD) -> list[Partition]:
    """Element order of :func:`csubalgebra_poset`: by block count, then blocks."""
    _check_guard(n, guard)
    return sorted(enumerate_partitions(n), key=Partition.sort_key)


def _refinement_matrix(parts: Sequence[Partition]) -> np.ndarray:
    """``out[i, j]`` iff ``parts[j]`` refines ``parts[i]``."""
    if not parts:
        return np.zeros((0, 0), dtype=bool)
    owners = np.array([p.block_of() for p in parts])
    same = (owners[:, :, None] == owners[:, None, :]).reshape(len(parts), -1)
    apart = (~same).astype(np.float32)
    clash = same.astype(np.float32) @ apart.T  # clash[j, i]: j joins points i separates
    return clash.T == 0


def partition_poset(parts: Sequence[Partition]) -> FinitePoset:
    return FinitePoset(_refinement_matrix(parts), [p.label() for p in parts])


def csubalgebra_poset(n: int, guard: int = DEFAULT_GUARD) -> FinitePoset:
    """Subalgebras of C^n ordered by inclusion, i.e. the partition lattice."""
    if n < 1:
        raise ValueError("need at least one point")
    return partition_poset(sorted_partitions(n, guard))


def transversal_complements(p: Partition) -> list[Partition]:
    """Complements built from a transversal ``K`` of the blocks of ``p``:
    ``K`` becomes one block and every other point a singleton."""
    if p.rank == 1:
        raise ValueError("the one-block partition is the bottom; its complement is the top")
    if p.rank == p.n:
        raise ValueError("the singleton partition is the top; its complement is the bottom")
    out = []
    for k in itertools.product(*p.blocks):
        rest = [(x,) for x in range(p.n) if x not in k]
        out.append(Partition((tuple(k), *rest), p.n))
    return sorted(set(out), key=Partition.sort_key)


# algebra signatures ---------------------------------------------------------

@dataclass(frozen=True)
class AlgebraSpec:
    """Block sizes ``(n_1, ..., n_k)`` of ``M_{n_1} + ... + M_{n_k}``, descending."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(sorted((int(s) for s in self.sizes), reverse=True))
        if not sizes:
            raise ValueError("an algebra needs at least one block")
        if sizes[-1] < 1:
            raise ValueError(f"block sizes must be positive, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def parse(cls, text: str | Iterable[int]) -> AlgebraSpec:
        if isinstance(text, str):
            try:
                return cls(tuple(int(t) for t in text.split(",") if t.strip()))
            except ValueError as exc:
                raise ValueError(f"bad spec {text!r}: {exc}") from None
        return cls(tuple(text))

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def N(self) -> int:
        return sum(self.sizes)

    @property
    def dimension(self) -> int:
        return sum(s * s for s in self.sizes)

    @property
    def commutative(self) -> bool:
        return all(s == 1 for s in self.sizes)

    def block_points(self) -> list[tuple[int, ...]]:
        """Spectrum points of each matrix block, numbered consecutively."""
        out, start = [], 0
        for s in self.sizes:
            out.append(tuple(range(start, start + s)))
            start += s
        return out

    def __str__(self) -> str:
        return ",".join(str(s) for s in self.sizes)

    def to_json(self) -> list[int]:
        return list(self.sizes)


def _check_spectrum(spec: AlgebraSpec, p: Partition) -> None:
    if p.n != spec.N:
        raise ValueError(f"partition on {p.n} points does not match spec {spec} (N={spec.N})")


def central_partition(spec: AlgebraSpec) -> Partition:
    """The centre: one block per matrix block."""
    return Partition(tuple(spec.block_points()), spec.N)


def is_central(spec: AlgebraSpec, p: Partition) -> bool:
    """Whether every block of ``p`` is a union of matrix blocks."""
    _check_spectrum(spec, p)
    return subalgebra_leq(p, central_partition(spec))


def iota(spec: AlgebraSpec, parts: Sequence[Partition]) -> Partition:
    """Direct sum of one partition per matrix block (local point numbering)."""
    if len(parts) != spec.k:
        raise ValueError(f"expected {spec.k} parts, got {len(parts)}")
    blocks = []
    for pts, part in zip(spec.block_points(), parts):
        if part.n != len(pts):
            raise ValueError(f"part on {part.n} points for a block of size {len(pts)}")
        blocks.extend(tuple(pts[x] for x in b) for b in part.blocks)
    return Partition(tuple(blocks), spec.N)


def pi(spec: AlgebraSpec, p: Partition) -> tuple[Partition, ...]:
    """Restriction of ``p`` to each matrix block, renumbered locally."""
    _check_spectrum(spec, p)
    out = []
    for pts in spec.block_points():
        local = {x: i for i, x in enumerate(pts)}
        cells = [tuple(local[x] for x in b if x in local) for b in p.blocks]
        out.append(Partition(tuple(c for c in cells if c), len(pts)))
    return tuple(out)


def block_respecting_partitions(spec: AlgebraSpec, guard: int = DEFAULT_GUARD) -> list[Partition]:
    _check_guard(spec.N, guard)
    parts = [list(enumerate_partitions(s)) for s in spec.sizes]
    return sorted((iota(spec, combo) for combo in itertools.product(*parts)),
                  key=Partition.sort_key)


def interval_above_center(spec: AlgebraSpec, guard: int = DEFAULT_GUARD) -> FinitePoset:
    """Block-respecting partitions (the subalgebras above the centre inside one
    maximal subalgebra) under inclusion."""
    return partition_poset(block_respecting_partitions(spec, guard))


# witness posets -------------------------------------------------------------

CENTRAL = "*"


def witness_label(copy: int | None, p: Partition) -> str:
    return f"{CENTRAL if copy is None else copy}:{p.label()}"


def parse_witness_label(text: str) -> tuple[int | None, Partition]:
    head, _, body = text.partition(":")
    return (None if head == CENTRAL else int(head)), Partition.parse(body)


def witness_key(copy: int | None, p: Partition) -> tuple:
    return (p.rank, 0 if copy is None else copy, p.blocks)


@dataclass(frozen=True, eq=False)
class WitnessPoset:
    """``m`` copies of the partition lattice of the spectrum, glued along the
    central partitions.

    ``elements[i]`` is ``(copy, partition)`` with copies numbered from 1 and
    ``copy = None`` for the shared central elements.
    """

    poset: FinitePoset
    spec: AlgebraSpec
    copies: int
    elements: tuple[tuple[int | None, Partition], ...]


def witness_poset(spec: AlgebraSpec, m: int = 2, guard: int = DEFAULT_GUARD) -> WitnessPoset:
    """Finite truncation of the commutative-subalgebra poset of ``spec``.

    ``(t, P) <= (t', Q)`` iff ``Q`` refines ``P`` and either ``t = t'`` or
    ``P`` is central.
    """
    _check_guard(spec.N, guard)
    if spec.commutative:
        m = 1
    elif m < 2:
        raise ValueError("a noncommutative spec needs at least 2 copies")
    elements: list[tuple[int | None, Partition]] = []
    for p in enumerate_partitions(spec.N):
        if is_central(spec, p):
            elements.append((None, p))
        else:
            elements.extend((t, p) for t in range(1, m + 1))
    elements.sort(key=lambda e: witness_key(*e))
    refines = _refinement_matrix([p for _, p in elements])
    copy = np.array([0 if t is None else t for t, _ in elements])
    central = copy == 0
    le = refines & (central[:, None] | (copy[:, None] == copy[None, :]))
    poset = FinitePoset(le, [witness_label(t, p) for t, p in elements])
    return WitnessPoset(poset, spec, m, tuple(elements))
