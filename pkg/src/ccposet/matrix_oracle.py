"""Concrete unital *-subalgebras of ``M_{n_1}(C) + ... + M_{n_k}(C)``.

Elements of the ambient algebra are flat coordinate vectors: block ``i``
contributes its ``n_i x n_i`` entries in row-major order. Exact mode uses
Gaussian rationals and is tolerance free; float mode decides ranks by
singular values relative to the largest one.
"""
from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from .linalg import REL_TOL, backend
from .partitions import (AlgebraSpec, GuardExceeded, Partition, enumerate_partitions,
                         witness_key, witness_label)
from .poset import FinitePoset

EXACT_GUARD = 4


class NonGenericUnitaries(ValueError):
    pass


class Ambient:
    """The block-diagonal algebra for ``spec`` in one arithmetic mode."""

    def __init__(self, spec: AlgebraSpec | Sequence[int] | str, mode: str = "exact"):
        if not isinstance(spec, AlgebraSpec):
            spec = AlgebraSpec.parse(spec)
        self.spec = spec
        self.mode = mode
        self.field = backend(mode)
        self.offsets = list(itertools.accumulate([0] + [s * s for s in spec.sizes]))
        self.dim = self.offsets[-1]

    def __repr__(self) -> str:
        return f"Ambient({self.spec}, mode={self.mode!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ambient) and (self.spec, self.mode) == (other.spec, other.mode)

    def __hash__(self) -> int:
        return hash((self.spec, self.mode))

    def blocks(self, x: Sequence) -> list:
        f = self.field
        return [f.unflatten(x[self.offsets[i]:self.offsets[i + 1]], n)
                for i, n in enumerate(self.spec.sizes)]

    def from_blocks(self, mats: Sequence) -> Any:
        f = self.field
        vals: list = []
        for m in mats:
            vals.extend(f.flatten(m))
        if self.mode == "exact":
            return tuple(vals)
        return np.array(vals, dtype=complex)

    def element(self, blocks: Sequence[Sequence[Sequence[Any]]]) -> Any:
        """Element from nested per-block row lists of scalars."""
        if len(blocks) != self.spec.k:
            raise ValueError(f"expected {self.spec.k} blocks")
        mats = []
        for rows, n in zip(blocks, self.spec.sizes):
            m = self.field.matrix(rows)
            if tuple(m.shape) != (n, n):
                raise ValueError(f"block of shape {tuple(m.shape)} where {n}x{n} expected")
            mats.append(m)
        return self.from_blocks(mats)

    def identity(self) -> Any:
        return self.from_blocks([self.field.eye(n) for n in self.spec.sizes])

    def unit(self, block: int, r: int, c: int) -> Any:
        v = [self.field.zero] * self.dim
        v[self.offsets[block] + r * self.spec.sizes[block] + c] = self.field.one
        return self._vec(v)

    def _vec(self, vals: Sequence) -> Any:
        return tuple(vals) if self.mode == "exact" else np.array(vals, dtype=complex)

    @cached_property
    def standard_basis(self) -> tuple:
        return tuple(self.unit(i, r, c) for i, n in enumerate(self.spec.sizes)
                     for r in range(n) for c in range(n))

    def mul(self, x: Any, y: Any) -> Any:
        f = self.field
        return self.from_blocks([f.matmul(a, b) for a, b in zip(self.blocks(x), self.blocks(y))])

    def adj(self, x: Any) -> Any:
        f = self.field
        return self.from_blocks([f.adjoint(a) for a in self.blocks(x)])

    def add(self, x: Any, y: Any) -> Any:
        return self._vec([a + b for a, b in zip(x, y)])

    def sub(self, x: Any, y: Any) -> Any:
        return self._vec([a - b for a, b in zip(x, y)])

    def scale(self, c: Any, x: Any) -> Any:
        c = self.field.scalar(c)
        return self._vec([c * a for a in x])

    def commutator(self, x: Any, y: Any) -> Any:
        return self.sub(self.mul(x, y), self.mul(y, x))

    def is_zero(self, x: Any) -> bool:
        if self.mode == "exact":
            return self.field.is_zero(x)
        # float bases are orthonormal, so an absolute threshold is scale-aware
        return bool(np.abs(x).max(initial=0) <= REL_TOL)

    def span_basis(self, vectors: Sequence) -> tuple:
        return self.field.basis(list(vectors), self.dim)

    def rank(self, vectors: Sequence) -> int:
        return self.field.rank(list(vectors), self.dim)

    def conjugate_by(self, unitary: Sequence, x: Any) -> Any:
        f = self.field
        return self.from_blocks([f.matmul(f.matmul(u, a), f.adjoint(u))
                                 for u, a in zip(unitary, self.blocks(x))])

    def block_unitary(self, blocks: Sequence | None) -> list:
        """Per-block unitary matrices in this ambient's arithmetic."""
        f = self.field
        if blocks is None:
            return [f.eye(n) for n in self.spec.sizes]
        if len(blocks) != self.spec.k:
            raise ValueError(f"expected {self.spec.k} unitary blocks")
        out = []
        for u, n in zip(blocks, self.spec.sizes):
            m = u if f.is_native(u) else f.matrix(u)
            if tuple(m.shape) != (n, n):
                raise ValueError(f"unitary block of shape {tuple(m.shape)} where {n}x{n} expected")
            if not f.mat_equal(f.matmul(m, f.adjoint(m)), f.eye(n)):
                raise ValueError("block is not unitary")
            out.append(m)
        return out


class SubalgebraSpan:
    """Linear span inside an :class:`Ambient`, normally a unital *-subalgebra."""

    def __init__(self, ambient: Ambient, vectors: Sequence):
        self.ambient = ambient
        self.basis = ambient.span_basis(vectors)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __repr__(self) -> str:
        return f"SubalgebraSpan(dim={self.dim}, {self.ambient!r})"

    def contains(self, x: Any) -> bool:
        return self.ambient.rank(list(self.basis) + [x]) == self.dim

    def includes(self, other: SubalgebraSpan) -> bool:
        """Whether ``other`` is a subspace of ``self``."""
        _same_ambient(self, other)
        if other.dim > self.dim:
            return False
        return self.ambient.rank(list(self.basis) + list(other.basis)) == self.dim

    def __le__(self, other: SubalgebraSpan) -> bool:
        return other.includes(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SubalgebraSpan):
            return NotImplemented
        return self.ambient == other.ambient and self.dim == other.dim and self.includes(other)

    __hash__ = None  # type: ignore[assignment]

    @cached_property
    def unital(self) -> bool:
        return self.contains(self.ambient.identity())

    @cached_property
    def self_adjoint(self) -> bool:
        return all(self.contains(self.ambient.adj(b)) for b in self.basis)

    @cached_property
    def product_closed(self) -> bool:
        amb = self.ambient
        return all(self.contains(amb.mul(a, b)) for a in self.basis for b in self.basis)

    @cached_property
    def commutative(self) -> bool:
        amb = self.ambient
        return all(amb.is_zero(amb.commutator(a, b))
                   for i, a in enumerate(self.basis) for b in self.basis[i + 1:])

    @property
    def is_star_subalgebra(self) -> bool:
        return self.unital and self.self_adjoint and self.product_closed


def _same_ambient(a: SubalgebraSpan, b: SubalgebraSpan) -> None:
    if a.ambient != b.ambient:
        raise ValueError(f"ambient mismatch: {a.ambient!r} vs {b.ambient!r}")


# constructions --------------------------------------------------------------

def full_algebra(amb: Ambient) -> SubalgebraSpan:
    return SubalgebraSpan(amb, amb.standard_basis)


def generate_subalgebra(amb: Ambient, seeds: Sequence = ()) -> SubalgebraSpan:
    """Smallest unital *-subalgebra containing ``seeds``.

    The span of ``1``, the seeds and their adjoints is multiplied on the right
    by those generators until the dimension stops growing.
    """
    gens = [amb.identity()] + list(seeds) + [amb.adj(s) for s in seeds]
    basis = amb.span_basis(gens)
    while True:
        grown = amb.span_basis(list(basis) + [amb.mul(b, g) for b in basis for g in gens[1:]])
        if len(grown) == len(basis):
            return SubalgebraSpan(amb, grown)
        basis = grown


def intersect_spans(a: SubalgebraSpan, b: SubalgebraSpan) -> SubalgebraSpan:
    _same_ambient(a, b)
    amb = a.ambient
    cols = list(a.basis) + list(b.basis)
    coeffs = amb.field.nullspace(cols, amb.dim)
    vecs = [amb.field.combine(c[:a.dim], a.basis, amb.dim) for c in coeffs]
    return SubalgebraSpan(amb, vecs)


def commutant_in(amb: Ambient, s: SubalgebraSpan | Sequence) -> SubalgebraSpan:
    """All ambient elements commuting with every basis element of ``s``."""
    gens = s.basis if isinstance(s, SubalgebraSpan) else tuple(s)
    if not gens:
        return full_algebra(amb)
    f = amb.field
    cols = []
    for e in amb.standard_basis:
        parts: list = []
        for g in gens:
            parts.extend(amb.commutator(e, g))
        cols.append(tuple(parts) if amb.mode == "exact" else np.array(parts, dtype=complex))
    coeffs = f.nullspace(cols, amb.dim * len(gens))
    return SubalgebraSpan(amb, [amb._vec(c) for c in coeffs])


def center(amb: Ambient) -> SubalgebraSpan:
    return commutant_in(amb, amb.standard_basis)


def self_adjoint_parts(amb: Ambient, v: Any) -> tuple[Any, Any]:
    """``(v + v*, i(v - v*))``; both self-adjoint, and ``v`` is in their span."""
    va = amb.adj(v)
    return amb.add(v, va), amb.scale(amb.field.i, amb.sub(v, va))


def maximal_completion(amb: Ambient, c: SubalgebraSpan,
                       rng: random.Random | None = None) -> SubalgebraSpan:
    """Enlarge a commutative subalgebra to a maximal commutative one.

    While the relative commutant is larger than ``c``, adjoin a self-adjoint
    element of it that lies outside ``c``. Without ``rng`` that element is
    the first of ``v + v*``, ``i(v - v*)`` over the commutant's basis vectors
    ``v`` in order; with ``rng`` it is the self-adjoint part of a random
    small-integer combination of the basis.
    """
    if not c.commutative:
        raise ValueError("maximal_completion needs a commutative subalgebra")
    while True:
        rel = commutant_in(amb, c)
        if rel.dim == c.dim:
            return c
        h = _outside_element(amb, c, rel, rng)
        c = generate_subalgebra(amb, list(c.basis) + [h])


def _outside_element(amb: Ambient, c: SubalgebraSpan, rel: SubalgebraSpan,
                     rng: random.Random | None) -> Any:
    if rng is not None:
        for _ in range(64):
            coeffs = [amb.field.scalar(rng.randint(-3, 3)) for _ in rel.basis]
            v = amb.field.combine(coeffs, rel.basis, amb.dim)
            for h in self_adjoint_parts(amb, v):
                if not c.contains(h):
                    return h
    for v in rel.basis:
        for h in self_adjoint_parts(amb, v):
            if not c.contains(h):
                return h
    raise AssertionError("relative commutant larger than c but no element outside c")


def partition_subalgebra(amb: Ambient, p: Partition, unitary: Sequence | None = None) -> SubalgebraSpan:
    """Functions constant on the blocks of ``p`` inside the MASA ``u D u*``.

    ``D`` is the diagonal subalgebra; spectrum points are numbered blockwise.
    """
    if p.n != amb.spec.N:
        raise ValueError(f"partition on {p.n} points for ambient with N={amb.spec.N}")
    f = amb.field
    u = amb.block_unitary(unitary)
    pts = amb.spec.block_points()
    gens = []
    for block in p.blocks:
        members = set(block)
        mats = []
        for i, n in enumerate(amb.spec.sizes):
            d = [[f.one if (r == col and pts[i][r] in members) else f.zero for col in range(n)]
                 for r in range(n)]
            mats.append(f.matmul(f.matmul(u[i], f.matrix(d)), f.adjoint(u[i])))
        gens.append(amb.from_blocks(mats))
    return SubalgebraSpan(amb, gens)


def diagonal_masa(amb: Ambient, unitary: Sequence | None = None) -> SubalgebraSpan:
    return partition_subalgebra(amb, Partition.singletons(amb.spec.N), unitary)


# unitaries ------------------------------------------------------------------

def _pythagorean_triples(count: int) -> list[tuple[int, int, int]]:
    out = []
    hyp = 2
    while len(out) < count:
        hyp += 1
        for m in range(2, int(math.isqrt(hyp)) + 1):
            k = hyp - m * m
            if k < 1 or k >= m * m:
                continue
            n = math.isqrt(k)
            if n * n != k or n >= m or math.gcd(m, n) != 1 or (m - n) % 2 == 0:
                continue
            a, b = m * m - n * n, 2 * m * n
            out.append((min(a, b), max(a, b), hyp))
    return out[:count]


PYTHAGOREAN_TRIPLES = tuple(_pythagorean_triples(16))


def pythagorean_unitary(n: int, seed: int = 0) -> tuple[tuple[Fraction, ...], ...]:
    """Exact rational orthogonal matrix: a product of plane rotations.

    Rotations act on the coordinate planes ``(i, j)``, ``i < j``, in
    lexicographic order; rotation number ``r`` uses the primitive
    Pythagorean triple ``PYTHAGOREAN_TRIPLES[(seed + r) % 16]`` as
    ``(cos, sin) = (a/c, b/c)``.
    """
    if n < 1:
        raise ValueError("matrix size must be positive")
    u = [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
    for r, (i, j) in enumerate(itertools.combinations(range(n), 2)):
        a, b, h = PYTHAGOREAN_TRIPLES[(seed + r) % len(PYTHAGOREAN_TRIPLES)]
        cs, sn = Fraction(a, h), Fraction(b, h)
        for row in u:  # u <- u @ G(i, j)
            x, y = row[i], row[j]
            row[i], row[j] = x * cs + y * sn, -x * sn + y * cs
    return tuple(tuple(row) for row in u)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def is_generic(amb: Ambient, unitaries: Sequence[Sequence | None]) -> bool:
    """Whether all pairwise intersections of the conjugated MASAs are the centre."""
    masas = [diagonal_masa(amb, u) for u in unitaries]
    return all(intersect_spans(a, b).dim == amb.spec.k for a, b in itertools.combinations(masas, 2))


def generic_unitaries(spec: AlgebraSpec, copies: int = 2, seed: int = 0, mode: str = "exact",
                      max_tries: int = 64) -> list[list]:
    """Block unitaries for copies ``2..copies`` whose MASAs meet pairwise in the centre.

    Exact mode: copy ``t`` uses ``pythagorean_unitary(n_i, s_t + i)`` for
    block ``i``, starting from ``s_t = seed + 5 (t - 2)`` and incrementing
    ``s_t`` until the genericity check passes. Float mode draws Haar
    unitaries from ``numpy.random.default_rng(seed)``.
    """
    amb = Ambient(spec, mode)
    chosen: list = [None]
    gen = np.random.default_rng(seed)
    for t in range(2, copies + 1):
        s = seed + 5 * (t - 2)
        for _ in range(max_tries):
            if mode == "exact":
                cand = [pythagorean_unitary(n, s + i) for i, n in enumerate(spec.sizes)]
            else:
                cand = [random_unitary(n, gen) for n in spec.sizes]
            if is_generic(amb, chosen + [cand]):
                chosen.append(cand)
                break
            s += 1
        else:
            raise NonGenericUnitaries(f"no generic unitary found for copy {t} after {max_tries} tries")
    return chosen[1:]


# *-homomorphisms ------------------------------------------------------------

class StarHom:
    """Unital *-homomorphism between two ambients, applied to flat vectors."""

    source: Ambient
    target: Ambient

    def __call__(self, x: Any) -> Any:
        raise NotImplementedError

    @cached_property
    def injective(self) -> bool:
        return self.target.rank([self(e) for e in self.source.standard_basis]) == self.source.dim

    def then(self, g: StarHom) -> StarHom:
        """``g`` after ``self``."""
        return Composite(self, g)


class IdentityHom(StarHom):
    def __init__(self, amb: Ambient):
        self.source = self.target = amb

    def __call__(self, x: Any) -> Any:
        return x


class Conjugation(StarHom):
    """``x -> u x u*`` with a block unitary ``u``."""

    def __init__(self, amb: Ambient, unitary: Sequence):
        self.source = self.target = amb
        self.unitary = amb.block_unitary(unitary)

    def __call__(self, x: Any) -> Any:
        return self.source.conjugate_by(self.unitary, x)


class Projection(StarHom):
    """Coordinate projection onto block ``j``."""

    def __init__(self, amb: Ambient, j: int):
        if not 0 <= j < amb.spec.k:
            raise ValueError(f"no block {j} in {amb.spec}")
        self.source = amb
        self.target = Ambient(AlgebraSpec((amb.spec.sizes[j],)), amb.mode)
        self.j = j

    def __call__(self, x: Any) -> Any:
        return self.target.from_blocks([self.source.blocks(x)[self.j]])


class BlockEmbedding(StarHom):
    """Place source blocks along the diagonal of target blocks.

    ``layout[j]`` lists the source blocks, repetitions allowed, stacked down
    target block ``j``; their sizes must add up to that block's size. Every
    source block must occur somewhere, which makes the map injective.
    """

    def __init__(self, source: Ambient, target_spec: AlgebraSpec | str | Sequence[int],
                 layout: Sequence[Sequence[int]]):
        target = Ambient(target_spec if isinstance(target_spec, AlgebraSpec)
                         else AlgebraSpec.parse(target_spec), source.mode)
        if len(layout) != target.spec.k:
            raise ValueError(f"layout needs one entry per target block ({target.spec.k})")
        for j, row in enumerate(layout):
            if any(not 0 <= i < source.spec.k for i in row):
                raise ValueError(f"layout row {j} names a missing source block")
            if sum(source.spec.sizes[i] for i in row) != target.spec.sizes[j]:
                raise ValueError(f"layout row {j} does not fill a block of size {target.spec.sizes[j]}")
        if {i for row in layout for i in row} != set(range(source.spec.k)):
            raise ValueError("every source block must appear in the layout")
        self.source, self.target = source, target
        self.layout = [list(row) for row in layout]

    def __call__(self, x: Any) -> Any:
        f = self.target.field
        src = [f.entries(b) for b in self.source.blocks(x)]
        mats = []
        for j, row in enumerate(self.layout):
            n = self.target.spec.sizes[j]
            rows = [[f.zero] * n for _ in range(n)]
            off = 0
            for i in row:
                blk = src[i]
                m = self.source.spec.sizes[i]
                for r in range(m):
                    rows[off + r][off:off + m] = blk[r]
                off += m
            mats.append(f.matrix(rows))
        return self.target.from_blocks(mats)


class Composite(StarHom):
    def __init__(self, first: StarHom, second: StarHom):
        if first.target != second.source:
            raise ValueError("homomorphisms do not compose")
        self.first, self.second = first, second
        self.source, self.target = first.source, second.target

    def __call__(self, x: Any) -> Any:
        return self.second(self.first(x))


def apply_hom(f: StarHom, s: SubalgebraSpan) -> SubalgebraSpan:
    """Image ``f[s]``."""
    if s.ambient != f.source:
        raise ValueError("subalgebra does not live in the source of the homomorphism")
    return SubalgebraSpan(f.target, [f(b) for b in s.basis])


def preimage_hom(f: StarHom, t: SubalgebraSpan) -> SubalgebraSpan:
    """Preimage ``f^{-1}[t]``."""
    if t.ambient != f.target:
        raise ValueError("subalgebra does not live in the target of the homomorphism")
    src, tgt = f.source, f.target
    cols = [f(e) for e in src.standard_basis] + list(t.basis)
    coeffs = tgt.field.nullspace(cols, tgt.dim)
    return SubalgebraSpan(src, [src._vec(c[:src.dim]) for c in coeffs])


# realized witness posets ----------------------------------------------------

def realize_witness(spec: AlgebraSpec, unitaries: Sequence[Sequence] = (), mode: str = "exact",
                    guard: int = EXACT_GUARD) -> FinitePoset:
    """Inclusion poset of the partition subalgebras of ``m`` conjugated MASAs.

    Copy 1 is the diagonal algebra, copy ``t + 2`` uses ``unitaries[t]``.
    Elements inside the computed centre are shared and labelled ``*``; the
    labels and element order match :func:`ccposet.partitions.witness_poset`.
    """
    if mode == "exact" and spec.N > guard:
        raise GuardExceeded(f"N={spec.N} exceeds exact-mode guard {guard}")
    amb = Ambient(spec, mode)
    copies: list = [None] + list(unitaries)
    if spec.commutative:
        copies = [None]
    if not is_generic(amb, copies):
        raise NonGenericUnitaries("conjugated MASAs do not meet exactly in the centre")
    z = center(amb)
    found: dict[tuple, SubalgebraSpan] = {}
    for t, u in enumerate(copies, start=1):
        for p in enumerate_partitions(spec.N):
            s = partition_subalgebra(amb, p, u)
            key = (None, p) if z.includes(s) else (t, p)
            if key not in found:
                found[key] = s
    keys = sorted(found, key=lambda e: witness_key(*e))
    spans = [found[key] for key in keys]
    n = len(spans)
    le = np.eye(n, dtype=bool)
    for i, j in itertools.permutations(range(n), 2):
        if spans[i].dim < spans[j].dim:
            le[i, j] = spans[j].includes(spans[i])
    return FinitePoset(le, [witness_label(*key) for key in keys])


# serialization --------------------------------------------------------------

def matrix_to_json(amb: Ambient, m: Any) -> list[list[Any]]:
    f = amb.field
    return [[f.entry_to_json(e) for e in row] for row in f.entries(m)]


def element_to_json(amb: Ambient, x: Any) -> list:
    return [matrix_to_json(amb, b) for b in amb.blocks(x)]


def element_from_json(amb: Ambient, data: Sequence) -> Any:
    f = amb.field
    return amb.element([[[f.entry_from_json(e) for e in row] for row in blk] for blk in data])


def span_to_json(s: SubalgebraSpan) -> dict[str, Any]:
    amb = s.ambient
    return {"mode": amb.mode, "spec": amb.spec.to_json(),
            "basis": [element_to_json(amb, b) for b in s.basis]}


def span_from_json(data: dict[str, Any]) -> SubalgebraSpan:
    amb = Ambient(AlgebraSpec(tuple(data["spec"])), data["mode"])
    return SubalgebraSpan(amb, [element_from_json(amb, b) for b in data["basis"]])


def unitary_to_json(amb: Ambient, unitary: Sequence) -> list:
    return [matrix_to_json(amb, u) for u in amb.block_unitary(unitary)]
