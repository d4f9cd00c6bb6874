"""Finite posets stored as boolean order matrices.

Elements are the integers ``0..n-1``. ``le[i, j]`` is True iff ``i <= j``.
"""
from __future__ import annotations

import itertools
from collections.abc import Callable, Iterator, Mapping, Sequence
from functools import cached_property, reduce
from typing import Any

import numpy as np


class PosetError(ValueError):
    pass


def _bool_square(x: np.ndarray) -> np.ndarray:
    # float32 counts are exact below 2**24, far above desk-scale sizes
    f = x.astype(np.float32)
    return (f @ f) > 0


class FinitePoset:
    """Immutable finite partial order.

    The relation is validated on construction (reflexive, antisymmetric,
    transitive) unless ``check=False``, which internal constructors use when
    validity follows from the construction.
    """

    def __init__(self, le: Any, labels: Sequence[str] | None = None, check: bool = True):
        le = np.array(le, dtype=bool)
        if le.ndim != 2 or le.shape[0] != le.shape[1]:
            raise PosetError("order matrix must be square")
        n = le.shape[0]
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n:
                raise PosetError(f"expected {n} labels, got {len(labels)}")
        if check:
            if not le.diagonal().all():
                raise PosetError("relation is not reflexive")
            off = le & le.T
            np.fill_diagonal(off, False)
            if off.any():
                i, j = map(int, np.argwhere(off)[0])
                raise PosetError(f"relation is not antisymmetric ({i} <-> {j})")
            if n and (_bool_square(le) & ~le).any():
                raise PosetError("relation is not transitive")
        le.setflags(write=False)
        self._le = le
        self.labels: tuple[str, ...] | None = labels

    # construction -----------------------------------------------------------

    @classmethod
    def from_covers(cls, n: int, covers: Sequence[Sequence[int]],
                    labels: Sequence[str] | None = None) -> FinitePoset:
        """Reflexive-transitive closure of the given ``(lower, upper)`` pairs."""
        le = np.eye(n, dtype=bool)
        for pair in covers:
            a, b = (int(v) for v in pair)
            if not (0 <= a < n and 0 <= b < n):
                raise PosetError(f"cover {pair!r} out of range for n={n}")
            le[a, b] = True
        for k in range(n):
            le |= le[:, k:k + 1] & le[k:k + 1, :]
        return cls(le, labels)

    @classmethod
    def from_relation(cls, items: Sequence[Any], leq: Callable[[Any, Any], bool],
                      labels: Sequence[str] | None = None) -> FinitePoset:
        n = len(items)
        le = np.array([[bool(leq(a, b)) for b in items] for a in items], dtype=bool).reshape(n, n)
        return cls(le, labels)

    # basic accessors --------------------------------------------------------

    @property
    def le(self) -> np.ndarray:
        return self._le

    @property
    def size(self) -> int:
        return self._le.shape[0]

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"FinitePoset(size={self.size})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self._le, other._le)

    __hash__ = None  # type: ignore[assignment]

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def index_of(self, label: str) -> int:
        if self.labels is None:
            return int(label)
        return self._label_index[label]

    @cached_property
    def _label_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.labels or ())}

    def leq(self, a: int, b: int) -> bool:
        return bool(self._le[a, b])

    def lt(self, a: int, b: int) -> bool:
        return a != b and bool(self._le[a, b])

    def _check_index(self, *xs: int) -> None:
        for x in xs:
            if not (0 <= x < self.size):
                raise IndexError(f"element {x} out of range for poset of size {self.size}")

    @cached_property
    def strict(self) -> np.ndarray:
        s = self._le.copy()
        np.fill_diagonal(s, False)
        s.setflags(write=False)
        return s

    @cached_property
    def cover_matrix(self) -> np.ndarray:
        """``cover_matrix[i, j]`` iff ``j`` covers ``i``."""
        s = self.strict
        c = s & ~_bool_square(s) if self.size else s.copy()
        c.setflags(write=False)
        return c

    @cached_property
    def upper_covers(self) -> tuple[tuple[int, ...], ...]:
        c = self.cover_matrix
        return tuple(tuple(int(j) for j in np.flatnonzero(c[i])) for i in range(self.size))

    @cached_property
    def lower_covers(self) -> tuple[tuple[int, ...], ...]:
        c = self.cover_matrix
        return tuple(tuple(int(i) for i in np.flatnonzero(c[:, j])) for j in range(self.size))

    def cover_pairs(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in np.argwhere(self.cover_matrix)]

    @cached_property
    def down_size(self) -> np.ndarray:
        """Number of elements ``<= x`` (column sums of ``le``)."""
        return self._le.sum(axis=0)

    @cached_property
    def up_size(self) -> np.ndarray:
        return self._le.sum(axis=1)

    @cached_property
    def linear_extension(self) -> tuple[int, ...]:
        # x < y forces down_size[x] < down_size[y]
        return tuple(int(i) for i in np.argsort(self.down_size, kind="stable"))

    def induced(self, indices: Sequence[int]) -> FinitePoset:
        idx = np.asarray(indices, dtype=int)
        labels = None if self.labels is None else [self.labels[i] for i in idx]
        return FinitePoset(self._le[np.ix_(idx, idx)], labels, check=False)

    def relabel(self, perm: Sequence[int]) -> FinitePoset:
        """Copy in which old element ``i`` becomes element ``perm[i]``."""
        perm = np.asarray(perm, dtype=int)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        labels = None if self.labels is None else [self.labels[i] for i in inv]
        return FinitePoset(self._le[np.ix_(inv, inv)], labels, check=False)

    def dual(self) -> FinitePoset:
        return FinitePoset(self._le.T.copy(), self.labels, check=False)


# small constructors ---------------------------------------------------------

def chain(n: int) -> FinitePoset:
    return FinitePoset(np.triu(np.ones((n, n), dtype=bool)), check=False)


def antichain(n: int) -> FinitePoset:
    return FinitePoset(np.eye(n, dtype=bool), check=False)


# lattice operations ---------------------------------------------------------

def meet(p: FinitePoset, a: int, b: int) -> int | None:
    """Greatest lower bound of ``a`` and ``b``, or None if there is none."""
    p._check_index(a, b)
    lb = np.flatnonzero(p.le[:, a] & p.le[:, b])
    return _greatest_of(p, lb)


def join(p: FinitePoset, a: int, b: int) -> int | None:
    p._check_index(a, b)
    ub = np.flatnonzero(p.le[a, :] & p.le[b, :])
    return _least_of(p, ub)


def _greatest_of(p: FinitePoset, idx: np.ndarray) -> int | None:
    if idx.size == 0:
        return None
    g = int(idx[np.argmax(p.down_size[idx])])
    return g if p.le[idx, g].all() else None


def _least_of(p: FinitePoset, idx: np.ndarray) -> int | None:
    if idx.size == 0:
        return None
    g = int(idx[np.argmax(p.up_size[idx])])
    return g if p.le[g, idx].all() else None


def meet_all(p: FinitePoset, xs: Sequence[int]) -> int | None:
    xs = list(xs)
    if not xs:
        raise ValueError("meet of an empty family")
    mask = np.logical_and.reduce([p.le[:, x] for x in xs])
    return _greatest_of(p, np.flatnonzero(mask))


def join_all(p: FinitePoset, xs: Sequence[int]) -> int | None:
    xs = list(xs)
    if not xs:
        raise ValueError("join of an empty family")
    mask = np.logical_and.reduce([p.le[x, :] for x in xs])
    return _least_of(p, np.flatnonzero(mask))


def meet_table(p: FinitePoset) -> np.ndarray:
    """``n x n`` table of pairwise meets, -1 where the meet does not exist.

    When ``a`` is not below ``b``, any meet of ``a`` and ``b`` lies below some
    lower cover ``c`` of ``a`` and is then the meet of ``c`` and ``b``. So the
    heaviest entry among the lower covers' rows is the only candidate, and it is
    accepted when its down-set equals the common down-set of ``a`` and ``b``.
    """
    n = p.size
    le = p.le
    out = np.full((n, n), -1, dtype=np.int64)
    if n == 0:
        return out
    weight = np.append(p.down_size.astype(np.int64), -1)  # weight[-1] for missing entries
    # row a of ``down`` is the bitset of elements <= a, packed into 64-bit words
    bits = np.packbits(le.T, axis=1)
    pad = (-bits.shape[1]) % 8
    down = np.ascontiguousarray(np.pad(bits, ((0, 0), (0, pad)))).view(np.uint64)
    for a in p.linear_extension:
        covers = p.lower_covers[a]
        if covers:
            rows = out[list(covers)]
            pick = np.argmax(weight[rows], axis=0)
            cand = rows[pick, np.arange(n)]
        else:
            cand = np.full(n, -1, dtype=np.int64)
        cand[le[a]] = a
        has = cand >= 0
        common = down[a] & down[has]
        ok = (common == down[cand[has]]).all(axis=1)
        idx = np.flatnonzero(has)[ok]
        out[a, idx] = cand[idx]
    return out


def join_table(p: FinitePoset) -> np.ndarray:
    return meet_table(p.dual())


def least_element(p: FinitePoset) -> int | None:
    hit = np.flatnonzero(p.le.all(axis=1))
    return int(hit[0]) if hit.size else None


def greatest_element(p: FinitePoset) -> int | None:
    hit = np.flatnonzero(p.le.all(axis=0))
    return int(hit[0]) if hit.size else None


def maximal_elements(p: FinitePoset) -> tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(~p.strict.any(axis=1)))


def minimal_elements(p: FinitePoset) -> tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(~p.strict.any(axis=0)))


def interval_indices(p: FinitePoset, a: int, b: int) -> tuple[int, ...]:
    p._check_index(a, b)
    if not p.le[a, b]:
        raise PosetError(f"interval [{a}, {b}] is empty: {a} is not <= {b}")
    return tuple(int(i) for i in np.flatnonzero(p.le[a, :] & p.le[:, b]))


def interval(p: FinitePoset, a: int, b: int) -> FinitePoset:
    """Induced subposet on ``{x : a <= x <= b}``, elements kept in original index order."""
    return p.induced(interval_indices(p, a, b))


def product(ps: Sequence[FinitePoset]) -> FinitePoset:
    """Cartesian product with componentwise order.

    Element ``(i_1, ..., i_r)`` sits at the row-major (mixed-radix) index.
    """
    ps = list(ps)
    if not ps:
        raise PosetError("product of an empty list of posets")
    le = reduce(np.kron, [q.le.astype(np.uint8) for q in ps]).astype(bool)
    labels = None
    if len(ps) > 1 or ps[0].labels is not None:
        labels = [",".join(parts) for parts in itertools.product(
            *[[q.label(i) for i in range(q.size)] for q in ps])]
        if len(ps) > 1:
            labels = [f"<{s}>" for s in labels]
    return FinitePoset(le, labels, check=False)


def product_index(sizes: Sequence[int], coords: Sequence[int]) -> int:
    idx = 0
    for s, c in zip(sizes, coords):
        idx = idx * s + c
    return idx


# folds, ranks, chains -------------------------------------------------------

class _Below(Mapping):
    """Read-only view of fold values on the strict down-set of one element."""

    def __init__(self, p: FinitePoset, x: int, values: list):
        self._p, self._x, self._values = p, x, values

    def __getitem__(self, y: int) -> Any:
        if not (0 <= y < self._p.size and self._p.strict[y, self._x]):
            raise KeyError(y)
        return self._values[y]

    def __iter__(self) -> Iterator[int]:
        return (int(y) for y in np.flatnonzero(self._p.strict[:, self._x]))

    def __len__(self) -> int:
        return int(self._p.down_size[self._x]) - 1


def well_founded_fold(p: FinitePoset, f: Callable[[int, Mapping[int, Any]], Any]) -> dict[int, Any]:
    """Evaluate ``f(x, below)`` for every element, smaller elements first.

    ``below`` maps each element strictly below ``x`` to its already computed
    value.
    """
    values: list = [None] * p.size
    for x in p.linear_extension:
        values[x] = f(x, _Below(p, x, values))
    return dict(enumerate(values))


def _longest_below(p: FinitePoset) -> np.ndarray:
    """Element count of a longest chain with top ``x``."""
    out = np.zeros(p.size, dtype=np.int64)
    lower = p.lower_covers
    for x in p.linear_extension:
        out[x] = 1 + max((out[y] for y in lower[x]), default=0)
    return out


def _longest_above(p: FinitePoset) -> np.ndarray:
    out = np.zeros(p.size, dtype=np.int64)
    upper = p.upper_covers
    for x in reversed(p.linear_extension):
        out[x] = 1 + max((out[y] for y in upper[x]), default=0)
    return out


def is_rank_function(p: FinitePoset, d: Sequence[int]) -> bool:
    """Check the three grading conditions for ``d`` literally.

    (i) d = 1 on minimal elements, (ii) x < y implies d(x) < d(y),
    (iii) y covers x iff x <= y and d(y) = d(x) + 1.
    """
    d = np.asarray(d, dtype=np.int64)
    if d.shape != (p.size,):
        return False
    mins = list(minimal_elements(p))
    if (d[mins] != 1).any():
        return False
    if (p.strict & ~(d[:, None] < d[None, :])).any():
        return False
    step = p.le & (d[None, :] == d[:, None] + 1)
    return bool(np.array_equal(step, p.cover_matrix))


def rank_function(p: FinitePoset) -> tuple[int, ...] | None:
    """The unique rank function of a graded poset, or None if ``p`` is not graded."""
    vals = well_founded_fold(
        p, lambda x, below: 1 + max((below[y] for y in p.lower_covers[x]), default=0))
    d = [vals[i] for i in range(p.size)]
    return tuple(d) if is_rank_function(p, d) else None


def height(p: FinitePoset) -> int:
    """Number of elements in a longest chain."""
    if p.size == 0:
        return 0
    return int(_longest_below(p).max())


# isomorphism ----------------------------------------------------------------

def _initial_invariants(p: FinitePoset) -> list[tuple]:
    below, above = _longest_below(p), _longest_above(p)
    return [(int(below[x]), int(above[x]), int(p.down_size[x]), int(p.up_size[x]),
             len(p.lower_covers[x]), len(p.upper_covers[x])) for x in range(p.size)]


def _renumber(sigs: list) -> list[int]:
    table = {s: i for i, s in enumerate(sorted(set(sigs)))}
    return [table[s] for s in sigs]


class _JointRefiner:
    """Colour refinement on the disjoint union of two cover graphs."""

    def __init__(self, p: FinitePoset, q: FinitePoset):
        n = p.size
        self.n = n
        self.ups = [list(u) for u in p.upper_covers] + [[n + v for v in u] for u in q.upper_covers]
        self.downs = [list(d) for d in p.lower_covers] + [[n + v for v in d] for d in q.lower_covers]

    def balanced(self, colors: list[int]) -> bool:
        n = self.n
        return sorted(colors[:n]) == sorted(colors[n:])

    def refine(self, colors: list[int]) -> list[int] | None:
        ncls = len(set(colors))
        while True:
            if not self.balanced(colors):
                return None
            sigs = [(colors[v], tuple(sorted(colors[u] for u in self.ups[v])),
                     tuple(sorted(colors[w] for w in self.downs[v]))) for v in range(2 * self.n)]
            new = _renumber(sigs)
            k = len(set(new))
            colors = new
            if k == ncls:
                return colors if self.balanced(colors) else None
            ncls = k


def search_order(p: FinitePoset) -> tuple[int, ...]:
    """Order in which the isomorphism search individualizes elements of ``p``.

    Sorted by (longest chain below, number of lower covers, number of upper
    covers, label, index).
    """
    below = _longest_below(p)
    return tuple(sorted(range(p.size), key=lambda x: (
        int(below[x]), len(p.lower_covers[x]), len(p.upper_covers[x]), p.label(x), x)))


def is_order_isomorphic(p: FinitePoset, q: FinitePoset) -> tuple[int, ...] | None:
    """Find an order isomorphism ``p -> q`` as a tuple ``phi[x]``, or None.

    Invariant pruning (size, chain profile, cover degrees) and joint colour
    refinement narrow the candidates; individualization with backtracking
    decides the rest. Elements of ``p`` are individualized in
    :func:`search_order` and candidates in ``q`` are tried by increasing
    index, so the bijection returned is the first one met in that
    deterministic search.
    """
    n = p.size
    if n != q.size:
        return None
    if n == 0:
        return ()
    if int(p.le.sum()) != int(q.le.sum()) or len(p.cover_pairs()) != len(q.cover_pairs()):
        return None
    inv_p, inv_q = _initial_invariants(p), _initial_invariants(q)
    if sorted(inv_p) != sorted(inv_q):
        return None
    refiner = _JointRefiner(p, q)
    order = search_order(p)

    def verify(colors: list[int]) -> tuple[int, ...] | None:
        where = {c: v - n for v, c in enumerate(colors[n:], start=n)}
        phi = np.array([where[colors[x]] for x in range(n)])
        if np.array_equal(q.le[np.ix_(phi, phi)], p.le):
            return tuple(int(v) for v in phi)
        return None

    def search(colors: list[int]) -> tuple[int, ...] | None:
        colors = refiner.refine(colors)
        if colors is None:
            return None
        counts: dict[int, int] = {}
        for c in colors[:n]:
            counts[c] = counts.get(c, 0) + 1
        pick = next((x for x in order if counts[colors[x]] > 1), None)
        if pick is None:
            return verify(colors)
        fresh = max(colors) + 1
        target = colors[pick]
        for y in range(n):
            if colors[n + y] != target:
                continue
            trial = list(colors)
            trial[pick] = trial[n + y] = fresh
            found = search(trial)
            if found is not None:
                return found
        return None

    return search(_renumber(inv_p + inv_q))


def is_order_isomorphism(p: FinitePoset, q: FinitePoset, phi: Sequence[int]) -> bool:
    phi = np.asarray(phi, dtype=int)
    if p.size != q.size or phi.shape != (p.size,) or len(set(phi.tolist())) != p.size:
        return False
    return bool(np.array_equal(q.le[np.ix_(phi, phi)], p.le))
