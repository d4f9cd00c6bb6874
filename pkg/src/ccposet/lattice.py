"""Bounded lattices, complements and direct-product factorization."""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .poset import (FinitePoset, PosetError, greatest_element, height, interval_indices,
                    is_order_isomorphic, join_table, least_element, meet_table,
                    product, product_index)


class NotALattice(PosetError):
    pass


class BoundedLattice:
    """A finite poset in which every pair has a meet and a join."""

    def __init__(self, poset: FinitePoset):
        if poset.size == 0:
            raise NotALattice("empty poset")
        bottom, top = least_element(poset), greatest_element(poset)
        if bottom is None or top is None:
            raise NotALattice("poset is not bounded")
        meets = meet_table(poset)
        if (meets < 0).any():
            a, b = map(int, np.argwhere(meets < 0)[0])
            raise NotALattice(f"elements {a} and {b} have no meet")
        joins = join_table(poset)
        if (joins < 0).any():
            a, b = map(int, np.argwhere(joins < 0)[0])
            raise NotALattice(f"elements {a} and {b} have no join")
        meets.setflags(write=False)
        joins.setflags(write=False)
        self.poset = poset
        self.bottom = bottom
        self.top = top
        self.meets = meets
        self.joins = joins

    @property
    def size(self) -> int:
        return self.poset.size

    def __repr__(self) -> str:
        return f"BoundedLattice(size={self.size})"

    def meet(self, a: int, b: int) -> int:
        return int(self.meets[a, b])

    def join(self, a: int, b: int) -> int:
        return int(self.joins[a, b])

    @cached_property
    def lower_interval_sizes(self) -> np.ndarray:
        return self.poset.down_size

    def lower_interval(self, a: int) -> tuple[BoundedLattice, tuple[int, ...]]:
        """The interval ``[bottom, a]`` with its element indices in ``self``."""
        idx = interval_indices(self.poset, self.bottom, a)
        return BoundedLattice(self.poset.induced(idx)), idx


def complements_of(lat: BoundedLattice, x: int) -> tuple[int, ...]:
    hit = (lat.meets[x] == lat.bottom) & (lat.joins[x] == lat.top)
    return tuple(int(y) for y in np.flatnonzero(hit))


def _splits(lat: BoundedLattice, a: int, b: int) -> bool:
    """Whether ``x -> (x^a, x^b)`` is an isomorphism onto ``[0,a] x [0,b]``."""
    le = lat.poset.le
    below_a = np.flatnonzero(le[:, a])
    below_b = np.flatnonzero(le[:, b])
    # inverse (p, q) -> p v q must land back on (p, q)
    pq = lat.joins[np.ix_(below_a, below_b)]
    if not (lat.meets[pq, a] == below_a[:, None]).all():
        return False
    if not (lat.meets[pq, b] == below_b[None, :]).all():
        return False
    every = np.arange(lat.size)
    back = lat.joins[lat.meets[every, a], lat.meets[every, b]]
    return bool((back == every).all())


def complemented_pairs(lat: BoundedLattice, rng: random.Random | None = None) -> list[tuple[int, int]]:
    """Nontrivial complemented pairs whose interval sizes multiply to ``|lat|``.

    Sorted by increasing ``|[0, a]|`` then by index; shuffled instead when
    ``rng`` is given.
    """
    n = lat.size
    sizes = lat.lower_interval_sizes
    pairs = []
    for a in range(n):
        sa = int(sizes[a])
        if a in (lat.bottom, lat.top) or n % sa:
            continue
        for b in complements_of(lat, a):
            if int(sizes[b]) * sa == n:
                pairs.append((a, b))
    pairs.sort(key=lambda ab: (int(sizes[ab[0]]), ab[0], ab[1]))
    if rng is not None:
        rng.shuffle(pairs)
    return pairs


def find_splitting(lat: BoundedLattice, rng: random.Random | None = None) -> tuple[int, int] | None:
    for a, b in complemented_pairs(lat, rng):
        if _splits(lat, a, b):
            return a, b
    return None


def is_directly_indecomposable(lat: BoundedLattice) -> bool:
    if lat.size <= 2:
        return True
    return find_splitting(lat) is None


@dataclass(frozen=True)
class Factorization:
    """Directly indecomposable factors and the coordinate map into their product.

    ``iso[x]`` gives, for element ``x`` of the factored lattice, its index in
    each factor. One-point factors are omitted.
    """

    factors: tuple[BoundedLattice, ...]
    iso: tuple[tuple[int, ...], ...]

    @property
    def heights(self) -> tuple[int, ...]:
        return tuple(height(f.poset) for f in self.factors)

    def product_poset(self) -> FinitePoset:
        if not self.factors:
            return FinitePoset(np.ones((1, 1), dtype=bool), check=False)
        return product([f.poset for f in self.factors])

    def product_map(self) -> tuple[int, ...]:
        """``iso`` flattened to indices of :meth:`product_poset`."""
        sizes = [f.size for f in self.factors]
        return tuple(product_index(sizes, c) for c in self.iso)


def factorize(lat: BoundedLattice, rng: random.Random | None = None) -> Factorization:
    """Split ``lat`` into directly indecomposable factors.

    Each accepted complemented pair ``(a, b)`` splits ``lat`` as
    ``[0, a] x [0, b]``; both halves are factored recursively. The resulting
    factor multiset does not depend on which valid pair is taken.
    """
    if lat.size == 1:
        return Factorization((), ((),))
    pair = find_splitting(lat, rng)
    if pair is None:
        return Factorization((lat,), tuple((x,) for x in range(lat.size)))
    a, b = pair
    la, idx_a = lat.lower_interval(a)
    lb, idx_b = lat.lower_interval(b)
    fa, fb = factorize(la, rng), factorize(lb, rng)
    pos_a = {v: i for i, v in enumerate(idx_a)}
    pos_b = {v: i for i, v in enumerate(idx_b)}
    iso = tuple(fa.iso[pos_a[lat.meet(x, a)]] + fb.iso[pos_b[lat.meet(x, b)]]
                for x in range(lat.size))
    return Factorization(fa.factors + fb.factors, iso)


def same_factor_multiset(xs: Sequence[FinitePoset], ys: Sequence[FinitePoset]) -> bool:
    """Whether two lists of posets agree up to permutation and isomorphism."""
    if len(xs) != len(ys):
        return False
    left = list(ys)
    for x in xs:
        for i, y in enumerate(left):
            if is_order_isomorphic(x, y) is not None:
                del left[i]
                break
        else:
            return False
    return True
