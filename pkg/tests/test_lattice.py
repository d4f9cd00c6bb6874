import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ccposet.lattice import (BoundedLattice, NotALattice, complemented_pairs, complements_of,
                             factorize, find_splitting, is_directly_indecomposable,
                             same_factor_multiset)
from ccposet.partitions import Partition, csubalgebra_poset, transversal_complements
from ccposet.poset import (FinitePoset, chain, height, is_order_isomorphic, is_order_isomorphism,
                           product)

import oracles

POOL = {"chain2": lambda: chain(2), "chain3": lambda: chain(3),
        "pi3": lambda: csubalgebra_poset(3), "pi4": lambda: csubalgebra_poset(4)}


def lat(p):
    return BoundedLattice(p)


def test_rejects_non_lattice():
    p = FinitePoset.from_covers(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    with pytest.raises(NotALattice):
        BoundedLattice(p)


def test_bounds_and_tables():
    l = lat(csubalgebra_poset(4))
    for x in range(l.size):
        assert l.poset.leq(l.bottom, x) and l.poset.leq(x, l.top)
    for a, b in itertools.product(range(l.size), repeat=2):
        assert l.meet(a, b) == oracles.brute_meet(l.poset.le, a, b)
        assert l.join(a, b) == oracles.brute_join(l.poset.le, a, b)


def test_complements_of_bounds():
    l = lat(csubalgebra_poset(4))
    assert complements_of(l, l.bottom) == (l.top,)
    assert complements_of(l, l.top) == (l.bottom,)


def test_complements_in_pi3():
    p = csubalgebra_poset(3)
    l = lat(p)
    x = p.index_of("0,1|2")
    brute = tuple(y for y in range(p.size) if oracles.brute_meet(p.le, x, y) == l.bottom
                  and oracles.brute_join(p.le, x, y) == l.top)
    assert complements_of(l, x) == brute
    assert sorted(p.label(y) for y in brute) == ["0,2|1", "0|1,2"]
    assert {p.label(y) for y in brute} == {q.label() for q in transversal_complements(Partition.parse("0,1|2"))}


@pytest.mark.parametrize("n", [4, 5])
def test_transversal_complements_are_complements(n):
    p = csubalgebra_poset(n)
    l = lat(p)
    for x in range(p.size):
        q = Partition.parse(p.label(x))
        cs = complements_of(l, x)
        if x in (l.bottom, l.top):
            assert len(cs) == 1
            continue
        assert len(cs) >= 2
        for t in transversal_complements(q):
            assert p.index_of(t.label()) in cs


def test_indecomposable_small():
    assert is_directly_indecomposable(lat(chain(1)))
    assert is_directly_indecomposable(lat(chain(2)))
    assert not is_directly_indecomposable(lat(product([chain(2), chain(2)])))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_partition_lattice_indecomposable(n):
    assert is_directly_indecomposable(lat(csubalgebra_poset(n)))


def _unique_complement_only_at_bounds(l):
    return all((len(complements_of(l, x)) == 1) == (x in (l.bottom, l.top)) for x in range(l.size))


@pytest.mark.parametrize("name", ["pi3", "pi4", "chain2"])
def test_unique_complement_condition_implies_indecomposable(name):
    l = lat(POOL[name]())
    if _unique_complement_only_at_bounds(l):
        assert is_directly_indecomposable(l)


def test_chain3_is_indecomposable_without_complements():
    # the one-sided check says nothing here: middle has no complement at all
    l = lat(chain(3))
    assert complements_of(l, 1) == ()
    assert is_directly_indecomposable(l)


def test_factorize_one_point():
    assert factorize(lat(chain(1))).factors == ()


def test_factorize_pi3_itself():
    p = csubalgebra_poset(3)
    fac = factorize(lat(p))
    assert len(fac.factors) == 1
    assert is_order_isomorphic(fac.factors[0].poset, p) is not None


def test_factorize_pi2_times_pi3():
    a, b = csubalgebra_poset(2), csubalgebra_poset(3)
    fac = factorize(lat(product([a, b])))
    assert sorted(fac.heights) == [2, 3]
    assert same_factor_multiset([f.poset for f in fac.factors], [a, b])


def _check_factorization(l, fac):
    prod = fac.product_poset()
    phi = fac.product_map()
    assert is_order_isomorphism(l.poset, prod, phi)
    for f in fac.factors:
        assert is_directly_indecomposable(f)
    # an order isomorphism of lattices carries meets and joins
    pl = BoundedLattice(prod)
    for a, b in itertools.product(range(l.size), repeat=2):
        assert phi[l.meet(a, b)] == pl.meet(phi[a], phi[b])
        assert phi[l.join(a, b)] == pl.join(phi[a], phi[b])


@given(st.lists(st.sampled_from(sorted(POOL)), min_size=1, max_size=3).filter(
    lambda xs: np.prod([{"chain2": 2, "chain3": 3, "pi3": 5, "pi4": 15}[x] for x in xs]) <= 250),
    st.randoms(use_true_random=False))
def test_factor_multiset_independent_of_order(names, rnd):
    parts = [POOL[n]() for n in names]
    shuffled = parts[:]
    rnd.shuffle(shuffled)
    l1, l2 = lat(product(parts)), lat(product(shuffled))
    f1 = factorize(l1)
    f2 = factorize(l2, rng=random.Random(rnd.random()))
    _check_factorization(l1, f1)
    expected = [q for q in parts if q.size > 1]
    # chain3 is itself indecomposable, so the factors are exactly the inputs
    assert same_factor_multiset([f.poset for f in f1.factors], expected)
    assert same_factor_multiset([f.poset for f in f2.factors], expected)


def test_splitting_pairs_recompose():
    l = lat(product([chain(2), csubalgebra_poset(3)]))
    pair = find_splitting(l)
    assert pair is not None
    a, b = pair
    for x in range(l.size):
        assert l.join(l.meet(x, a), l.meet(x, b)) == x


def test_complemented_pairs_are_complements():
    l = lat(product([chain(2), chain(2)]))
    for a, b in complemented_pairs(l):
        assert l.meet(a, b) == l.bottom and l.join(a, b) == l.top


def test_heights_of_factors():
    fac = factorize(lat(product([csubalgebra_poset(4), chain(2)])))
    assert sorted(fac.heights) == [2, 4]
    assert sorted(height(f.poset) for f in fac.factors) == [2, 4]
