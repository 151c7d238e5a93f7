from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations, product
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasetropical.coamoeba import cyclic_partition_of
from phasetropical.cyclic import (
    CyclicPartition,
    StratumLabel,
    W_lower_interval,
    build_W,
    enumerate_cyclic_partitions,
    induced_partition,
    label_leq,
    maximal_labels,
    refines,
)
from phasetropical.poset import all_intervals_boolean

P = CyclicPartition.parse


def stirling2(n: int, k: int) -> int:
    return sum((-1) ** i * factorial(k) // (factorial(i) * factorial(k - i)) * (k - i) ** n for i in range(k + 1)) // factorial(k)


def brute_cyclic_partitions(n: int) -> set[tuple]:
    """Every weak order on {0..n} read as a necklace of blocks, up to rotation."""
    out = set()
    for levels in product(range(n + 1), repeat=n + 1):
        used = sorted(set(levels))
        if used != list(range(len(used))):
            continue
        blocks = [frozenset(i for i, l in enumerate(levels) if l == v) for v in used]
        rots = [tuple(blocks[s:] + blocks[:s]) for s in range(len(blocks))]
        out.add(next(r for r in rots if 0 in r[0]))
    return out


def realize(sigma: CyclicPartition) -> list[Fraction]:
    """Angles with block s at 2s/k (in units of pi)."""
    k = sigma.k
    th = [Fraction(0)] * (max(sigma.ground) + 1)
    for s, b in enumerate(sigma.blocks):
        for i in b:
            th[i] = Fraction(2 * s, k)
    return th


def nearby_partitions(a: CyclicPartition) -> set[CyclicPartition]:
    """Cyclic partitions realized by small perturbations of a realization of a."""
    phi = realize(a)
    n = len(phi) - 1
    eps = Fraction(1, 1000)
    return {cyclic_partition_of([p + eps * d for p, d in zip(phi, ds)])
            for ds in product(range(n + 1), repeat=n + 1)}


# -- cyclic partitions -------------------------------------------------------------


def test_enumerate_small_cases():
    assert [str(s) for s in enumerate_cyclic_partitions(0)] == ["<{0}>"]
    assert sorted(str(s) for s in enumerate_cyclic_partitions(1)) == ["<{0,1}>", "<{0}|{1}>"]
    assert len(enumerate_cyclic_partitions(2)) == 6


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_enumerate_matches_brute_force(n):
    got = enumerate_cyclic_partitions(n)
    assert len(got) == len(set(got))
    assert {s.blocks for s in got} == brute_cyclic_partitions(n)
    assert len(got) == sum(stirling2(n + 1, k) * factorial(k - 1) for k in range(1, n + 2))


def test_canonical_rotation():
    s = CyclicPartition([[2], [3, 4], [0, 1]])
    assert str(s) == "<{0,1}|{2}|{3,4}>"
    assert CyclicPartition(s.blocks) == s
    assert P(str(s)) == s


def test_invalid_partitions():
    with pytest.raises(ValueError):
        CyclicPartition([])
    with pytest.raises(ValueError):
        CyclicPartition([[0, 1], [1]])
    with pytest.raises(ValueError):
        CyclicPartition([[0], []])


@settings(max_examples=50, deadline=None)
@given(st.permutations(range(5)), st.integers(0, 4))
def test_rotation_does_not_change_partition(order, r):
    blocks = [[x] for x in order]
    assert CyclicPartition(blocks) == CyclicPartition(blocks[r:] + blocks[:r])


# -- refinement ------------------------------------------------------------------


def test_refines_examples():
    s = P("<{0,1}|{2}>")
    assert refines(s, s)
    assert refines(P("<{0,1}|{2}>"), P("<{0}|{1}|{2}>"))
    # for four points, 0 and 2 are not neighbours in <0,1,2,3>
    assert not refines(P("<{0,2}|{1}|{3}>"), P("<{0}|{1}|{2}|{3}>"))


def test_three_cycle_merges_wrap_around():
    # in a 3-cycle every pair of blocks is consecutive
    assert refines(P("<{0,2}|{1}>"), P("<{0}|{1}|{2}>"))
    assert P("<{0,2}|{1}>") in nearby_partitions(P("<{0,2}|{1}>"))
    assert P("<{0}|{1}|{2}>") in nearby_partitions(P("<{0,2}|{1}>"))


def test_refines_ground_mismatch():
    with pytest.raises(ValueError):
        refines(P("<{0}|{1}>"), P("<{0}|{1}|{2}>"))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_refines_matches_perturbation_oracle(n):
    parts = enumerate_cyclic_partitions(n)
    for a in parts:
        near = nearby_partitions(a)
        for b in parts:
            assert refines(a, b) == (b in near), (a, b)


@pytest.mark.parametrize("n", [2, 3])
def test_refines_is_partial_order(n):
    parts = enumerate_cyclic_partitions(n)
    for a in parts:
        assert refines(a, a)
        for b in parts:
            if a != b and refines(a, b):
                assert not refines(b, a)
                for c in parts:
                    if refines(b, c):
                        assert refines(a, c)


def test_coarsenings_are_the_refined_partitions():
    for s in enumerate_cyclic_partitions(3):
        assert set(s.coarsenings()) == {a for a in enumerate_cyclic_partitions(3) if refines(a, s)}


# -- induced partitions -------------------------------------------------------------


def test_induced_partition_examples():
    assert induced_partition(P("<{0}|{1}|{2}>"), {0, 1, 2}) == P("<{0}|{1}|{2}>")
    assert induced_partition(P("<{0}|{1}|{2}|{3}>"), {1, 3}) == P("<{1}|{3}>")
    assert induced_partition(P("<{0,1}|{2}|{3,4}>"), {0, 2, 3}) == P("<{0}|{2}|{3}>")


def test_induced_partition_empty_j():
    with pytest.raises(ValueError):
        induced_partition(P("<{0}|{1}>"), set())


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.sampled_from(enumerate_cyclic_partitions(n)),
    st.sets(st.integers(0, n), min_size=1))))
def test_induced_partition_matches_restricted_configuration(case):
    sigma, j = case
    th = realize(sigma)
    order = sorted(j)
    assert induced_partition(sigma, j) == CyclicPartition(
        [[order[i] for i in b] for b in cyclic_partition_of([th[x] for x in order]).blocks])


# -- the poset W -----------------------------------------------------------------


def test_stratum_label_text_roundtrip():
    x = StratumLabel(P("<{0,1}|{2}|{3,4}>"), {0, 2, 3})
    assert str(x) == "(<{0,1}|{2}|{3,4}>, {0,2,3})"
    assert StratumLabel.parse(str(x)) == x
    assert x.in_W() and x.rank == 2


def test_membership_requires_two_blocks():
    assert not StratumLabel(P("<{0,1}|{2}>"), {0, 1}).in_W()
    assert not StratumLabel(P("<{0,1,2}>"), {0, 1, 2}).in_W()


def test_W1_single_point():
    w = build_W(1)
    assert [str(e) for e in w.elements] == ["(<{0}|{1}>, {0,1})"]
    assert w.rank == [0]


def test_W2_hand_count():
    w = build_W(2)
    assert w.f_vector() == [6, 9, 2]
    assert w.euler() == -1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_W_structure(n):
    w = build_W(n)
    assert all(w.rank_of(e) == e.sigma.k + len(e.j) - 4 >= 0 for e in w.elements)
    tops = w.maximal()
    assert len(tops) == factorial(n)
    assert all(w.rank_of(t) == 2 * n - 2 for t in tops)
    assert sorted(tops) == sorted(maximal_labels(n))
    assert w.euler() == (-1) ** (n - 1)
    assert all_intervals_boolean(w)[0]


def test_W_order_is_label_order():
    w = build_W(3)
    els = w.elements
    for a in els[::7]:
        for b in els[::5]:
            assert w.leq(a, b) == label_leq(a, b)


def test_W_lower_interval_agrees_with_W():
    w = build_W(3)
    x = maximal_labels(3)[2]
    sub = W_lower_interval(x)
    assert set(sub.elements) == {w.elements[i] for i in w.down_set(x)}


def test_euler_by_inclusion_exclusion():
    # chi of CP^{n-1} minus n+1 generic hyperplanes is (-1)^{n-1}; brute force by
    # summing over the flats: each nonempty intersection of k < n hyperplanes is a
    # CP^{n-1-k} with chi = n-k
    for n in range(2, 6):
        chi = sum((-1) ** k * len(list(combinations(range(n + 1), k))) * (n - k) for k in range(n))
        assert chi == (-1) ** (n - 1) == build_W(n).euler()


def test_maximal_labels_are_full_orders():
    for x in maximal_labels(4):
        assert x.sigma.is_full() and x.j == frozenset(range(5))
    assert len({x.sigma for x in maximal_labels(4)}) == 24
    assert all(p[0] == 0 for p in (tuple(min(b) for b in x.sigma.blocks) for x in maximal_labels(3)))
    assert len(set(permutations(range(1, 4)))) == len(maximal_labels(3))
