from __future__ import annotations

import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasetropical.cyclic import (
    CyclicPartition,
    StratumLabel,
    W_elements,
    build_W,
    label_leq,
    maximal_labels,
)
from phasetropical.pants import (
    PolygonError,
    PolygonPoint,
    arg_map,
    classify,
    closure_contains,
    closure_contains_geometric,
    complex_side_poset,
    cross,
    is_convex_circuit,
    to_svg,
    unit_direction,
    witness,
)
from phasetropical.poset import poset_isomorphic

P = CyclicPartition.parse
L = StratumLabel.parse


def float_classify(p: PolygonPoint) -> StratumLabel:
    """Classification through floating-point arguments, for cross-checking."""
    ang = [math.atan2(float(d[1]), float(d[0])) % (2 * math.pi) for d in arg_map(p)]
    groups: dict[float, list[int]] = {}
    for i, a in enumerate(ang):
        key = next((g for g in groups if abs(g - a) < 1e-9), a)
        groups.setdefault(key, []).append(i)
    blocks = [groups[g] for g in sorted(groups)]
    return StratumLabel(CyclicPartition(blocks), [i for i, e in enumerate(p.edges) if e != (0, 0)])


# -- points ----------------------------------------------------------------------


def test_classify_triangle():
    p = PolygonPoint([(1, 0), (F(-1, 2), 1), (F(-1, 2), -1)])
    assert classify(p) == L("(<{0}|{1}|{2}>, {0,1,2})")


def test_classify_degenerate_two_gon():
    p = PolygonPoint([(1, 0), (-1, 0), (0, 0)], {2: (-1, 0)})
    assert classify(p) == L("(<{0}|{1,2}>, {0,1})")
    assert arg_map(p) == ((1, 0), (-1, 0), (-1, 0))


def test_classify_convex_triangle():
    p = PolygonPoint([(1, 0), (0, 1), (-1, -1)])
    assert classify(p) == L("(<{0}|{1}|{2}>, {0,1,2})")
    assert is_convex_circuit(p)


def test_invalid_points():
    with pytest.raises(PolygonError):
        PolygonPoint([(1, 0), (0, 1), (0, 0)], {2: (1, 1)})
    with pytest.raises(PolygonError):
        PolygonPoint([(0, 0), (0, 0)], {0: (1, 0), 1: (-1, 0)})
    with pytest.raises(PolygonError):
        PolygonPoint([(1, 0), (-1, 0), (0, 0)])


def test_json_roundtrip():
    p = witness(maximal_labels(3)[1])
    q = PolygonPoint.from_json(p.to_json())
    assert q.edges == p.edges and q.directions == p.directions


def test_equivalence_under_rotation_and_scaling():
    p = witness(maximal_labels(3)[0])
    c = (F(3, 5), F(4, 5))
    rotated = PolygonPoint([(c[0] * x - c[1] * y, c[1] * x + c[0] * y) for x, y in p.edges])
    assert p.equivalent(rotated)
    assert not p.equivalent(witness(maximal_labels(3)[1]))


def test_unit_direction_is_unit():
    for t in [F(0), F(1, 3), F(-2), F(7, 5)]:
        x, y = unit_direction(t)
        assert x * x + y * y == 1


# -- witnesses -------------------------------------------------------------------


def test_two_gon_witness():
    p = witness(L("(<{0}|{1}>, {0,1})"))
    assert cross(p.edges[0], p.edges[1]) == 0
    assert p.edges[0][0] * p.edges[1][0] < 0


def test_witness_rejects_non_members():
    with pytest.raises(ValueError):
        witness(L("(<{0,1}|{2}>, {0,1})"))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_witness_roundtrip(n):
    for x in W_elements(n):
        p = witness(x)
        assert classify(p) == x
        assert float_classify(p) == x


def test_witness_roundtrip_sampled_n5():
    rng = random.Random(5)
    labels = list(W_elements(5))
    for x in rng.sample(labels, 300):
        assert classify(witness(x)) == x


@pytest.mark.parametrize("n", [2, 3, 4])
def test_maximal_witnesses_are_convex(n):
    for x in maximal_labels(n):
        assert is_convex_circuit(witness(x))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=2, max_size=5))
def test_classify_random_closed_circuits(sides):
    sides = [s for s in sides if s != (0, 0)]
    closing = (-sum(x for x, _ in sides), -sum(y for _, y in sides))
    edges = sides + [closing]
    zero = {i: (1, 1) for i, e in enumerate(edges) if e == (0, 0)}
    try:
        p = PolygonPoint(edges, zero)
    except PolygonError:
        return
    try:
        x = classify(p)
    except PolygonError:
        # e.g. all non-zero sides collinear with a zero side on a third direction
        return
    assert x.in_W() and x == float_classify(p)


# -- closure order ---------------------------------------------------------------


def test_closure_examples():
    top = L("(<{0}|{1}|{2}>, {0,1,2})")
    assert closure_contains(top, top)
    w = build_W(2)
    rank0 = [e for e in w.elements if e.rank == 0]
    assert len(rank0) == 6
    assert all(closure_contains(top, y) for y in rank0)
    other = L("(<{0}|{2}|{1}>, {0,1,2})")
    lower = L("(<{0}|{2}|{1}>, {0,1})")
    assert not closure_contains(top, other)
    assert closure_contains(other, lower)
    # (<{0}|{1,2}>, {0,1}) has 2 blocks and lies below both maximal cells
    assert closure_contains(top, L("(<{0}|{1,2}>, {0,1})"))


@pytest.mark.parametrize("n", [2, 3])
def test_geometric_closure_matches_W_order(n):
    labels = sorted(W_elements(n))
    rng = random.Random(n)
    pairs = [(a, b) for a in labels for b in labels if b.rank <= a.rank]
    if len(pairs) > 4000:
        pairs = rng.sample(pairs, 4000)
    for a, b in pairs:
        assert closure_contains_geometric(a, b) == label_leq(b, a), (a, b)


@pytest.mark.parametrize("n", [2, 3])
def test_complex_side_poset_is_W(n):
    p = complex_side_poset(n, geometric=True)
    assert poset_isomorphic(p, build_W(n)) is not None


def test_svg_export():
    svg = to_svg(witness(maximal_labels(3)[0]))
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<text") == 4


def test_collinear_sides_are_not_a_convex_polygon():
    p = PolygonPoint([(1, 0), (1, 0), (-1, 1), (-1, -1)])
    assert not is_convex_circuit(p)
    assert not is_convex_circuit(witness(L("(<{0}|{1}>, {0,1})")))
