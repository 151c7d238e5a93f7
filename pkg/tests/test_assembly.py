from __future__ import annotations

import json
import random
from fractions import Fraction as F
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasetropical.assembly import (
    CoefficientData,
    GluingError,
    check_single_simplex_is_W,
    cover_complex,
    deck_action_is_free,
    glue,
    lattice_counts,
    monodromy_order,
    monodromy_point,
    simplex_cover,
)
from phasetropical.cyclic import build_W
from phasetropical.exact import det
from phasetropical.poset import order_complex_homology, poset_isomorphic
from phasetropical.tropical import MarkedPolytope, regular_subdivision


def convex_lift(p):
    return p[0] ** 2 + p[1] ** 2 + F(1, 3) * p[0] * p[1]


# name -> (points, lifting); None means the strictly convex lift above
BATTERY = {
    "square": ([(0, 0), (1, 0), (0, 1), (1, 1)], {(0, 0): 0, (1, 0): 0, (0, 1): 0, (1, 1): 1}),
    "example": ([(0, 0), (1, 0), (0, 1), (2, 3)], {(0, 0): 0, (1, 0): 0, (0, 1): 0, (2, 3): 1}),
    "big-simplex": ([(0, 0), (2, 0), (0, 2)], None),
    "rectangle": ([(0, 0), (2, 0), (0, 1), (2, 1)], {(0, 0): 0, (2, 0): 0, (0, 1): 0, (2, 1): 1}),
    "hexagon": ([(1, 0), (2, 0), (2, 1), (1, 2), (0, 2), (0, 1), (1, 1)], None),
    "triangle3": ([(i, j) for i in range(4) for j in range(4) if i + j <= 3], None),
    "kite": ([(0, 0), (3, 1), (1, 3), (-1, -1)], {(0, 0): 0, (3, 1): 0, (1, 3): 0, (-1, -1): 1}),
}


def battery_input(name):
    pts, eta = BATTERY[name]
    return MarkedPolytope(pts), eta or {p: convex_lift(p) for p in pts}


def brute_lattice_points(points):
    """(interior, boundary) lattice points of the hull by scanning a box and
    testing against every edge of the hull."""
    from phasetropical.exact import convex_hull_facets

    facets = convex_hull_facets(points)
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    interior = boundary = 0
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            vals = [b - (a[0] * x + a[1] * y) for a, b in facets]
            if any(v < 0 for v in vals):
                continue
            if any(v == 0 for v in vals):
                boundary += 1
            else:
                interior += 1
    return interior, boundary


# -- simplex covers ----------------------------------------------------------------


def test_unimodular_simplex():
    d = simplex_cover([(0, 0), (1, 0), (0, 1)])
    assert d.degree == 1 and d.deck_group() == []


def test_example_simplex_has_cyclic_deck_group():
    d = simplex_cover([(1, 0), (0, 1), (2, 3)])
    assert d.degree == 4 and d.deck_group() == [4]
    assert len(d.translations) == 4


def test_doubled_simplex_has_klein_deck_group():
    d = simplex_cover([(0, 0), (2, 0), (0, 2)])
    assert d.degree == 4 and d.deck_group() == [2, 2]


def test_degenerate_simplex_rejected():
    with pytest.raises(ValueError):
        simplex_cover([(0, 0), (1, 1), (2, 2)])


def test_lower_dimensional_simplex():
    d = simplex_cover([(0, 0), (2, 2)])
    assert d.degree == 2 and not d.full_dimensional
    with pytest.raises(ValueError):
        cover_complex(d, [0, 0])


simplex_points = st.integers(2, 3).flatmap(
    lambda n: st.lists(st.tuples(*[st.integers(-3, 3)] * n), min_size=n + 1, max_size=n + 1))


@settings(max_examples=100, deadline=None)
@given(simplex_points)
def test_degree_is_normalized_volume(pts):
    diffs = [[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]
    if det(diffs) == 0:
        return
    d = simplex_cover(pts)
    assert d.degree == abs(det(diffs))
    prod = 1
    for f in d.deck:
        prod *= f
    assert prod == d.degree == len(d.translations)
    # the translations form a group mod 1
    group = set(d.translations)
    for g in d.translations:
        for h in d.translations:
            assert tuple((a + b) % 1 for a, b in zip(g, h)) in group


# -- cover complexes ------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3])
def test_trivial_cover_is_W(n):
    assert check_single_simplex_is_W(n)


def test_unimodular_cover_with_arguments_is_W():
    cx = cover_complex(simplex_cover([(0, 0), (1, 0), (0, 1)]), [F(1, 7), F(5, 3), F(2, 9)])
    assert poset_isomorphic(cx.cells, build_W(2)) is not None


def test_degree_four_cover():
    cx = cover_complex(simplex_cover([(1, 0), (0, 1), (2, 3)]), [F(3, 97), F(50, 97), F(11, 97)])
    assert cx.cells.f_vector() == [4 * 6, 4 * 9, 4 * 2]
    assert cx.euler() == -4
    assert deck_action_is_free(cx)
    # connected, so H_1 has rank 1 - chi
    assert order_complex_homology(cx.cells).betti == [1, 5]


def test_float_arguments_rejected():
    with pytest.raises(ValueError):
        cover_complex(simplex_cover([(0, 0), (1, 0), (0, 1)]), [0.5, 0, 0])
    with pytest.raises(ValueError):
        CoefficientData({(0, 0): 0}, {(0, 0): 0.25})


@pytest.mark.parametrize("seed", range(4))
def test_cover_euler_is_multiplicative(seed):
    rng = random.Random(seed)
    n = 2 + seed % 2
    while True:
        span = 2 if n == 2 else 1
        pts = [tuple(rng.randint(-span, span) for _ in range(n)) for _ in range(n + 1)]
        try:
            d = simplex_cover(pts)
            break
        except ValueError:
            continue
    cx = cover_complex(d, [F(rng.randrange(1, 194), 97) for _ in range(n + 1)])
    assert cx.euler() == d.degree * build_W(n).euler()
    assert deck_action_is_free(cx)
    for c in cx.cells.elements[:20]:
        for g in d.translations:
            assert cx.act(g, c) in cx.cells


# -- gluing ------------------------------------------------------------------------


def test_single_unit_simplex_glues_to_W():
    pts = [(0, 0), (1, 0), (0, 1)]
    g = glue(MarkedPolytope(pts), CoefficientData.generic(pts, {p: 0 for p in pts}))
    assert poset_isomorphic(g.cells, build_W(2)) is not None


def test_example_curve():
    mp, eta = battery_input("example")
    sub = regular_subdivision(mp, eta)
    assert sorted(sorted(c) for c in sub.maximal) == [[(0, 0), (0, 1), (1, 0)], [(0, 1), (1, 0), (2, 3)]]
    s = glue(mp, CoefficientData.generic(mp.points, eta, seed=0)).summary()
    assert (s["euler"], s["genus"], s["boundary_components"], s["degrees"]) == (-5, 1, 5, [1, 4])
    assert lattice_counts(mp) == (F(5, 2), 1, 5)


@pytest.mark.parametrize("name", sorted(BATTERY))
def test_curve_battery(name):
    mp, eta = battery_input(name)
    area, interior, boundary = lattice_counts(mp)
    assert (interior, boundary) == brute_lattice_points(mp.points)
    for seed in (0, 1):
        s = glue(mp, CoefficientData.generic(mp.points, eta, seed=seed)).summary()
        assert s["euler"] == -2 * area
        assert s["genus"] == interior and s["boundary_components"] == boundary
        assert sum(s["degrees"]) == 2 * area


def test_battery_mixes_unimodular_and_not():
    kinds = set()
    for name in BATTERY:
        mp, eta = battery_input(name)
        degs = glue(mp, CoefficientData.generic(mp.points, eta)).summary()["degrees"]
        kinds.add(all(d == 1 for d in degs))
    assert kinds == {True, False}


@pytest.mark.parametrize("name", ["example", "hexagon", "kite"])
def test_gluing_order_independent(name):
    mp, eta = battery_input(name)
    coeffs = CoefficientData.generic(mp.points, eta, seed=2)
    base = glue(mp, coeffs)
    k = len(base.simplices)
    orders = list(permutations(range(k)))
    for order in random.Random(0).sample(orders, min(4, len(orders))):
        assert poset_isomorphic(glue(mp, coeffs, order=order).cells, base.cells) is not None


def test_non_triangulation_rejected():
    pts = [(0, 0), (1, 0), (0, 1), (1, 1)]
    with pytest.raises(GluingError):
        glue(MarkedPolytope(pts), CoefficientData.generic(pts, {p: 0 for p in pts}))


def test_glued_json_is_stable():
    mp, eta = battery_input("example")
    coeffs = CoefficientData.generic(mp.points, eta, seed=0)
    a, b = glue(mp, coeffs).to_json(), glue(mp, coeffs).to_json()
    assert a == b and json.loads(a)["degrees"]


# -- monodromy ---------------------------------------------------------------------


def test_monodromy_examples():
    assert monodromy_point((0, 0), (F(1, 3), F(1, 5))) == ((0, 0), (F(1, 3), F(1, 5)))
    x = (F(1, 2), F(0))
    _, t = monodromy_point(x, (0, 0))
    assert t == (F(1, 2), 0)
    assert monodromy_point(x, t)[1] == (0, 0)


def test_monodromy_orbits_at_example_vertices():
    # the two vertices of the example tropical curve
    assert monodromy_order((F(0), F(0))) == 1
    assert monodromy_order((F(1, 4), F(1, 4))) == 4


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=12)


@settings(max_examples=100, deadline=None)
@given(st.lists(rationals, min_size=2, max_size=2), st.lists(rationals, min_size=2, max_size=2))
def test_monodromy_is_fibrewise_bijection_of_finite_order(x, theta):
    theta = tuple(t % 1 for t in theta)
    y, t = monodromy_point(x, theta)
    assert y == tuple(x)
    # inverse map
    assert tuple((a - b) % 1 for a, b in zip(t, x)) == theta
    q = monodromy_order(x)
    p = theta
    for _ in range(q):
        _, p = monodromy_point(x, p)
    assert p == theta
