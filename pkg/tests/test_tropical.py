from __future__ import annotations

import json
import random
from fractions import Fraction as F
from itertools import combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasetropical.exact import affine_rank, convex_hull_facets, solve
from phasetropical.tropical import (
    MarkedPolytope,
    TropCone,
    check_subdivision_axioms,
    compact_face_contains,
    curve_svg,
    face_P,
    lattice_M_index,
    lattice_N_of_A,
    lower_hull_oracle,
    moment_mu,
    moment_simplex,
    normalized_volume,
    regular_subdivision,
    trop_hyperplane_fan,
    tropical_hypersurface,
    tropical_value,
)

EXAMPLE = [(0, 0), (1, 0), (0, 1), (2, 3)]
EXAMPLE_ETA = {(0, 0): 0, (1, 0): 0, (0, 1): 0, (2, 3): 1}
SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]


def hull_area2(points) -> F:
    """Twice the area of the convex hull (monotone chain plus shoelace)."""
    pts = sorted(set(points))

    def half(seq):
        out = []
        for q in seq:
            while len(out) >= 2 and (out[-1][0] - out[-2][0]) * (q[1] - out[-2][1]) - (out[-1][1] - out[-2][1]) * (q[0] - out[-2][0]) <= 0:
                out.pop()
            out.append(q)
        return out[:-1]

    hull = half(pts) + half(reversed(pts))
    return abs(sum(F(a[0] * b[1] - a[1] * b[0]) for a, b in zip(hull, hull[1:] + hull[:1])))


def cells(sub):
    return sorted(sorted(c) for c in sub.maximal)


def brute_vertices(points, eta):
    """Points of R^2 where at least three monomials attain the maximum."""
    out = set()
    for a, b, c in combinations(points, 3):
        rows = [[b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]]
        rhs = [F(eta[b] - eta[a]), F(eta[c] - eta[a])]
        x = solve(rows, rhs)
        if x is None:
            continue
        _, arg = tropical_value(points, eta, x)
        if {a, b, c} <= arg:
            out.add(tuple(x))
    return out


# -- subdivisions ----------------------------------------------------------------


def test_flat_square_is_one_cell():
    sub = regular_subdivision(MarkedPolytope(SQUARE), {p: 0 for p in SQUARE})
    assert cells(sub) == [sorted(SQUARE)]
    assert not sub.is_triangulation


def test_lifted_corner_splits_square():
    eta = {(0, 0): 0, (1, 0): 0, (0, 1): 0, (1, 1): 1}
    sub = regular_subdivision(MarkedPolytope(SQUARE), eta)
    assert cells(sub) == [[(0, 0), (0, 1), (1, 0)], [(0, 1), (1, 0), (1, 1)]]
    assert sub.is_triangulation


def test_example_subdivision():
    mp = MarkedPolytope(EXAMPLE)
    sub = regular_subdivision(mp, EXAMPLE_ETA)
    assert cells(sub) == [[(0, 0), (0, 1), (1, 0)], [(0, 1), (1, 0), (2, 3)]]
    assert sub.is_triangulation
    assert sorted(sorted(c) for c in lower_hull_oracle(mp, EXAMPLE_ETA)) == cells(sub)
    assert check_subdivision_axioms(sub)
    assert [normalized_volume(sorted(c)) for c in sorted(sub.maximal, key=sorted)] == [1, 4]


def test_subdivision_json():
    sub = regular_subdivision(MarkedPolytope(EXAMPLE), EXAMPLE_ETA)
    data = json.loads(sub.to_json())
    assert data["triangulation"] is True and len(data["maximal"]) == 2


point_sets = st.sets(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=3, max_size=7)


@settings(max_examples=40, deadline=None)
@given(point_sets, st.randoms(use_true_random=False))
def test_subdivision_matches_lower_hull_oracle(pts, rnd):
    pts = sorted(pts)
    if affine_rank(pts) < 2:
        return
    mp = MarkedPolytope(pts)
    eta = {p: F(rnd.randrange(0, 7)) for p in pts}
    sub = regular_subdivision(mp, eta)
    assert sorted(sorted(c) for c in sub.maximal) == sorted(sorted(c) for c in lower_hull_oracle(mp, eta))
    assert check_subdivision_axioms(sub)
    # areas of the maximal cells add up to the area of Q
    assert sum(hull_area2(c) for c in sub.maximal) == hull_area2(pts)
    if sub.is_triangulation:
        assert sum(normalized_volume(sorted(c)) for c in sub.maximal) == hull_area2(pts)


@settings(max_examples=30, deadline=None)
@given(st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1)), min_size=4, max_size=7),
       st.randoms(use_true_random=False))
def test_three_dimensional_subdivisions(pts, rnd):
    pts = sorted(pts)
    if affine_rank(pts) < 3:
        return
    mp = MarkedPolytope(pts)
    eta = {p: F(rnd.randrange(0, 9)) for p in pts}
    sub = regular_subdivision(mp, eta)
    assert sorted(sorted(c) for c in sub.maximal) == sorted(sorted(c) for c in lower_hull_oracle(mp, eta))


# -- tropical hypersurfaces ----------------------------------------------------------


def test_example_curve():
    model = tropical_hypersurface(MarkedPolytope(EXAMPLE), EXAMPLE_ETA)
    assert len(model.vertices) == 2
    assert len(model.bounded_edges()) == 1
    assert len(model.rays()) == 4
    assert model.check_duality()
    assert {f.vertices[0] for f in model.vertices} == brute_vertices(EXAMPLE, EXAMPLE_ETA)
    assert {f.vertices[0] for f in model.vertices} == {(0, 0), (F(1, 4), F(1, 4))}


def test_single_point_is_empty():
    assert tropical_hypersurface(MarkedPolytope([(0, 0)]), {(0, 0): 0}).faces == {}


@pytest.mark.parametrize("n", [2, 3])
def test_simplex_gives_tropical_hyperplane(n):
    pts = [tuple(0 for _ in range(n))] + [tuple(int(i == j) for j in range(n)) for i in range(n)]
    model = tropical_hypersurface(MarkedPolytope(pts), {p: 0 for p in pts})
    for cell, face in model.faces.items():
        idx = frozenset(0 if sum(p) == 0 else p.index(1) + 1 for p in cell)
        x = face.interior_point()
        assert TropCone(n, idx).contains((0, *x))
        assert face.dim == n + 1 - len(idx)


@settings(max_examples=40, deadline=None)
@given(point_sets, st.randoms(use_true_random=False))
def test_triangulation_counts(pts, rnd):
    pts = sorted(pts)
    if affine_rank(pts) < 2:
        return
    mp = MarkedPolytope(pts)
    eta = {p: F(rnd.randrange(0, 50)) for p in pts}
    sub = regular_subdivision(mp, eta)
    model = tropical_hypersurface(mp, eta, sub)
    assert model.check_duality()
    assert len(model.vertices) == len(sub.maximal)
    assert len(model.bounded_edges()) == len(sub.interior_cells(1))
    if sub.is_triangulation:
        assert {f.vertices[0] for f in model.vertices} == brute_vertices(pts, eta)


def test_curve_svg():
    svg = curve_svg(tropical_hypersurface(MarkedPolytope(EXAMPLE), EXAMPLE_ETA))
    assert svg.startswith("<svg") and svg.count("<line") == 5


# -- tropical hyperplane fan -----------------------------------------------------------


def test_cone_examples():
    c = TropCone(2, frozenset({0, 1}))
    assert c.dim == 1
    assert c.contains((0, 0, -1)) and not c.contains((0, 0, 1))
    top = TropCone(3, frozenset(range(4)))
    assert top.dim == 0 and top.contains((0, 0, 0, 0))


def test_face_needs_two_indices():
    with pytest.raises(ValueError):
        face_P(2, {0}, {0, 1})


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_compact_face_dimensions(n):
    fan = trop_hyperplane_fan(n)
    for (i, ip), face in fan.faces.items():
        assert face.dim == len(ip) - len(i)
        free = sum(1 for lo, hi in face.box() if lo != hi)
        assert free == face.dim


@pytest.mark.parametrize("n", [2, 3])
def test_compact_face_incidence(n):
    fan = trop_hyperplane_fan(n)
    for (i, ip), a in fan.faces.items():
        u = a.interior_point()
        assert a.label_of(u) == (i, ip)
        for (k, kp), b in fan.faces.items():
            expected = k <= i and ip <= kp
            assert compact_face_contains(b, a) == expected
            assert b.closure_contains_point(u) == expected


# -- moment maps and lattices -------------------------------------------------------------


def test_moment_examples():
    assert moment_simplex([1, 1, 1]) == (F(1, 3),) * 3
    assert moment_simplex([3, 1, 1]) == (F(3, 5), F(1, 5), F(1, 5))
    assert moment_mu(MarkedPolytope(EXAMPLE), {a: 1 for a in EXAMPLE}) == (F(3, 4), F(1))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(min_value=F(1, 100), max_value=100), min_size=4, max_size=4))
def test_moment_map_lands_in_interior(ws):
    mp = MarkedPolytope(EXAMPLE)
    mu = moment_mu(mp, dict(zip(EXAMPLE, ws)))
    assert sum(moment_simplex(ws)) == 1 and all(x > 0 for x in moment_simplex(ws))
    # strictly inside Q
    for normal, b in convex_hull_facets(EXAMPLE):
        assert sum(a * x for a, x in zip(normal, mu)) < b


def test_lattice_examples():
    assert lattice_N_of_A(MarkedPolytope(EXAMPLE)) == []
    assert lattice_N_of_A(MarkedPolytope([(0, 0), (1, 0)])) == [(0, 1)]
    n = lattice_N_of_A(MarkedPolytope([(0, 0), (2, 2)]))
    assert len(n) == 1 and n[0] in ((1, -1), (-1, 1))
    assert lattice_M_index(MarkedPolytope([(0, 0), (2, 2)])) == 2
    assert lattice_M_index(MarkedPolytope(EXAMPLE)) == 1


def test_lattice_N_vanishes_on_differences():
    rng = random.Random(0)
    for _ in range(50):
        pts = sorted({tuple(rng.randint(-3, 3) for _ in range(3)) for _ in range(rng.randint(2, 3))})
        if len(pts) < 2:
            continue
        basis = lattice_N_of_A(MarkedPolytope(pts))
        diffs = [[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]
        assert all(sum(x * y for x, y in zip(d, v)) == 0 for d in diffs for v in basis)
        assert len(basis) == 3 - affine_rank(pts)
        # brute force: every small integer kernel vector is an integer combination
        for v in product(range(-2, 3), repeat=3):
            if all(sum(x * y for x, y in zip(d, v)) == 0 for d in diffs) and basis:
                coeffs = solve([list(col) for col in zip(*basis)], list(v))
                assert coeffs is not None and all(c.denominator == 1 for c in coeffs)
