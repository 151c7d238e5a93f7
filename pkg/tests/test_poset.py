from __future__ import annotations

import json
import random
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasetropical.cyclic import W_lower_interval, build_W, maximal_labels
from phasetropical.poset import (
    FacePoset,
    PolyhedralComplexAbstract,
    all_intervals_boolean,
    boundary_poset,
    greedy_collapse,
    is_boolean_interval,
    lower_interval,
    order_complex_homology,
    poset_isomorphic,
    relabel,
    sphere_betti,
)


def simplicial_poset(facets) -> FacePoset:
    """Face poset of the simplicial complex generated by ``facets``."""
    faces = set()
    for f in facets:
        f = tuple(sorted(f))
        for r in range(1, len(f) + 1):
            faces.update(combinations(f, r))
    faces = sorted(faces, key=lambda s: (len(s), s))
    covers = [(s[:i] + s[i + 1:], s) for s in faces if len(s) > 1 for i in range(len(s))]
    return FacePoset(faces, covers, rank=lambda s: len(s) - 1)


def polygon_poset(k: int) -> FacePoset:
    """Face lattice of a k-gon without the empty face."""
    verts = [("v", i) for i in range(k)]
    edges = [("e", i) for i in range(k)]
    covers = [(("v", i), ("e", i)) for i in range(k)] + [(("v", (i + 1) % k), ("e", i)) for i in range(k)]
    covers += [(e, "top") for e in edges]
    return FacePoset(verts + edges + ["top"], covers, rank=lambda x: 2 if x == "top" else (0 if x[0] == "v" else 1))


def with_bottom(p: FacePoset) -> FacePoset:
    els = ["bot"] + list(p.elements)
    covers = [("bot", m) for m in p.minimal()] + list(p.covers())
    rk = {"bot": 0}
    rk.update({e: p.rank[i] + 1 for i, e in enumerate(p.elements)})
    return FacePoset(els, covers, rank=rk)


def hasse_graph(p: FacePoset) -> nx.DiGraph:
    g = nx.DiGraph()
    for i, e in enumerate(p.elements):
        g.add_node(i, rank=p.rank[i])
    g.add_edges_from((p.index[a], p.index[b]) for a, b in p.covers())
    return g


def nx_isomorphic(a: FacePoset, b: FacePoset) -> bool:
    return nx.is_isomorphic(hasse_graph(a), hasse_graph(b), node_match=lambda x, y: x["rank"] == y["rank"])


# -- construction ------------------------------------------------------------


def test_cover_must_raise_rank_by_one():
    with pytest.raises(ValueError):
        FacePoset(["a", "b"], [("a", "b")], rank={"a": 0, "b": 2})


def test_unknown_cover_element_rejected():
    with pytest.raises(ValueError):
        FacePoset(["a"], [("a", "z")])


def test_cycle_rejected():
    with pytest.raises(ValueError):
        FacePoset(["a", "b"], [("a", "b"), ("b", "a")], graded=False)


def test_json_roundtrip_format():
    p = polygon_poset(4)
    data = json.loads(p.to_json())
    assert set(data) == {"elements", "covers"}
    assert all(set(e) == {"id", "rank"} for e in data["elements"])
    q = FacePoset.from_json(p.to_json())
    assert q.f_vector() == p.f_vector()
    assert poset_isomorphic(p, q) is not None


def test_dot_export_mentions_every_cover():
    p = polygon_poset(3)
    dot = p.to_dot("tri")
    assert dot.startswith("digraph")
    assert dot.count("->") == len(list(p.covers()))


# -- intervals ---------------------------------------------------------------


def test_lower_interval_of_chain():
    p = FacePoset(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert set(lower_interval(p, "b").elements) == {"a", "b"}


def test_lower_interval_unknown_element():
    p = FacePoset(["a"], [])
    with pytest.raises((KeyError, ValueError)):
        lower_interval(p, "zz")


def test_hexagon_intervals_n2():
    for x in maximal_labels(2):
        assert W_lower_interval(x).f_vector() == [6, 6, 1]


def test_n3_maximal_intervals_vertices_and_facets():
    for x in maximal_labels(3):
        f = W_lower_interval(x).f_vector()
        assert f[0] == 20 and f[-2] == 8


def test_boolean_trivial_interval():
    p = polygon_poset(5)
    assert is_boolean_interval(p, ("v", 0), ("v", 0))


def test_pentagon_is_not_boolean():
    p = with_bottom(polygon_poset(5))
    assert not is_boolean_interval(p, "bot", "top")
    ok, bad = all_intervals_boolean(p)
    assert not ok and bad is not None


def test_square_with_bottom_is_not_boolean_but_triangle_is():
    assert not is_boolean_interval(with_bottom(polygon_poset(4)), "bot", "top")
    assert is_boolean_interval(with_bottom(polygon_poset(3)), "bot", "top")


def test_incomparable_pair_is_error():
    p = polygon_poset(4)
    with pytest.raises(ValueError):
        is_boolean_interval(p, ("v", 0), ("v", 1))


def test_random_comparable_pairs_of_W3_are_boolean():
    w = build_W(3)
    rng = random.Random(3)
    for _ in range(200):
        y = rng.choice(w.elements)
        x = rng.choice(sorted(w.down_set(y)))
        x = w.elements[x]
        assert is_boolean_interval(w, x, y)
        assert len(w.interval_indices(x, y)) == 2 ** (w.rank_of(y) - w.rank_of(x))


# -- homology ----------------------------------------------------------------


def test_empty_poset_homology():
    h = order_complex_homology(FacePoset([], []))
    assert h.betti == [] and h.euler == 0


def test_hexagon_boundary_is_circle():
    p = polygon_poset(6)
    h = order_complex_homology(boundary_poset(p, "top"))
    assert h.betti == [1, 1] == sphere_betti(1)
    assert h.cells == [12, 12]


def test_W2_cell_boundary_is_circle():
    x = maximal_labels(2)[0]
    h = order_complex_homology(boundary_poset(build_W(2), x))
    assert h.betti == sphere_betti(1)


def test_closed_cell_is_contractible():
    h = order_complex_homology(polygon_poset(7))
    assert h.betti == [1]


def test_rational_and_mod2_agree_on_sphere():
    # boundary of the 3-simplex
    p = simplicial_poset(list(combinations(range(4), 3)))
    assert order_complex_homology(p).betti == [1, 0, 1]
    assert order_complex_homology(p, "F2").betti == [1, 0, 1]


def test_projective_plane_torsion():
    # minimal six-vertex triangulation of RP^2: H1 = Z/2, invisible over Q
    rp2 = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1), (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]
    p = simplicial_poset(rp2)
    assert order_complex_homology(p).betti == [1]
    assert order_complex_homology(p, "F2").betti == [1, 1, 1]


def test_unknown_field():
    with pytest.raises(ValueError):
        order_complex_homology(polygon_poset(3), "Z7")


random_complexes = st.lists(
    st.lists(st.integers(0, 6), min_size=1, max_size=4, unique=True), min_size=1, max_size=6)


@settings(max_examples=40, deadline=None)
@given(random_complexes)
def test_euler_of_order_complex_matches_rank_sum(facets):
    p = simplicial_poset(facets)
    h = order_complex_homology(p)
    assert h.euler == p.euler() == sum((-1) ** d * c for d, c in enumerate(p.f_vector()))
    assert h.euler == sum((-1) ** d * b for d, b in enumerate(h.betti))


@settings(max_examples=40, deadline=None)
@given(random_complexes)
def test_betti_zero_counts_components(facets):
    p = simplicial_poset(facets)
    g = nx.Graph()
    for f in facets:
        g.add_nodes_from(f)
        g.add_edges_from(combinations(f, 2))
    assert order_complex_homology(p).betti[0] == nx.number_connected_components(g)


# -- isomorphism ---------------------------------------------------------------


def test_isomorphic_to_itself():
    p = build_W(2)
    m = poset_isomorphic(p, p)
    assert m is not None and all(m[e] == e for e in p.elements)


def test_hexagon_vs_square():
    assert poset_isomorphic(polygon_poset(6), polygon_poset(4)) is None


def test_same_f_vector_not_isomorphic():
    a = simplicial_poset([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    b = simplicial_poset([(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)])
    assert a.f_vector() == b.f_vector()
    assert poset_isomorphic(a, b) is None
    assert not nx_isomorphic(a, b)


@settings(max_examples=30, deadline=None)
@given(random_complexes, st.randoms(use_true_random=False))
def test_isomorphism_under_relabeling(facets, rnd):
    p = simplicial_poset(facets)
    labels = list(range(len(p)))
    rnd.shuffle(labels)
    perm = dict(zip(p.elements, labels))
    q = relabel(p, perm.__getitem__)
    m = poset_isomorphic(p, q)
    assert m is not None
    back = poset_isomorphic(q, p)
    assert back is not None
    # bijection that preserves covers both ways
    covers_q = set(q.covers())
    assert all((m[a], m[b]) in covers_q for a, b in p.covers())
    assert nx_isomorphic(p, q)


@settings(max_examples=30, deadline=None)
@given(random_complexes, random_complexes)
def test_isomorphism_agrees_with_networkx(f1, f2):
    a, b = simplicial_poset(f1), simplicial_poset(f2)
    assert (poset_isomorphic(a, b) is not None) == nx_isomorphic(a, b)


# -- collapses -----------------------------------------------------------------


def test_single_vertex_collapse():
    r = greedy_collapse(FacePoset(["v"], []))
    assert r.success and r.certificate == []


def test_closed_triangle_collapse():
    p = simplicial_poset([(0, 1, 2)])
    r = greedy_collapse(PolyhedralComplexAbstract(p, 2, True))
    assert r.success and len(r.certificate) == 3


def test_circle_does_not_collapse():
    r = greedy_collapse(simplicial_poset([(0, 1), (1, 2), (2, 0)]))
    assert not r.success and r.status == "stuck"


def test_budget_exhaustion_is_inconclusive():
    # a disk needs several steps; one step is not enough to decide anything
    r = greedy_collapse(simplicial_poset([(0, 1, 2), (0, 2, 3)]), budget=1)
    assert not r.success and r.status == "inconclusive"


def test_pure_declaration_checked():
    p = simplicial_poset([(0, 1, 2), (2, 3)])
    assert not PolyhedralComplexAbstract(p).is_pure()
    with pytest.raises(ValueError):
        PolyhedralComplexAbstract(p, 2, True)


def test_collapse_needs_graded_poset():
    p = FacePoset(["a", "b", "c"], [("a", "c"), ("b", "c")], rank={"a": 0, "b": 1, "c": 2}, graded=False)
    with pytest.raises(ValueError):
        greedy_collapse(p)


@settings(max_examples=30, deadline=None)
@given(random_complexes)
def test_collapse_success_implies_euler_one(facets):
    p = simplicial_poset(facets)
    r = greedy_collapse(p, budget=2000)
    if r.success:
        assert order_complex_homology(p).betti == [1]
