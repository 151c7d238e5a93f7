"""Simple hypersurfaces as covers of the pair-of-pants, and the global CW
model of a curve glued from them over a coherent triangulation.

Angles on the pants side are rational multiples of pi stored mod 2; points
of the argument torus N_T = N_R / N are rational vectors mod 1.  The map
phi_B sends theta in N_R to the angles a_i + 2 <b_i, theta> (in units of
pi), so a lifted polytope P of the pants torus pulls back to the convex set
pre(P) in N_R and its preimages in N_T are the translates by Lambda_B.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from .coamoeba import TorusRegion, mod2
from .cyclic import CyclicPartition, StratumLabel, W_covers_below, W_elements, build_W
from .exact import det, invariant_factors, mat_inverse, mat_vec, rank
from .poset import FacePoset, order_complex_homology
from .tropical import MarkedPolytope, regular_subdivision

Point = tuple[int, ...]


def mod1(v: Sequence) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) - (Fraction(x).numerator // Fraction(x).denominator) for x in v)


# --------------------------------------------------------------------------
# simplex covers


@dataclass(frozen=True)
class SimplexCoverData:
    b: tuple[Point, ...]
    xi_lattice: tuple[tuple[int, ...], ...]
    deck: tuple[int, ...]
    degree: int
    translations: tuple[tuple[Fraction, ...], ...] = ()

    @property
    def n(self) -> int:
        return len(self.b) - 1

    @property
    def full_dimensional(self) -> bool:
        return len(self.b) - 1 == len(self.b[0])

    def deck_group(self) -> list[int]:
        """Non-trivial invariant factors of Lambda_B."""
        return [d for d in self.deck if d != 1]


def _closure_mod1(gens: Sequence[Sequence[Fraction]], size: int) -> list[tuple[Fraction, ...]]:
    dim = len(gens[0]) if gens else 0
    zero = tuple(Fraction(0) for _ in range(dim))
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = mod1([a + b for a, b in zip(v, g)])
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    if len(seen) != size:
        raise ArithmeticError("deck group closure has the wrong order")
    return sorted(seen)


def simplex_cover(b: Sequence[Sequence[int]]) -> SimplexCoverData:
    """Lattices of an ordered marked simplex B = (b_0, ..., b_r).

    Xi_B is spanned by the differences b_i - b_0; Lambda_B = Xi_B^vee / N is
    Z^r / X Z^r for the difference matrix X, so its invariant factors come
    from the Smith normal form.  For full-dimensional B the deck
    translations X^{-1} k mod 1 are listed explicitly.
    """
    pts = tuple(tuple(int(x) for x in p) for p in b)
    if len(pts) < 2:
        raise ValueError("a simplex cover needs at least two points")
    diffs = [tuple(x - y for x, y in zip(p, pts[0])) for p in pts[1:]]
    if rank(diffs) != len(diffs):
        raise ValueError("points are affinely dependent")
    factors = tuple(abs(f) for f in invariant_factors(diffs))
    degree = 1
    for f in factors:
        degree *= f
    translations: tuple = ()
    if len(diffs) == len(pts[0]):
        if abs(det(diffs)) != degree:
            raise ArithmeticError("Smith normal form disagrees with the determinant")
        inv = mat_inverse(diffs)
        cols = [[inv[r][c] for r in range(len(inv))] for c in range(len(inv))]
        translations = tuple(_closure_mod1(cols, degree))
    return SimplexCoverData(pts, tuple(diffs), factors, degree, translations)


@dataclass(frozen=True)
class CoefficientData:
    """Per point: the lifting value eta and the argument of the coefficient
    as a rational multiple of pi (mod 2)."""

    eta: Mapping[Point, Fraction]
    args: Mapping[Point, Fraction]

    def __post_init__(self):
        for p, a in self.args.items():
            if not isinstance(a, (int, Fraction)):
                raise ValueError(f"argument at {p} is not a rational multiple of pi")
        for p, v in self.eta.items():
            if not isinstance(v, (int, Fraction)):
                raise ValueError(f"lifting value at {p} is not rational")

    @classmethod
    def generic(cls, points: Iterable[Sequence[int]], eta: Mapping, seed: int = 0) -> "CoefficientData":
        """Arguments k/97 pi from a seeded generator."""
        import random
        rng = random.Random(seed)
        pts = sorted(tuple(p) for p in points)
        args = {p: Fraction(rng.randrange(1, 194), 97) for p in pts}
        return cls({tuple(p): Fraction(v) for p, v in eta.items()}, args)


# --------------------------------------------------------------------------
# the cover complex of one simplex


@dataclass(frozen=True)
class CoverCell:
    label: StratumLabel
    deck: tuple[Fraction, ...]

    @property
    def rank(self) -> int:
        return self.label.rank

    def sort_key(self):
        return (self.label.sort_key(), self.deck)

    def __lt__(self, other: "CoverCell") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"{self.label}@" + ",".join(map(str, self.deck))


@dataclass
class CoverComplex:
    data: SimplexCoverData
    args: tuple[Fraction, ...]
    cells: FacePoset
    torus_vertices: dict = field(default_factory=dict)  # cell -> vertices in N_R

    def representative(self, cell: CoverCell) -> tuple[Fraction, ...]:
        verts = self.torus_vertices[cell]
        m = len(verts)
        return mod1([sum(v[k] for v in verts) / m for k in range(len(verts[0]))])

    def act(self, shift: Sequence[Fraction], cell: CoverCell) -> CoverCell:
        return CoverCell(cell.label, mod1([a + b for a, b in zip(cell.deck, shift)]))

    def euler(self) -> int:
        return self.cells.euler()


def _pullback(data: SimplexCoverData, args: Sequence[Fraction], inv, p: Sequence) -> tuple[Fraction, ...]:
    """pre(p): the theta in N_R with a_i + 2 <b_i - b_0, theta> = p_i - p_0 + a_0."""
    rhs = [(Fraction(p[i]) - Fraction(p[0]) - args[i] + args[0]) / 2 for i in range(1, len(p))]
    return tuple(mat_vec(inv, rhs))


def cover_complex(data: SimplexCoverData, args: Sequence) -> CoverComplex:
    """Cells (label, deck element) of the simple hypersurface of B.

    The sheet of a base cell x is fixed by its lifted octahedron P_x; a face
    y of x sits in the sheet of x after the unique lattice shift m with
    P_y + 2m inside P_x, which moves the deck label by X^{-1}(m_i - m_0).
    """
    if not data.full_dimensional:
        raise ValueError("cover complexes need a full-dimensional simplex")
    a = tuple(mod2(x) for x in args)
    if len(a) != len(data.b):
        raise ValueError("one argument per simplex vertex")
    for x in args:
        if not isinstance(x, (int, Fraction)):
            raise ValueError("arguments must be rational multiples of pi")
    n = data.n
    inv = mat_inverse(data.xi_lattice)
    labels = sorted(W_elements(n))
    regions = {x: TorusRegion.partial_octahedron(x.sigma, x.j) for x in labels}
    base_verts = {x: [_pullback(data, a, inv, v) for v in regions[x].vertices()] for x in labels}
    cells = [CoverCell(x, g) for x in labels for g in data.translations]
    torus_vertices = {}
    for c in cells:
        torus_vertices[c] = [tuple(u + v for u, v in zip(p, c.deck)) for p in base_verts[c.label]]
    covers = []
    for x in labels:
        sys_x = regions[x].system()
        for y in W_covers_below(x):
            m = sys_x.lattice_shift(regions[y].vertices())
            if m is None:
                raise ArithmeticError(f"{y} does not fit inside {x}")
            step = mat_vec(inv, [m[i] - m[0] for i in range(1, n + 1)])
            for g in data.translations:
                covers.append((CoverCell(y, mod1([u + v for u, v in zip(g, step)])), CoverCell(x, g)))
    poset = FacePoset(cells, covers, rank=lambda c: c.rank)
    return CoverComplex(data, a, poset, torus_vertices)


def deck_action_is_free(cx: CoverComplex) -> bool:
    """No non-identity deck translation fixes a cell, and translations
    preserve the covering relation."""
    p = cx.cells
    cover_set = set(p.covers())
    for g in cx.data.translations:
        if not any(g):
            continue
        for c in p.elements:
            if cx.act(g, c) == c:
                return False
        for lo, hi in cover_set:
            if (cx.act(g, lo), cx.act(g, hi)) not in cover_set:
                return False
    return True


# --------------------------------------------------------------------------
# gluing curves


class GluingError(ValueError):
    pass


def _on_open_segment(p: Sequence[Fraction], q: Sequence[Fraction], u: Sequence[Fraction]) -> Fraction | None:
    """Parameter t in (0, 1) with p + t (q - p) = u mod Z^n, if any."""
    d = [b - a for a, b in zip(p, q)]
    lo = [min(a, b) for a, b in zip(p, q)]
    hi = [max(a, b) for a, b in zip(p, q)]
    ranges = []
    for k in range(len(p)):
        first = -((u[k] - lo[k]).__floor__())
        last = (hi[k] - u[k]).__floor__()
        ranges.append(range(first, last + 1))
    from itertools import product
    for m in product(*ranges):
        w = [u[k] + m[k] - p[k] for k in range(len(p))]
        t = None
        ok = True
        for wk, dk in zip(w, d):
            if dk == 0:
                if wk != 0:
                    ok = False
                    break
                continue
            tk = wk / dk
            if t is None:
                t = tk
            elif tk != t:
                ok = False
                break
        if ok and t is not None and 0 < t < 1:
            return t
    return None


@dataclass
class GluedComplex:
    cells: FacePoset
    simplices: list[tuple[Point, ...]]
    degrees: dict
    identifications: dict = field(default_factory=dict)  # global key -> sources

    def euler(self) -> int:
        return self.cells.euler()

    def boundary_cells(self) -> list:
        """Cells of dimension top - 1 in exactly one top cell, with their faces."""
        p = self.cells
        top = max(p.rank)
        free = [i for i in range(len(p)) if p.rank[i] == top - 1
                and sum(1 for j in p.up[i] if p.rank[j] == top) == 1]
        keep = set()
        for i in free:
            keep |= p.down_set(p.elements[i])
        return sorted(keep)

    def boundary_components(self) -> int:
        p = self.cells
        keep = set(self.boundary_cells())
        parent = {i: i for i in keep}

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i
        for i in keep:
            for j in p.down[i]:
                if j in keep:
                    parent[find(i)] = find(j)
        return len({find(i) for i in keep})

    def summary(self) -> dict:
        hom = order_complex_homology(self.cells)
        chi = self.euler()
        b = self.boundary_components()
        components = hom.betti[0] if hom.betti else 0
        genus = Fraction(2 * components - chi - b, 2)
        return {
            "f_vector": self.cells.f_vector(),
            "euler": chi,
            "betti": hom.betti,
            "boundary_components": b,
            "genus": genus,
            "degrees": sorted(self.degrees.values()),
        }

    def to_json(self) -> str:
        p = self.cells
        names = {e: _key_text(e) for e in p.elements}
        data = {
            "simplices": [[list(x) for x in s] for s in self.simplices],
            "degrees": {",".join(f"{x[0]}:{x[1]}" for x in s): d for s, d in self.degrees.items()},
            "cells": sorted(names.values()),
            "covers": sorted([names[a], names[b]] for a, b in p.covers()),
            "identifications": {names[k]: v for k, v in sorted(self.identifications.items(),
                                                               key=lambda kv: names[kv[0]])},
        }
        return json.dumps(data, sort_keys=True)


def _key_text(key) -> str:
    def fmt(x):
        if isinstance(x, (tuple, list)):
            return "(" + ",".join(fmt(y) for y in x) + ")"
        if isinstance(x, frozenset):
            return "{" + ",".join(sorted(fmt(y) for y in x)) + "}"
        return str(x)
    return fmt(key)


def glue(mp: MarkedPolytope, coeffs: CoefficientData, order: Sequence[int] | None = None) -> GluedComplex:
    """The compactified hypersurface as a colimit of simplex covers.

    Cells over a face shared by several simplices are identified through
    exact points of N_T.  For curves each simplex cuts the boundary circles
    over an edge at its own points, so every side is refined to the union
    of the cut points before matching; a single simplex needs no gluing.
    """
    sub = regular_subdivision(mp, coeffs.eta)
    if not sub.is_triangulation:
        raise GluingError("the lifting does not induce a triangulation")
    simplices = [tuple(sorted(c)) for c in sub.maximal]
    if order is not None:
        simplices = [simplices[k] for k in order]
    if mp.dim != len(mp.points[0]):
        raise GluingError("the polytope must be full dimensional")
    complexes = {}
    for s in simplices:
        data = simplex_cover(s)
        complexes[s] = cover_complex(data, [coeffs.args[p] for p in s])
    degrees = {s: complexes[s].data.degree for s in simplices}
    if len(simplices) == 1:
        s = simplices[0]
        cx = complexes[s]
        keyed = _relabel_single(cx, s)
        return GluedComplex(keyed, simplices, degrees,
                            {k: [(list(map(list, s)), str(c))] for k, c in _single_sources(cx, s).items()})
    if mp.dim == 1:
        return _glue_disjoint(complexes, simplices, degrees)
    if mp.dim != 2:
        raise NotImplementedError("gluing along shared strata is implemented for curves")
    return _glue_curves(complexes, simplices, degrees)


def _relabel_single(cx: CoverComplex, s) -> FacePoset:
    mapping = {c: ("cell", s, c.label, c.deck) for c in cx.cells.elements}
    p = cx.cells
    return FacePoset([mapping[c] for c in p.elements],
                     [(mapping[a], mapping[b]) for a, b in p.covers()],
                     rank={mapping[c]: c.rank for c in p.elements})


def _single_sources(cx: CoverComplex, s) -> dict:
    return {("cell", s, c.label, c.deck): c for c in cx.cells.elements}


def _glue_disjoint(complexes, simplices, degrees) -> GluedComplex:
    elems, covers, ranks, ident = [], [], {}, {}
    for s in simplices:
        cx = complexes[s]
        for c in cx.cells.elements:
            k = ("cell", s, c.label, c.deck)
            elems.append(k)
            ranks[k] = c.rank
            ident[k] = [(list(map(list, s)), str(c))]
        for a, b in cx.cells.covers():
            covers.append((("cell", s, a.label, a.deck), ("cell", s, b.label, b.deck)))
    return GluedComplex(FacePoset(elems, covers, rank=ranks), simplices, degrees, ident)


def _glue_curves(complexes, simplices, degrees) -> GluedComplex:
    # cells over an edge: vertices are points, arcs are segments in N_R
    def edge_of(s, label):
        return frozenset(s[i] for i in label.j)

    cut_points: dict = {}
    for s in simplices:
        cx = complexes[s]
        for c in cx.cells.elements:
            if len(c.label.j) == 2 and c.rank == 0:
                cut_points.setdefault(edge_of(s, c.label), set()).add(cx.representative(c))

    elems: dict = {}
    covers: set = set()
    ident: dict = {}
    sides: dict = {}

    def add(key, rank, source):
        elems[key] = rank
        ident.setdefault(key, []).append(source)

    for s in simplices:
        cx = complexes[s]
        p = cx.cells
        mapping: dict = {}
        for c in p.elements:
            src = (list(map(list, s)), str(c))
            if len(c.label.j) == 2:
                e = edge_of(s, c.label)
                if c.rank == 0:
                    key = ("v", e, cx.representative(c))
                    add(key, 0, src)
                    mapping[c] = [key]
                    sides.setdefault((e, s), set()).add(key)
                    continue
                # an arc: split at every cut point inside it
                v0, v1 = cx.torus_vertices[c]
                ts = []
                for u in cut_points[e]:
                    t = _on_open_segment(v0, v1, u)
                    if t is not None:
                        ts.append(t)
                ts = [Fraction(0)] + sorted(ts) + [Fraction(1)]
                pts = [mod1([a + t * (b - a) for a, b in zip(v0, v1)]) for t in ts]
                arcs = []
                for k in range(len(ts) - 1):
                    mid = (ts[k] + ts[k + 1]) / 2
                    akey = ("a", e, mod1([a + mid * (b - a) for a, b in zip(v0, v1)]))
                    add(akey, 1, src)
                    for end in (pts[k], pts[k + 1]):
                        vkey = ("v", e, end)
                        add(vkey, 0, src)
                        covers.add((vkey, akey))
                        sides.setdefault((e, s), set()).add(vkey)
                    sides.setdefault((e, s), set()).add(akey)
                    arcs.append(akey)
                mapping[c] = arcs
            else:
                key = ("cell", s, c.label, c.deck)
                add(key, c.rank, src)
                mapping[c] = [key]
        for lo, hi in p.covers():
            if len(lo.label.j) == 2 and len(hi.label.j) == 2:
                # vertex below an arc: already attached through the refinement
                ends = {("v", edge_of(s, lo.label), cx.representative(lo))}
                got = set()
                for akey in mapping[hi]:
                    got |= {v for v, a in covers if a == akey}
                if not ends <= got:
                    raise GluingError(f"endpoint of {hi} missing after refinement")
                continue
            for a in mapping[lo]:
                for b in mapping[hi]:
                    covers.add((a, b))

    # every edge shared by two simplices must be matched cell for cell
    by_edge: dict = {}
    for (e, s), keys in sides.items():
        by_edge.setdefault(e, []).append((s, keys))
    for e, lst in by_edge.items():
        if len(lst) == 2 and lst[0][1] != lst[1][1]:
            diff = lst[0][1] ^ lst[1][1]
            raise GluingError(f"cells over edge {sorted(e)} do not match: {sorted(map(_key_text, diff))[:4]}")
        if len(lst) > 2:
            raise GluingError(f"edge {sorted(e)} lies in more than two triangles")
    ranks = dict(elems)
    poset = FacePoset(sorted(elems, key=_key_text), sorted(covers, key=lambda ab: (_key_text(ab[0]), _key_text(ab[1]))),
                      rank=ranks)
    return GluedComplex(poset, simplices, degrees, ident)


# --------------------------------------------------------------------------
# lattice point counts and monodromy


def lattice_counts(mp: MarkedPolytope) -> tuple[Fraction, int, int]:
    """(area, interior points, boundary points) of a lattice polygon via
    edge gcds and Pick's theorem."""
    if mp.dim != 2 or len(mp.points[0]) != 2:
        raise ValueError("lattice polygon expected")
    verts = _hull_cycle(mp.points)
    area2 = 0
    boundary = 0
    for (x0, y0), (x1, y1) in zip(verts, verts[1:] + verts[:1]):
        area2 += x0 * y1 - x1 * y0
        boundary += gcd(abs(x1 - x0), abs(y1 - y0))
    area = Fraction(abs(area2), 2)
    interior = area - Fraction(boundary, 2) + 1
    return area, int(interior), boundary


def _hull_cycle(points: Sequence[Point]) -> list[Point]:
    pts = sorted(set(points))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def monodromy_point(x: Sequence, theta: Sequence) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """(x, theta) -> (x, theta + x mod 1)."""
    xs = tuple(Fraction(v) for v in x)
    return xs, mod1([Fraction(a) + b for a, b in zip(theta, xs)])


def monodromy_order(x: Sequence) -> int:
    """Length of every orbit on the fibre over a rational point x."""
    return lcm(*(Fraction(v).denominator for v in x)) if len(x) else 1


def check_single_simplex_is_W(n: int) -> bool:
    """The unit simplex with trivial arguments gives back W."""
    from .poset import poset_isomorphic
    b = [tuple(0 for _ in range(n))] + [tuple(int(i == k) for i in range(n)) for k in range(n)]
    cx = cover_complex(simplex_cover(b), [0] * (n + 1))
    return poset_isomorphic(cx.cells, build_W(n)) is not None
