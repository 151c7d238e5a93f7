"""Marked polytopes, regular subdivisions and tropical hypersurfaces.

A lifting eta of a finite point set A induces the subdivision of Q = Conv(A)
obtained by projecting the lower faces of Conv{(a, r) : r >= eta(a)}.  The
tropical polynomial F(x) = max{a.x - eta(a)} has its corner locus dual to
that subdivision: the cell with marked set A_g corresponds to the polyhedron
where the maximum is attained on all of A_g.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .exact import (as_fractions, convex_hull_facets, det, dot, extreme_rays, integer_kernel,
                    invariant_factors, polytope_vertices, rank, rref, solve)
from .poset import FacePoset

Point = tuple[int, ...]


# --------------------------------------------------------------------------
# marked polytopes


def affine_coordinates(points: Sequence[Sequence]) -> tuple[list[tuple[Fraction, ...]], int]:
    """Coordinates of the points in an affine basis of their span."""
    pts = as_fractions(points)
    origin = pts[0]
    diffs = [[a - b for a, b in zip(p, origin)] for p in pts[1:]]
    red, piv = rref(diffs) if diffs else ([], [])
    basis = [r for r in red if any(r)]
    d = len(basis)
    out = []
    for p in pts:
        v = [a - b for a, b in zip(p, origin)]
        # v = sum c_i basis_i; pivots give the coefficients directly
        out.append(tuple(v[c] for c in piv[:d]))
    return out, d


@dataclass(frozen=True)
class MarkedPolytope:
    points: tuple[Point, ...]

    def __init__(self, points: Iterable[Sequence[int]]):
        pts = sorted({tuple(int(x) for x in p) for p in points})
        if not pts:
            raise ValueError("a marked polytope needs at least one point")
        if len({len(p) for p in pts}) != 1:
            raise ValueError("points of different dimensions")
        object.__setattr__(self, "points", tuple(pts))

    @property
    def ambient(self) -> int:
        return len(self.points[0])

    @cached_property
    def dim(self) -> int:
        return affine_coordinates(self.points)[1]

    @cached_property
    def hull(self) -> tuple[Point, ...]:
        """Vertices of Q."""
        coords, d = affine_coordinates(self.points)
        if d == 0:
            return self.points[:1]
        if d == 1:
            order = sorted(range(len(coords)), key=lambda i: coords[i])
            return tuple(sorted({self.points[order[0]], self.points[order[-1]]}))
        facets = convex_hull_facets(coords)
        verts = []
        for i, c in enumerate(coords):
            tight = [f for f in facets if dot(f[0], c) == f[1]]
            if tight and rank([f[0] for f in tight]) == d:
                verts.append(self.points[i])
        return tuple(sorted(verts))

    @cached_property
    def facets(self) -> list[frozenset[Point]]:
        """Points of A on each facet of Q."""
        coords, d = affine_coordinates(self.points)
        if d == 0:
            return []
        if d == 1:
            return [frozenset({p}) for p in self.hull]
        out = []
        for normal, b in convex_hull_facets(coords):
            out.append(frozenset(p for p, c in zip(self.points, coords) if dot(normal, c) == b))
        return out

    def on_boundary(self, subset: Iterable[Point]) -> bool:
        s = frozenset(subset)
        return any(s <= f for f in self.facets)


def face_lattice(points: Sequence[Point]) -> list[frozenset[Point]]:
    """All non-empty faces of Conv(points), each as the set of points on it."""
    mp = MarkedPolytope(points)
    top = frozenset(mp.points)
    if mp.dim == 0:
        return [top]
    out = {top}
    frontier = [top]
    while frontier:
        nxt = []
        for f in frontier:
            sub = MarkedPolytope(f)
            if sub.dim == 0:
                continue
            for g in sub.facets:
                if g not in out:
                    out.add(g)
                    nxt.append(g)
        frontier = nxt
    return sorted(out, key=lambda f: (MarkedPolytope(f).dim, sorted(f)))


def lattice_N_of_A(mp: MarkedPolytope) -> list[tuple[int, ...]]:
    """Basis of N(A) = {x : a.x = a'.x for all a, a' in A}."""
    a0 = mp.points[0]
    diffs = [[x - y for x, y in zip(p, a0)] for p in mp.points[1:]]
    return integer_kernel(diffs, mp.ambient) if diffs else [
        tuple(int(i == j) for i in range(mp.ambient)) for j in range(mp.ambient)]


def lattice_M_index(mp: MarkedPolytope) -> int:
    """Index of the lattice spanned by differences of A in its saturation."""
    a0 = mp.points[0]
    diffs = [[x - y for x, y in zip(p, a0)] for p in mp.points[1:]]
    out = 1
    for f in invariant_factors(diffs) if diffs else []:
        out *= abs(f)
    return out


def normalized_volume(points: Sequence[Point]) -> int:
    """d! times the volume of a d-simplex, in the lattice of its ambient
    space restricted to the saturated affine span."""
    pts = list(points)
    a0 = pts[0]
    diffs = [[x - y for x, y in zip(p, a0)] for p in pts[1:]]
    if rank(diffs) != len(diffs):
        raise ValueError("not a simplex")
    out = 1
    for f in invariant_factors(diffs):
        out *= abs(f)
    return out


# --------------------------------------------------------------------------
# regular subdivisions


@dataclass
class Subdivision:
    polytope: MarkedPolytope
    eta: dict[Point, Fraction]
    maximal: list[frozenset[Point]]
    cells: list[frozenset[Point]] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.polytope.dim

    def cell_dim(self, cell: Iterable[Point]) -> int:
        return MarkedPolytope(cell).dim

    @property
    def is_triangulation(self) -> bool:
        return all(len(c) == self.cell_dim(c) + 1 for c in self.cells)

    def cells_of_dim(self, k: int) -> list[frozenset[Point]]:
        return [c for c in self.cells if self.cell_dim(c) == k]

    def interior_cells(self, k: int) -> list[frozenset[Point]]:
        return [c for c in self.cells_of_dim(k) if not self.polytope.on_boundary(c)]

    def poset(self) -> FacePoset:
        cells = sorted(self.cells, key=lambda c: (self.cell_dim(c), sorted(c)))
        covers = []
        for a in cells:
            for b in cells:
                if a < b and self.cell_dim(b) == self.cell_dim(a) + 1:
                    covers.append((a, b))
        return FacePoset(cells, covers, rank=lambda c: self.cell_dim(c))

    def to_json(self) -> str:
        return json.dumps({
            "points": [list(p) for p in self.polytope.points],
            "eta": {",".join(map(str, p)): str(v) for p, v in sorted(self.eta.items())},
            "maximal": [sorted(list(p) for p in c) for c in self.maximal],
            "triangulation": self.is_triangulation,
        })


def _lift(mp: MarkedPolytope, eta: Mapping) -> tuple[list[tuple[Fraction, ...]], int, dict]:
    et = {tuple(p): Fraction(v) for p, v in eta.items()}
    missing = [p for p in mp.points if p not in et]
    if missing:
        raise ValueError(f"lifting is not defined at {missing}")
    coords, d = affine_coordinates(mp.points)
    lifted = [c + (et[p],) for c, p in zip(coords, mp.points)]
    return lifted, d, et


def regular_subdivision(mp: MarkedPolytope, eta: Mapping) -> Subdivision:
    """Projection of the lower faces of the lifted point set.

    A point high above the barycentre makes the lifted set full
    dimensional; facets with downward normal are the lower facets.
    """
    lifted, d, et = _lift(mp, eta)
    if d == 0:
        cell = frozenset(mp.points)
        return Subdivision(mp, et, [cell], [cell])
    top_height = max(p[-1] for p in lifted) + 1 + sum(abs(p[-1]) for p in lifted)
    bary = [sum(p[i] for p in lifted) / len(lifted) for i in range(d)]
    pts = lifted + [tuple(bary) + (top_height,)]
    maximal = []
    for normal, b in convex_hull_facets(pts):
        if normal[-1] >= 0:
            continue
        on = frozenset(p for p, q in zip(mp.points, lifted) if dot(normal, q) == b)
        maximal.append(on)
    maximal.sort(key=sorted)
    cells = set()
    for m in maximal:
        cells.update(face_lattice(sorted(m)))
    sub = Subdivision(mp, et, maximal, sorted(cells, key=lambda c: (MarkedPolytope(c).dim, sorted(c))))
    return sub


def lower_hull_oracle(mp: MarkedPolytope, eta: Mapping) -> list[frozenset[Point]]:
    """Maximal cells by brute force: every affinely independent (d+1)-subset
    spans a non-vertical hyperplane; keep those with all lifted points on or
    above it, and record the points on it."""
    lifted, d, et = _lift(mp, eta)
    if d == 0:
        return [frozenset(mp.points)]
    out = set()
    idx = range(len(lifted))
    for sub in combinations(idx, d + 1):
        base = [lifted[i][:d] for i in sub]
        rows = [list(b) + [Fraction(1)] for b in base]
        if rank(rows) < d + 1:
            continue
        # height = w . coords + c through the chosen points
        sol = solve(rows, [lifted[i][d] for i in sub])
        w, c = sol[:d], sol[d]
        ok = True
        on = []
        for p, q in zip(mp.points, lifted):
            h = dot(w, q[:d]) + c
            if q[d] < h:
                ok = False
                break
            if q[d] == h:
                on.append(p)
        if ok:
            out.add(frozenset(on))
    return sorted(out, key=sorted)


def check_subdivision_axioms(sub: Subdivision) -> bool:
    """Cells are closed under faces, two cells meet in a common face, and
    the maximal cells cover Q (volume check in affine coordinates)."""
    cells = set(sub.cells)
    for c in cells:
        if any(f not in cells for f in face_lattice(sorted(c))):
            return False
    mp = sub.polytope
    coords, d = affine_coordinates(mp.points)
    where = dict(zip(mp.points, coords))
    for a, b in combinations(sub.maximal, 2):
        common = a & b
        if not _separated(a, b, where):
            return False
        if common and frozenset(common) not in cells:
            return False
    return _volume(mp.points, where, d) == sum(_volume(sorted(m), where, d) for m in sub.maximal)


def _separated(a, b, where) -> bool:
    """Some hyperplane weakly separates the two cells with their common
    points on it (their relative interiors do not meet)."""
    pa = [where[p] for p in a]
    pb = [where[p] for p in b]
    d = len(pa[0])
    if d == 0:
        return False
    common = a & b
    # candidate normals: facets of each cell
    for cell, other in ((a, pb), (b, pa)):
        pts = [where[p] for p in cell]
        if MarkedPolytope(cell).dim < d:
            continue
        for normal, c in convex_hull_facets(pts):
            if all(dot(normal, q) >= c for q in other):
                on = {p for p in cell if dot(normal, where[p]) == c}
                if set(common) <= on:
                    return True
    return False


def pulling_triangulation(pts: Sequence[Sequence]) -> list[tuple]:
    """Simplices (as point tuples) of the pulling triangulation of Conv(pts)
    from its lexicographically smallest point."""
    pts = sorted({tuple(Fraction(x) for x in p) for p in pts})
    coords, d = affine_coordinates(pts)
    if d == 0:
        return [(pts[0],)]
    where = dict(zip(pts, coords))
    apex = pts[0]
    if d == 1:
        far = max(pts, key=lambda p: where[p])
        near = min(pts, key=lambda p: where[p])
        return [(near, far)]
    out = []
    for normal, c in convex_hull_facets(coords):
        if dot(normal, where[apex]) == c:
            continue
        on = [p for p in pts if dot(normal, where[p]) == c]
        for simplex in pulling_triangulation(on):
            out.append((apex,) + simplex)
    return out


def _volume(points, where, d) -> Fraction:
    """d!-normalized volume of Conv(points) in the given coordinates."""
    pts = [where[p] for p in points]
    if d == 0:
        return Fraction(1)
    if affine_coordinates(pts)[1] < d:
        return Fraction(0)
    total = Fraction(0)
    for simplex in pulling_triangulation(pts):
        a0 = simplex[0]
        total += abs(det([[x - y for x, y in zip(q, a0)] for q in simplex[1:]]))
    return total


# --------------------------------------------------------------------------
# tropical hypersurfaces


@dataclass
class DualFace:
    cell: frozenset[Point]
    eq_rows: list[list[Fraction]]
    eq_rhs: list[Fraction]
    le_rows: list[list[Fraction]]
    le_rhs: list[Fraction]
    vertices: list[tuple[Fraction, ...]]
    rays: list[tuple[int, ...]]
    dim: int

    @property
    def bounded(self) -> bool:
        return not self.rays

    def contains(self, x: Sequence) -> bool:
        return (all(dot(r, x) == c for r, c in zip(self.eq_rows, self.eq_rhs))
                and all(dot(r, x) <= c for r, c in zip(self.le_rows, self.le_rhs)))

    def interior_point(self) -> tuple[Fraction, ...]:
        m = len(self.vertices)
        p = [sum(v[i] for v in self.vertices) / m for i in range(len(self.vertices[0]))]
        for r in self.rays:
            p = [a + b for a, b in zip(p, r)]
        return tuple(p)


def tropical_value(points: Sequence[Point], eta: Mapping, x: Sequence) -> tuple[Fraction, frozenset[Point]]:
    """F(x) = max{a.x - eta(a)} and the set of points attaining it."""
    vals = {tuple(p): dot(p, x) - Fraction(eta[tuple(p)]) for p in points}
    best = max(vals.values())
    return best, frozenset(p for p, v in vals.items() if v == best)


@dataclass
class TropicalHypersurfaceModel:
    subdivision: Subdivision
    faces: dict[frozenset[Point], DualFace]

    def faces_of_dim(self, k: int) -> list[DualFace]:
        return [f for f in self.faces.values() if f.dim == k]

    @property
    def vertices(self) -> list[DualFace]:
        return self.faces_of_dim(0)

    def bounded_edges(self) -> list[DualFace]:
        return [f for f in self.faces_of_dim(1) if f.bounded]

    def rays(self) -> list[DualFace]:
        return [f for f in self.faces_of_dim(1) if not f.bounded]

    def check_duality(self) -> bool:
        """Phi is a dimension-complementing, inclusion-reversing bijection:
        an interior point of each face attains the maximum exactly on its
        cell, and faces of cells map to faces containing the dual."""
        sub = self.subdivision
        pts, eta = sub.polytope.points, sub.eta
        n = sub.dim
        for cell, face in self.faces.items():
            if face.dim != n - sub.cell_dim(cell):
                return False
            _, arg = tropical_value(pts, eta, face.interior_point())
            if arg != cell:
                return False
        for a in self.faces:
            for b in self.faces:
                if a < b:
                    # Phi(b) is contained in Phi(a)
                    fb = self.faces[b]
                    if not all(self.faces[a].contains(v) for v in fb.vertices):
                        return False
        return True

    def to_json(self) -> str:
        out = []
        for cell, f in sorted(self.faces.items(), key=lambda kv: (kv[1].dim, sorted(kv[0]))):
            out.append({"cell": sorted(list(p) for p in cell), "dim": f.dim,
                        "vertices": [[str(x) for x in v] for v in f.vertices],
                        "rays": [list(r) for r in f.rays]})
        return json.dumps({"faces": out})


def tropical_hypersurface(mp: MarkedPolytope, eta: Mapping, sub: Subdivision | None = None) -> TropicalHypersurfaceModel:
    """Dual polyhedra of the positive-dimensional cells of the subdivision,
    in the affine coordinates of the span of A (modulo N(A))."""
    if sub is None:
        sub = regular_subdivision(mp, eta)
    coords, d = affine_coordinates(mp.points)
    where = dict(zip(mp.points, coords))
    et = sub.eta
    faces = {}
    for cell in sub.cells:
        if sub.cell_dim(cell) < 1:
            continue
        cl = sorted(cell)
        a0 = cl[0]
        eq_rows, eq_rhs = [], []
        for a in cl[1:]:
            eq_rows.append([x - y for x, y in zip(where[a], where[a0])])
            eq_rhs.append(et[a] - et[a0])
        le_rows, le_rhs = [], []
        for c in mp.points:
            if c in cell:
                continue
            le_rows.append([x - y for x, y in zip(where[c], where[a0])])
            le_rhs.append(et[c] - et[a0])
        verts = polytope_vertices(eq_rows, eq_rhs, le_rows, le_rhs) if le_rows or eq_rows else []
        if not verts:
            raise ValueError(f"dual face of {cl} has no vertex")
        cone_rows = [[-x for x in r] for r in le_rows]
        for r in eq_rows:
            cone_rows.append(list(r))
            cone_rows.append([-x for x in r])
        rays = extreme_rays(cone_rows) if cone_rows else []
        dimension = d - rank(eq_rows) if eq_rows else d
        faces[cell] = DualFace(cell, eq_rows, eq_rhs, le_rows, le_rhs, verts, rays, dimension)
    return TropicalHypersurfaceModel(sub, faces)


# --------------------------------------------------------------------------
# the tropical hyperplane and its compactified faces


def _check_I(n: int, i: Iterable[int]) -> frozenset[int]:
    s = frozenset(i)
    if len(s) < 2:
        raise ValueError("a cone of the tropical hyperplane needs |I| >= 2")
    if not s <= frozenset(range(n + 1)):
        raise ValueError("index out of range")
    return s


@dataclass(frozen=True)
class TropCone:
    """P_I = {x_i = x_j >= x_k : i, j in I, k not in I} in R^{n+1}/R."""

    n: int
    I: frozenset[int]

    def system(self):
        from .exact import DifferenceSystem

        sys = DifferenceSystem(self.n + 1)
        m = min(self.I)
        for i in self.I:
            if i != m:
                sys.add_eq(i, m, 0)
        for k in range(self.n + 1):
            if k not in self.I:
                sys.add_le(k, m, 0)
        return sys

    @property
    def dim(self) -> int:
        return self.system().dimension()

    def contains(self, x: Sequence) -> bool:
        return self.system().contains([Fraction(v) for v in x])


@dataclass(frozen=True)
class CompactFace:
    """P_{I,I'}: in max-normalized coordinates u_k = exp(x_k - max x) in
    [0, 1], u = 1 on I, 0 < u < 1 on I' minus I and u = 0 off I'."""

    n: int
    I: frozenset[int]
    Ip: frozenset[int]

    @property
    def dim(self) -> int:
        return len(self.Ip) - len(self.I)

    def box(self) -> list[tuple[Fraction, Fraction]]:
        out = []
        for k in range(self.n + 1):
            if k in self.I:
                out.append((Fraction(1), Fraction(1)))
            elif k in self.Ip:
                out.append((Fraction(0), Fraction(1)))
            else:
                out.append((Fraction(0), Fraction(0)))
        return out

    def interior_point(self) -> tuple[Fraction, ...]:
        return tuple((lo + hi) / 2 for lo, hi in self.box())

    def closure_contains_point(self, u: Sequence) -> bool:
        return all(lo <= x <= hi for x, (lo, hi) in zip(u, self.box()))

    def label_of(self, u: Sequence) -> tuple[frozenset[int], frozenset[int]]:
        return (frozenset(k for k, x in enumerate(u) if x == 1),
                frozenset(k for k, x in enumerate(u) if x != 0))


def face_P(n: int, i: Iterable[int], ip: Iterable[int]) -> CompactFace:
    s = _check_I(n, i)
    sp = frozenset(ip)
    if not s <= sp:
        raise ValueError("need I contained in I'")
    if not sp <= frozenset(range(n + 1)):
        raise ValueError("index out of range")
    return CompactFace(n, s, sp)


@dataclass
class TropFan:
    n: int
    cones: dict[frozenset[int], TropCone]
    faces: dict[tuple[frozenset[int], frozenset[int]], CompactFace]


def trop_hyperplane_fan(n: int) -> TropFan:
    ground = range(n + 1)
    subsets = [frozenset(c) for r in range(2, n + 2) for c in combinations(ground, r)]
    cones = {s: TropCone(n, s) for s in subsets}
    faces = {}
    for s in subsets:
        rest = [k for k in ground if k not in s]
        for r in range(len(rest) + 1):
            for extra in combinations(rest, r):
                sp = s | frozenset(extra)
                faces[(s, sp)] = CompactFace(n, s, sp)
    return TropFan(n, cones, faces)


def compact_face_contains(outer: CompactFace, inner: CompactFace) -> bool:
    """Closure incidence decided on an interior point of the inner face."""
    return outer.closure_contains_point(inner.interior_point())


# --------------------------------------------------------------------------
# moment maps with explicit positive weights


def moment_simplex(weights: Sequence) -> tuple[Fraction, ...]:
    """(w_0, ..., w_n) / sum w, the weights standing for e^{x_i}."""
    w = [Fraction(x) for x in weights]
    if any(x <= 0 for x in w):
        raise ValueError("weights must be positive")
    total = sum(w)
    return tuple(x / total for x in w)


def moment_mu(mp: MarkedPolytope, moduli: Mapping) -> tuple[Fraction, ...]:
    """sum |z^a| a / sum |z^a| with |z^a| supplied per point of A."""
    w = {tuple(p): Fraction(moduli[tuple(p)]) for p in mp.points}
    if any(x <= 0 for x in w.values()):
        raise ValueError("moduli must be positive")
    total = sum(w.values())
    return tuple(sum(w[p] * p[i] for p in mp.points) / total for i in range(mp.ambient))


def moment_mu_from_x(mp: MarkedPolytope, base: Fraction, x: Sequence) -> tuple[Fraction, ...]:
    """Moment map of |z_i| = base^{x_i} for integer x (exact powers)."""
    b = Fraction(base)
    moduli = {}
    for p in mp.points:
        e = sum(int(a) * int(c) for a, c in zip(p, x))
        moduli[p] = b ** e
    return moment_mu(mp, moduli)


# --------------------------------------------------------------------------
# export


def curve_svg(model: TropicalHypersurfaceModel, size: int = 300, ray_length: Fraction = Fraction(2)) -> str:
    """SVG drawing of a plane tropical curve (vertices, edges, rays)."""
    if model.subdivision.dim != 2:
        raise ValueError("only plane curves can be drawn")
    segs = []
    for f in model.faces_of_dim(1):
        a = f.vertices[0]
        if f.bounded:
            b = f.vertices[1]
        else:
            r = f.rays[0]
            norm = max(abs(x) for x in r)
            b = tuple(x + ray_length * y / norm for x, y in zip(a, r))
        segs.append((a, b))
    xs = [float(p[0]) for s in segs for p in s]
    ys = [float(p[1]) for s in segs for p in s]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    sc = 0.8 * size / span
    cx, cy = (max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2

    def tr(p):
        return (size / 2 + sc * (float(p[0]) - cx), size / 2 - sc * (float(p[1]) - cy))

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">']
    for a, b in segs:
        (x1, y1), (x2, y2) = tr(a), tr(b)
        lines.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="black"/>')
    for v in model.vertices:
        x, y = tr(v.vertices[0])
        lines.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3"/>')
    lines.append("</svg>")
    return "\n".join(lines)
