"""Exact angle arithmetic on the torus and the polytopes of the coamoeba.

Angles are rational multiples of pi and are stored as the rational factor
``q`` (so ``q = 1`` is pi) reduced modulo 2.  Torus points are homogeneous:
equality is tested after rotating the first coordinate to zero.  Every
region is a difference-constraint system in a lift to R^{n+1}/R, and torus
membership asks for an integer shift (by multiples of 2pi) of the lift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import lcm
from typing import Iterable, Sequence

from .cyclic import CyclicPartition, StratumLabel, induced_partition
from .exact import DifferenceSystem, polytope_vertices
from .nets import Net, make_net

TWO = Fraction(2)


def mod2(q) -> Fraction:
    q = Fraction(q)
    return q - 2 * (q.numerator // (2 * q.denominator))


@dataclass(frozen=True)
class Angle:
    q: Fraction

    def __init__(self, q):
        object.__setattr__(self, "q", mod2(q))

    def __add__(self, other: "Angle") -> "Angle":
        return Angle(self.q + other.q)

    def __neg__(self) -> "Angle":
        return Angle(-self.q)

    def antipode(self) -> "Angle":
        return Angle(self.q + 1)

    def __str__(self) -> str:
        return f"{self.q}pi"


class AngleVector(tuple):
    """A point [theta_0, ..., theta_n] of the torus, normalized so theta_0 = 0."""

    def __new__(cls, coords: Iterable):
        if type(coords) is cls:
            return coords
        raw = [Fraction(c.q if isinstance(c, Angle) else c) for c in coords]
        if not raw:
            raise ValueError("empty angle vector")
        base = raw[0]
        return super().__new__(cls, tuple(mod2(c - base) for c in raw))

    @property
    def n(self) -> int:
        return len(self) - 1

    def __str__(self) -> str:
        return "[" + ", ".join(f"{c}pi" for c in self) + "]"


def pi_point(n: int, subset: Iterable[int]) -> AngleVector:
    """The vertex pi_I: angle pi on I and 0 elsewhere."""
    s = set(subset)
    return AngleVector([1 if i in s else 0 for i in range(n + 1)])


# --------------------------------------------------------------------------
# circle predicates


def _max_gap(theta: Sequence[Fraction]) -> Fraction:
    pts = sorted(set(mod2(t) for t in theta))
    if len(pts) == 1:
        return TWO
    gaps = [b - a for a, b in zip(pts, pts[1:])] + [pts[0] + 2 - pts[-1]]
    return max(gaps)


def is_allowed(theta: Sequence) -> bool:
    """Not all marked points lie on an open half-circle.

    The points fit in an open half-circle exactly when some gap between
    cyclically consecutive points exceeds pi.
    """
    return _max_gap(AngleVector(theta)) <= 1


def spread(theta: Sequence) -> Fraction:
    """Length (in units of pi) of the shortest closed arc holding all points."""
    return 2 - _max_gap(AngleVector(theta))


def in_zonotope_interior(theta: Sequence) -> bool:
    """Interior of Z = sum of [0, pi_i]: some lift has max - min < pi."""
    return spread(theta) < 1


def on_zonotope_boundary(theta: Sequence) -> bool:
    return spread(theta) == 1


def in_arg_image(theta: Sequence) -> bool:
    """Whether a closed polygon with non-zero sides of these directions
    exists: either the directions do not fit in a closed half-circle, or
    they split into two antipodal groups (a vertex pi_I).
    """
    th = AngleVector(theta)
    if spread(th) > 1:
        return True
    values = sorted(set(th))
    return len(values) == 2 and values[1] - values[0] == 1


def cyclic_partition_of(theta: Sequence) -> CyclicPartition:
    """Cyclic partition by equal angles in counter-clockwise order."""
    th = AngleVector(theta)
    groups: dict[Fraction, list[int]] = {}
    for i, t in enumerate(th):
        groups.setdefault(t, []).append(i)
    return CyclicPartition([groups[t] for t in sorted(groups)])


# --------------------------------------------------------------------------
# lifted systems


def _block_reps(blocks: Sequence[frozenset[int]]) -> list[int]:
    return [min(b) for b in blocks]


def _same_block_equalities(sys: DifferenceSystem, blocks) -> None:
    for b in blocks:
        m = min(b)
        for i in b:
            if i != m:
                sys.add_eq(i, m, 0)


def octahedron_system(sigma: CyclicPartition, start: int = 0) -> DifferenceSystem:
    """Lifted inequalities of the octahedron O_sigma, lifted from block ``start``."""
    blocks = sigma.rotated(start)
    size = max(sigma.ground) + 1
    sys = DifferenceSystem(size)
    _same_block_equalities(sys, blocks)
    reps = _block_reps(blocks)
    k = len(reps)
    for s in range(k - 1):
        a, b = reps[s], reps[s + 1]
        sys.add_ge(b, a, 0)       # theta_a <= theta_b
        sys.add_le(b, a, 1)       # theta_b <= theta_a + pi
    first, last = reps[0], reps[-1]
    sys.add_le(last, first, 2)    # theta_last <= theta_first + 2pi
    sys.add_ge(last, first, 1)    # theta_first + 2pi <= theta_last + pi
    return sys


def partial_octahedron_system(sigma: CyclicPartition, j: Iterable[int], start: int = 0) -> DifferenceSystem:
    """Lifted inequalities of O_{sigma,J} = C_J intersected with O_sigma."""
    j = frozenset(j)
    if not StratumLabel(sigma, j).in_W():
        raise ValueError(f"({sigma}, {sorted(j)}) is not in W")
    blocks = sigma.rotated(start)
    size = max(sigma.ground) + 1
    sys = DifferenceSystem(size)
    _same_block_equalities(sys, blocks)
    reps = _block_reps(blocks)
    for a, b in zip(reps, reps[1:]):
        sys.add_ge(b, a, 0)
    sys.add_le(reps[-1], reps[0], 2)
    jreps = [min(b & j) for b in blocks if b & j]
    for a, b in zip(jreps, jreps[1:]):
        sys.add_le(b, a, 1)       # theta_{j_{s+1}} <= theta_{j_s} + pi
    sys.add_ge(jreps[-1], jreps[0], 1)  # theta_{j_1} + pi <= theta_{j_r}
    return sys


def alcove_system(net: Net) -> DifferenceSystem:
    """Lifted simplex of the alcove: block equalities, trapezoid
    antipodality and one inequality per consecutive pair of shuffle blocks.
    """
    sigma = net.sigma
    k = sigma.k
    reps = _block_reps(sigma.blocks)
    size = max(sigma.ground) + 1
    sys = DifferenceSystem(size)
    _same_block_equalities(sys, sigma.blocks)
    for r, s in net.trapezoids:
        sys.add_eq(reps[s], reps[r], 1)
    steps = net.steps
    l = len(steps)
    for t in range(l):
        for r in steps[t]:
            for s in steps[(t + 1) % l]:
                if s == (r + 1) % k:
                    # s follows r in the order of sigma(tau)
                    sys.add_ge(reps[s], reps[r], 0 if r < k - 1 else -2)
                elif r < s:
                    sys.add_ge(reps[s], reps[r], 1)
                else:
                    sys.add_le(reps[r], reps[s], 1)
    return sys


def alcove_pairwise_conditions(net: Net) -> list[tuple[int, int, str]]:
    """The pairwise description: for each pair i < j one of ``"eq"``,
    ``"anti"`` or ``"arc"`` (then the pair is ordered so that the
    difference second - first lies in [0, pi] modulo 2pi).
    """
    ground = sorted(net.sigma.ground)
    out = []
    for x in range(len(ground)):
        for y in range(x + 1, len(ground)):
            i, j = ground[x], ground[y]
            rel = net.relation(i, j)
            if rel == "same":
                out.append((i, j, "eq"))
            elif rel == "antipodal":
                out.append((i, j, "anti"))
            else:
                out.append((rel[0], rel[1], "arc"))
    return out


def _integer_form(theta: Sequence) -> tuple[list[int], int]:
    """Coordinates times their common denominator D, so that angles are
    integers modulo 2D."""
    raw = [c.q if isinstance(c, Angle) else c if isinstance(c, Fraction) else Fraction(c) for c in theta]
    d = lcm(*(x.denominator for x in raw))
    ints = [x.numerator * (d // x.denominator) for x in raw]
    full = 2 * d
    return [(v - ints[0]) % full for v in ints], d


def _pairwise_ok(x: list[int], d: int, net: Net, strict: bool) -> bool:
    full = 2 * d
    for i, j, kind in _pairwise_cached(net):
        diff = (x[j] - x[i]) % full
        if kind == "eq":
            if diff != 0:
                return False
        elif kind == "anti":
            if diff != d:
                return False
        elif strict:
            if not 0 < diff < d:
                return False
        elif diff > d:
            return False
    return True


def in_alcove_open(theta: Sequence, net: Net) -> bool:
    """Relative interior via the pairwise conditions, with case (3) strict:
    the difference second - first lies in the open interval (0, pi).
    """
    return _pairwise_ok(*_integer_form(theta), net, strict=True)


def in_alcove(theta: Sequence, net: Net) -> bool:
    """Membership in the closed alcove through the pairwise conditions.

    With closed arcs the pairwise conditions also admit stray points where
    a difference equal to pi is read in the wrong direction, so the closed
    alcove is taken as the union of the relative interiors of its faces,
    one face per non-empty subset of chords.
    """
    x, d = _integer_form(theta)
    # the closed alcove lies inside the literal closed-arc solution set
    if not _pairwise_ok(x, d, net, strict=False):
        return False
    return any(_pairwise_ok(x, d, face, strict=True) for face in _faces_cached(net))


def in_alcove_pairwise_closed(theta: Sequence, net: Net) -> bool:
    """The pairwise conditions read literally with closed arcs [0, pi]."""
    return _pairwise_ok(*_integer_form(theta), net, strict=False)


@lru_cache(maxsize=None)
def _faces_cached(net: Net) -> tuple[Net, ...]:
    out = []
    for r in range(1, net.l + 1):
        for sub in combinations(net.chords, r):
            out.append(make_net(net.sigma, sub))
    return tuple(out)


@lru_cache(maxsize=None)
def _pairwise_cached(net: Net):
    return tuple(alcove_pairwise_conditions(net))


def in_alcove_lifted(theta: Sequence, net: Net) -> bool:
    x, d = _integer_form(theta)
    return _alcove_scaled(net, d).contains_mod(x, period=2 * d)


@lru_cache(maxsize=None)
def _alcove_scaled(net: Net, factor: int) -> DifferenceSystem:
    return alcove_system(net).scaled(factor)


def in_octahedron(theta: Sequence, sigma: CyclicPartition, start: int = 0) -> bool:
    return octahedron_system(sigma, start).contains_mod(AngleVector(theta))


def in_partial_octahedron(theta: Sequence, sigma: CyclicPartition, j: Iterable[int], start: int = 0) -> bool:
    return partial_octahedron_system(sigma, j, start).contains_mod(AngleVector(theta))


def in_coamoeba_J(theta: Sequence, j: Iterable[int]) -> bool:
    """Closure of the partial coamoeba C_J: the points of J are allowed."""
    th = AngleVector(theta)
    j = sorted(set(j))
    if len(j) < 2:
        return False
    return _max_gap([th[i] for i in j]) <= 1


# --------------------------------------------------------------------------
# regions and the containment oracle


@dataclass(frozen=True)
class TorusRegion:
    kind: str  # octahedron, partial_octahedron, alcove
    data: tuple

    @classmethod
    def octahedron(cls, sigma: CyclicPartition) -> "TorusRegion":
        return cls("octahedron", (sigma,))

    @classmethod
    def partial_octahedron(cls, sigma: CyclicPartition, j: Iterable[int]) -> "TorusRegion":
        return cls("partial_octahedron", (sigma, frozenset(j)))

    @classmethod
    def alcove(cls, net: Net) -> "TorusRegion":
        return cls("alcove", (net,))

    def system(self) -> DifferenceSystem:
        return _region_system(self)

    def contains_point(self, theta: Sequence) -> bool:
        return self.system().contains_mod(AngleVector(theta))

    def vertices(self) -> list[tuple[Fraction, ...]]:
        return _region_vertices(self)

    def dimension(self) -> int:
        return self.system().dimension()


@lru_cache(maxsize=None)
def _region_system(region: TorusRegion) -> DifferenceSystem:
    if region.kind == "octahedron":
        return octahedron_system(region.data[0])
    if region.kind == "partial_octahedron":
        return partial_octahedron_system(*region.data)
    if region.kind == "alcove":
        return alcove_system(region.data[0])
    raise ValueError(f"unknown region kind {region.kind!r}")


@lru_cache(maxsize=None)
def _region_vertices(region: TorusRegion) -> tuple[tuple[Fraction, ...], ...]:
    sys = region.system()
    if not sys.is_feasible():
        raise ValueError("empty region")
    return tuple(sys.vertices())


def _vertices_by_active_sets(sys: DifferenceSystem) -> list[tuple[Fraction, ...]]:
    rows, rhs = sys.linear_rows()
    anchor = [Fraction(int(i == 0)) for i in range(sys.size)]
    return polytope_vertices([anchor], [0], rows, rhs)


def region_contains(outer: TorusRegion, inner: TorusRegion) -> bool:
    """Geometric containment of torus polytopes.

    The lifted inner polytope is the convex hull of its vertices, and the
    lattice translates of the outer lift are pairwise disjoint closed sets,
    so containment holds iff one common shift moves every inner vertex into
    the outer lift.
    """
    verts = _vertex_keys(inner)
    for v in verts:
        if not _vertex_in(outer, v):
            return False
    return outer.system().lattice_shift(verts) is not None


@lru_cache(maxsize=None)
def _vertex_keys(region: TorusRegion) -> tuple[tuple, ...]:
    # integral vertices become int tuples: cheaper to hash and shift
    return tuple(tuple(int(x) if x.denominator == 1 else x for x in v) for v in region.vertices())


@lru_cache(maxsize=None)
def _vertex_in(outer: TorusRegion, v: tuple) -> bool:
    return outer.system().contains_mod(v)


def alcove_in_partial_octahedron(net: Net, sigma: CyclicPartition, j: Iterable[int]) -> bool:
    """Combinatorial incidence: sigma(tau) precedes sigma and tau divides J."""
    from .cyclic import refines

    j = frozenset(j)
    if not sigma.divides(j):
        raise ValueError("sigma must divide J")
    return refines(net.sigma, sigma) and net.divides(j)


# --------------------------------------------------------------------------
# polygons: diameters and the alcove of a configuration


def net_of_configuration(theta: Sequence) -> Net:
    """The net of diameters of a polygon with side directions theta.

    Requires an allowed configuration whose distinct directions have gaps
    of at most pi.  Vertex v sits between the distinct directions v-1 and
    v; its open exterior arc is the set of supporting-line directions.  Two
    vertices span a diameter when one vertex's arc meets the antipode of
    the other's.
    """
    th = AngleVector(theta)
    if not is_allowed(th):
        raise ValueError("configuration is not allowed")
    sigma = cyclic_partition_of(th)
    values = sorted(set(th))
    k = len(values)
    if k < 2:
        raise ValueError("need at least two directions")
    arcs = []
    for v in range(k):
        lo = values[v - 1]
        hi = values[v] if v > 0 else values[0] + 2
        arcs.append((lo, hi))

    def overlap(a, b):
        # open arcs on the circle of length 2
        for shift in (-2, 0, 2):
            lo = max(a[0], b[0] + shift)
            hi = min(a[1], b[1] + shift)
            if lo < hi:
                return True
        return False

    chords = []
    for v in range(k):
        for w in range(v + 1, k):
            if overlap(arcs[v], (arcs[w][0] + 1, arcs[w][1] + 1)):
                chords.append((v, w))
    return make_net(sigma, chords)


def shuffle_of_configuration(theta: Sequence) -> CyclicPartition:
    """Cyclic order of the directions modulo pi (antipodes identified)."""
    th = AngleVector(theta)
    groups: dict[Fraction, list[int]] = {}
    for i, t in enumerate(th):
        groups.setdefault(t % 1, []).append(i)
    return CyclicPartition([groups[t] for t in sorted(groups)])


def octahedron_vertices(sigma: CyclicPartition) -> list[AngleVector]:
    return [AngleVector(v) for v in TorusRegion.octahedron(sigma).vertices()]


# --------------------------------------------------------------------------
# chambers of the arrangement theta_i - theta_j in pi Z


def chamber_signature(theta: Sequence) -> tuple[int, ...]:
    """Parity of floor(theta_j - theta_i) over all pairs i < j (units of pi).

    For generic points this is a complete invariant of the open chamber:
    the pairwise floors determine the fractional order and the integer
    parts of a lift up to the global shift.
    """
    x, d = _integer_form(theta)
    n = len(x)
    return tuple(((x[j] - x[i]) // d) % 2 for i in range(n) for j in range(i + 1, n))


def chamber_representatives(n: int) -> dict[tuple[int, ...], AngleVector]:
    """One generic point in every open chamber of the torus.

    Grid points a/(n+1) perturbed by a multiple of the index realize every
    cyclic order of fractional parts with every parity of integer parts.
    """
    from itertools import product

    # work in units of pi / d with d = 4 (n+1)^2
    d = 4 * (n + 1) ** 2
    step = 4 * (n + 1)
    pairs = [(i, j) for i in range(n + 1) for j in range(i + 1, n + 1)]
    out: dict[tuple[int, ...], AngleVector] = {}
    for a in product(range(2 * n + 2), repeat=n):
        x = [0] + [ai * step + i + 1 for i, ai in enumerate(a)]
        sig = tuple(((x[j] - x[i]) // d) % 2 for i, j in pairs)
        if sig not in out:
            out[sig] = AngleVector([Fraction(v, d) for v in x])
    return out


@dataclass
class ChamberCount:
    n: int
    chambers: int
    in_zonotope: int
    per_octahedron: dict[CyclicPartition, int]

    @property
    def maximal_octahedra(self) -> int:
        return len(self.per_octahedron)


def count_chambers(n: int) -> ChamberCount:
    """Maximal simplices of the alcove triangulation, split between the
    zonotope and the maximal octahedra.
    """
    from .cyclic import enumerate_cyclic_partitions

    reps = chamber_representatives(n)
    per = {s: 0 for s in enumerate_cyclic_partitions(n)
           if s.is_full() and octahedron_system(s).dimension() == n}
    inside = 0
    for th in reps.values():
        if in_zonotope_interior(th):
            inside += 1
            continue
        sigma = cyclic_partition_of(th)
        if sigma not in per or not in_octahedron(th, sigma):
            raise AssertionError(f"chamber point {th} in no maximal octahedron")
        per[sigma] += 1
    return ChamberCount(n, len(reps), inside, per)
