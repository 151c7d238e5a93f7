"""The phase tropical pair-of-pants: strata as complexes of triples, and
the convex-cone machinery behind their local structure.

A closed stratum Psi(sigma, J) is the union of products P_{I,I'} x A_tau
over legitimate triples (I, I', tau): I inside I' inside J, sigma(tau)
precedes sigma and tau divides I.  Cells are ordered by I reversed, I'
and tau, each factor by its own face order.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .coamoeba import AngleVector, TorusRegion, cyclic_partition_of, in_alcove, pi_point
from .cyclic import (CyclicPartition, StratumLabel, W_elements, enumerate_cyclic_partitions,
                     label_leq, refines)
from .exact import dot, extreme_rays, rank
from .nets import Net, enumerate_nets, net_facets, net_leq
from .poset import (ChainComplexSummary, FacePoset, PolyhedralComplexAbstract,
                    order_complex_homology, poset_isomorphic)
from .tropical import face_P


def _subset_text(s: Iterable[int]) -> str:
    return "{" + ",".join(map(str, sorted(s))) + "}"


# --------------------------------------------------------------------------
# triple cells


@dataclass(frozen=True)
class TripleCell:
    i: frozenset[int]
    i_prime: frozenset[int]
    tau: Net

    @property
    def dim(self) -> int:
        return len(self.i_prime) - len(self.i) + self.tau.rank

    def legitimate(self, sigma: CyclicPartition, j: Iterable[int]) -> bool:
        j = frozenset(j)
        return (self.i <= self.i_prime <= j and refines(self.tau.sigma, sigma)
                and self.tau.divides(self.i))

    def label(self) -> StratumLabel:
        """The stratum of Delta x T^n holding the open cell."""
        return StratumLabel(self.tau.sigma, self.i_prime)

    def sort_key(self):
        return (self.dim, tuple(sorted(self.i)), tuple(sorted(self.i_prime)), self.tau.sort_key())

    def __lt__(self, other: "TripleCell") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"({_subset_text(self.i)}, {_subset_text(self.i_prime)}, {self.tau})"

    def to_dict(self) -> dict:
        return {"I": sorted(self.i), "I'": sorted(self.i_prime), "tau": self.tau.to_dict()}


def triple_leq(a: TripleCell, b: TripleCell) -> bool:
    """The face order, taken literally as a conjunction."""
    return a.i >= b.i and a.i_prime <= b.i_prime and net_leq(a.tau, b.tau)


@lru_cache(maxsize=None)
def _nets(n: int) -> tuple[Net, ...]:
    return tuple(enumerate_nets(n))


def _check_label(sigma: CyclicPartition, j: Iterable[int]) -> frozenset[int]:
    j = frozenset(j)
    if not StratumLabel(sigma, j).in_W():
        raise ValueError(f"({sigma}, {_subset_text(j)}) is not in W")
    return j


def legitimate_triples(sigma: CyclicPartition, j: Iterable[int]) -> list[TripleCell]:
    j = _check_label(sigma, j)
    n = len(sigma.ground) - 1
    nets = [t for t in _nets(n) if refines(t.sigma, sigma)]
    js = sorted(j)
    out = []
    for tau in nets:
        for r in range(2, len(js) + 1):
            for i in combinations(js, r):
                i = frozenset(i)
                if not tau.divides(i):
                    continue
                rest = sorted(j - i)
                for s in range(len(rest) + 1):
                    for extra in combinations(rest, s):
                        out.append(TripleCell(i, i | frozenset(extra), tau))
    return sorted(out)


def _triple_covers(cells: Sequence[TripleCell]) -> list[tuple[TripleCell, TripleCell]]:
    present = set(cells)
    covers = []
    for c in cells:
        # grow I', shrink I, or add a chord
        for k in c.i_prime - c.i:
            lower = TripleCell(c.i, c.i_prime - {k}, c.tau)
            if lower in present:
                covers.append((lower, c))
        for k in c.i_prime - c.i:
            lower = TripleCell(c.i | {k}, c.i_prime, c.tau)
            if lower in present:
                covers.append((lower, c))
        for f in net_facets(c.tau):
            lower = TripleCell(c.i, c.i_prime, f)
            if lower in present:
                covers.append((lower, c))
    return covers


@dataclass
class PsiComplex:
    sigma: CyclicPartition
    j: frozenset[int]
    complex: PolyhedralComplexAbstract
    types: dict = field(default_factory=dict)

    @property
    def cells(self) -> FacePoset:
        return self.complex.cells

    @property
    def label(self) -> StratumLabel:
        return StratumLabel(self.sigma, self.j)

    def to_json(self) -> str:
        p = self.cells
        elems = list(p.elements)
        pos = {c: k for k, c in enumerate(elems)}
        data = {
            "sigma": str(self.sigma),
            "J": sorted(self.j),
            "dim": self.complex.dim,
            "cells": [dict(c.to_dict(), dim=c.dim) for c in elems],
            "covers": sorted((pos[a], pos[b]) for a, b in p.covers()),
        }
        return json.dumps(data, sort_keys=True)

    def to_dot(self) -> str:
        return self.cells.to_dot("psi")


def maximal_cell_type(c: TripleCell) -> str:
    """Type I: a maximal net and |I| = 3.  Type II: one trapezoid and |I| = 2,
    the two elements on opposite sides of it."""
    tau = c.tau
    if len(c.i) == 3 and tau.l == tau.k:
        return "I"
    if len(c.i) == 2 and len(tau.trapezoids) == 1 and tau.l == tau.k - 1:
        r, s = tau.trapezoids[0]
        a, b = sorted(c.i)
        sides = {tau.sigma.block_index[a], tau.sigma.block_index[b]}
        if sides == {r, s}:
            return "II"
    return "other"


def build_psi(sigma: CyclicPartition, j: Iterable[int]) -> PsiComplex:
    """The closed stratum Psi(sigma, J) as a polyhedral complex of triples."""
    j = _check_label(sigma, j)
    cells = legitimate_triples(sigma, j)
    poset = FacePoset(cells, _triple_covers(cells), rank=lambda c: c.dim)
    rk = StratumLabel(sigma, j).rank
    cx = PolyhedralComplexAbstract(poset, dim=rk, declared_pure=True)
    types = {c: maximal_cell_type(c) for c in poset.maximal()}
    return PsiComplex(sigma, j, cx, types)


def psi_boundary(psi: PsiComplex) -> FacePoset:
    """Cells lying in strata strictly below (sigma, J)."""
    top = psi.label
    p = psi.cells
    keep = [k for k, c in enumerate(p.elements) if c.label() != top]
    return p.restrict(keep)


@dataclass(frozen=True)
class PsiHomology:
    closed: ChainComplexSummary
    boundary: ChainComplexSummary
    rank: int

    @property
    def is_ball(self) -> bool:
        return self.closed.betti == [1]

    @property
    def boundary_is_sphere(self) -> bool:
        from .poset import sphere_betti
        return self.boundary.betti == sphere_betti(self.rank - 1)


def psi_complex_boundary_homology(sigma: CyclicPartition, j: Iterable[int]) -> PsiHomology:
    psi = build_psi(sigma, j)
    closed = order_complex_homology(psi.cells)
    bd = psi_boundary(psi)
    boundary = order_complex_homology(bd) if len(bd) else ChainComplexSummary([], 0, [])
    return PsiHomology(closed, boundary, psi.complex.dim)


# --------------------------------------------------------------------------
# geometric shadows of the triple complex


@lru_cache(maxsize=None)
def alcove_interior_point(tau: Net) -> AngleVector:
    verts = TorusRegion.alcove(tau).vertices()
    m = len(verts)
    return AngleVector([sum(v[k] for v in verts) / m for k in range(len(verts[0]))])


def cell_interior_point(n: int, c: TripleCell):
    """A rational point in the open cell: box coordinates of P_{I,I'} and
    an angle vector inside A_tau."""
    return face_P(n, c.i, c.i_prime).interior_point(), alcove_interior_point(c.tau)


def point_label(u: Sequence, theta: Sequence) -> StratumLabel:
    """The ambient stratum of a point of Delta x T^n: the cyclic partition of
    the angles and the support of the moment coordinates."""
    return StratumLabel(cyclic_partition_of(theta), [k for k, x in enumerate(u) if x != 0])


def cell_in_closure(n: int, a: TripleCell, b: TripleCell) -> bool:
    """Whether the sample point of cell a lies in the closure of cell b."""
    u, theta = cell_interior_point(n, a)
    return face_P(n, b.i, b.i_prime).closure_contains_point(u) and in_alcove(theta, b.tau)


@dataclass(frozen=True)
class OrderCheck:
    pairs: int
    label_mismatches: list
    order_mismatches: list

    @property
    def ok(self) -> bool:
        return not self.label_mismatches and not self.order_mismatches


def geometric_order_check(sigma: CyclicPartition, j: Iterable[int]) -> OrderCheck:
    """Compare the literal triple order and cell labels with sampled geometry."""
    psi = build_psi(sigma, j)
    n = len(sigma.ground) - 1
    cells = list(psi.cells.elements)
    bad_labels = []
    for c in cells:
        u, theta = cell_interior_point(n, c)
        if point_label(u, theta) != c.label():
            bad_labels.append(c)
    bad_order = []
    for a in cells:
        for b in cells:
            if triple_leq(a, b) != cell_in_closure(n, a, b):
                bad_order.append((a, b))
    return OrderCheck(len(cells) ** 2, bad_labels, bad_order)


def psi_strata_poset(n: int) -> FacePoset:
    """Labels of the closed strata ordered by inclusion of their cell sets.

    A closed stratum is a union of closed top cells, so x lies below y iff
    every top-dimensional cell of x is a cell of y.
    """
    labels = sorted(W_elements(n))
    cellsets = {}
    tops = {}
    for x in labels:
        cells = legitimate_triples(x.sigma, x.j)
        cellsets[x] = frozenset(cells)
        tops[x] = [c for c in cells if c.dim == x.rank]
    by_rank: dict[int, list] = {}
    for x in labels:
        by_rank.setdefault(x.rank, []).append(x)
    covers = []
    for x in labels:
        for y in by_rank.get(x.rank + 1, []):
            if all(c in cellsets[y] for c in tops[x]):
                covers.append((x, y))
    return FacePoset(labels, covers, rank=lambda e: e.rank)


# --------------------------------------------------------------------------
# local fans


@dataclass
class LocalFan:
    vertex: TripleCell
    star: FacePoset
    tropical_support: list[frozenset[int]]
    central: bool


def local_fan(psi: PsiComplex, vertex: TripleCell) -> LocalFan:
    """The incident cells of a vertex; their local cones have the cells'
    dimensions and the same incidences."""
    p = psi.cells
    if vertex not in p or vertex.dim != 0:
        raise ValueError(f"{vertex} is not a vertex of the complex")
    star = p.restrict(p.up_set(vertex))
    support = sorted({c.i for c in star.elements}, key=lambda s: (len(s), sorted(s)))
    return LocalFan(vertex, star, support, vertex.i == psi.j)


def _product_of_simplices_dual(minus: frozenset[int], plus: frozenset[int]) -> FacePoset:
    """Faces of Delta_minus x Delta_plus with the order reversed, labelled
    by the union of the two vertex sets."""
    def subsets(s):
        return [frozenset(c) for r in range(1, len(s) + 1) for c in combinations(sorted(s), r)]
    elems = [a | b for a in subsets(minus) for b in subsets(plus)]
    covers = [(x | {k}, x) for x in elems for k in (minus | plus) - x]
    top = len(minus) + len(plus)
    return FacePoset(elems, covers, rank=lambda x: top - len(x))


@dataclass(frozen=True)
class LocalFanReport:
    ok: bool
    detail: str


@lru_cache(maxsize=64)
def _psi_cached(sigma: CyclicPartition, j: frozenset[int]) -> PsiComplex:
    return build_psi(sigma, j)


def local_fan_check(sigma: CyclicPartition, j: Iterable[int], vertex: TripleCell) -> LocalFanReport:
    psi = _psi_cached(sigma, frozenset(j))
    fan = local_fan(psi, vertex)
    n = len(sigma.ground) - 1
    chord = vertex.tau.chords[0]
    minus = vertex.tau.side(chord)
    plus = sigma.ground - minus
    if fan.central:
        jm, jp = minus & psi.j, plus & psi.j
        expected = _product_of_simplices_dual(jm, jp)
        got = [s for s in fan.tropical_support]
        cone_poset = FacePoset(got, [(a, b) for a in got for b in got
                                     if b < a and len(a) == len(b) + 1],
                               rank=lambda s: len(psi.j) - len(s))
        if set(got) != set(expected.elements) or poset_isomorphic(cone_poset, expected) is None:
            return LocalFanReport(False, "tropical support is not dual to the product of simplices")
        # fibres: the alcoves at the vertex are the nets above the vertex net
        a = pi_point(n, minus)
        for i in got:
            for tau in _nets(n):
                if not (refines(tau.sigma, sigma) and tau.divides(i)):
                    continue
                if in_alcove(a, tau) != net_leq(vertex.tau, tau):
                    return LocalFanReport(False, f"alcove {tau} disagrees at the vertex")
        return LocalFanReport(True, f"dual to Delta{len(jm) - 1} x Delta{len(jp) - 1}")
    # non-central: the star is the star in Psi(sigma, I) times a cube on J - I
    inner = _psi_cached(sigma, vertex.i)
    inner_star = local_fan(inner, vertex).star
    extra = sorted(psi.j - vertex.i)
    elems = [(c, frozenset(s)) for c in inner_star.elements
             for r in range(len(extra) + 1) for s in combinations(extra, r)]
    present = set(elems)
    covers = []
    for c, s in elems:
        for k in extra:
            if k not in s:
                covers.append(((c, s), (c, s | {k})))
    for lo, hi in inner_star.covers():
        for s in {e[1] for e in elems}:
            if (lo, s) in present and (hi, s) in present:
                covers.append(((lo, s), (hi, s)))
    product = FacePoset(elems, covers, rank=lambda e: e[0].dim + len(e[1]))
    if poset_isomorphic(fan.star, product) is None:
        return LocalFanReport(False, "star is not the product with an orthant")
    return LocalFanReport(True, f"product with orthant of dimension {len(extra)}")


# --------------------------------------------------------------------------
# a dual pair of cones and its total supporting tangent space


@dataclass(frozen=True)
class ConeModel:
    """R = {v : g . v >= 0 for the generators g of the dual cone}."""

    dim: int
    dual_generators: tuple[tuple[Fraction, ...], ...]
    rays: tuple[tuple[int, ...], ...]
    v_tilde: tuple[Fraction, ...]
    lam_tilde: tuple[Fraction, ...]

    def __post_init__(self):
        if dot(self.lam_tilde, self.v_tilde) != 1:
            raise ValueError("need lambda~(v~) = 1")
        if any(dot(g, self.v_tilde) <= 0 for g in self.dual_generators):
            raise ValueError("v~ is not interior to R")
        if any(dot(self.lam_tilde, r) <= 0 for r in self.rays):
            raise ValueError("lambda~ is not interior to the dual cone")
        if any(dot(g, r) < 0 for g in self.dual_generators for r in self.rays):
            raise ValueError("a ray of R violates a dual generator")

    def contains(self, v: Sequence) -> bool:
        return all(dot(g, v) >= 0 for g in self.dual_generators)

    def on_boundary(self, v: Sequence) -> bool:
        return self.contains(v) and any(dot(g, v) == 0 for g in self.dual_generators)

    def project(self, v: Sequence) -> tuple[Fraction, ...]:
        """pi: V -> W = V / R v~, represented on the hyperplane lambda~ = 0."""
        t = dot(self.lam_tilde, v)
        return tuple(Fraction(x) - t * y for x, y in zip(v, self.v_tilde))


def cone_model(dual_generators: Sequence[Sequence], v_tilde: Sequence, lam_tilde: Sequence) -> ConeModel:
    gens = tuple(tuple(Fraction(x) for x in g) for g in dual_generators)
    d = len(gens[0])
    if rank(gens) < d:
        raise ValueError("the cone R must be pointed")
    rays = tuple(extreme_rays(gens))
    return ConeModel(d, gens, rays, tuple(Fraction(x) for x in v_tilde),
                     tuple(Fraction(x) for x in lam_tilde))


def _drop0(vec: Sequence) -> tuple[Fraction, ...]:
    """Coordinates on R^{n+1}/R normalized by x_0 = 0."""
    return tuple(Fraction(x) - Fraction(vec[0]) for x in vec[1:])


def two_partition_cone(minus: Iterable[int], plus: Iterable[int]) -> ConeModel:
    return _two_partition_cone(frozenset(minus), frozenset(plus))


@lru_cache(maxsize=None)
def _two_partition_cone(minus: frozenset[int], plus: frozenset[int]) -> ConeModel:
    """The cone x_a <= x_b (a in minus, b in plus) in R^{n+1}/R.

    Vectors use the coordinates x_1, ..., x_n with x_0 = 0; functionals
    e_b - e_a are written in the dual coordinates, dropping e_0.
    """
    minus, plus = sorted(set(minus)), sorted(set(plus))
    if not minus or not plus or set(minus) & set(plus):
        raise ValueError("need a 2-partition into non-empty parts")
    size = len(minus) + len(plus)
    if set(minus) | set(plus) != set(range(size)):
        raise ValueError("parts must cover 0..n")
    gens = []
    for a in minus:
        for b in plus:
            g = [Fraction(0)] * size
            g[b] += 1
            g[a] -= 1
            gens.append(g[1:])
    v = _drop0([int(k in plus) for k in range(size)])
    lam = [sum(col) / len(gens) for col in zip(*gens)]
    return cone_model(gens, v, lam)


def lift_vector(v: Sequence) -> tuple[Fraction, ...]:
    """Homogeneous coordinates [0, v_1, ..., v_n]."""
    return (Fraction(0),) + tuple(Fraction(x) for x in v)


def cone_tangent_total(c: ConeModel, v: Sequence, u: Sequence) -> bool:
    """(v, u) lies in T R: some non-zero lambda of the dual cone vanishes on
    both v and u.  The dual face at v is generated by the generators
    vanishing at v; a non-negative combination of them vanishes at u iff
    one of them does or two of them take opposite signs on u (the dual cone
    is pointed, so such a combination is non-zero).
    """
    if not c.contains(v):
        raise ValueError("v is not in the cone")
    vals = [dot(g, u) for g in c.dual_generators if dot(g, v) == 0]
    if not vals:
        return False
    return any(x == 0 for x in vals) or (any(x > 0 for x in vals) and any(x < 0 for x in vals))


def psi_stretch(c: ConeModel, v: Sequence, u: Sequence) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """psi(v, u) = (pi(v) + lambda~(u) pi(u), pi(u))."""
    if not cone_tangent_total(c, v, u):
        raise ValueError("(v, u) is not in the total supporting tangent space")
    pu = c.project(u)
    t = dot(c.lam_tilde, u)
    pv = c.project(v)
    return tuple(a + t * b for a, b in zip(pv, pu)), pu


def fiber_system(sigma: CyclicPartition, minus: Iterable[int], i: Iterable[int], u: Sequence) -> bool:
    """The inequality form of the tangent fibre over relint R_I for u in
    the cone C(sigma_0, sigma): the largest minus value on I reaches the
    smallest plus value, and the largest plus value reaches the smallest
    minus value, reading extremes along the runs of sigma."""
    minus = frozenset(minus)
    i = frozenset(i)
    order = [blk for blk in _runs(sigma, minus)]
    u = [Fraction(x) for x in u]
    minus_blocks = [b for b in order[0] if b & i]
    plus_blocks = [b for b in order[1] if b & i]
    if not minus_blocks or not plus_blocks:
        raise ValueError("I is not divided by the 2-partition")

    def val(block):
        return u[min(block & i)]
    return (val(minus_blocks[-1]) >= val(plus_blocks[0])
            and val(plus_blocks[-1]) >= val(minus_blocks[0]))


def _runs(sigma: CyclicPartition, minus: frozenset[int]):
    """The blocks of sigma as the two consecutive runs covering minus and its
    complement, each in cyclic order."""
    k = sigma.k
    inside = [bool(b <= minus) for b in sigma.blocks]
    if any(not (b <= minus or not (b & minus)) for b in sigma.blocks):
        raise ValueError("sigma does not refine the 2-partition")
    start = next(s for s in range(k) if inside[s] and not inside[s - 1])
    seq = [sigma.blocks[(start + t) % k] for t in range(k)]
    r = sum(inside)
    if not all(b <= minus for b in seq[:r]):
        raise ValueError("minus is not a run of sigma")
    return seq[:r], seq[r:]


def run_cone_contains(sigma: CyclicPartition, minus: Iterable[int], u: Sequence) -> bool:
    """u is constant on blocks and weakly increasing along each run."""
    minus = frozenset(minus)
    u = [Fraction(x) for x in u]
    for run in _runs(sigma, minus):
        vals = []
        for b in run:
            if len({u[x] for x in b}) != 1:
                return False
            vals.append(u[min(b)])
        if any(x > y for x, y in zip(vals, vals[1:])):
            return False
    return True


# --------------------------------------------------------------------------
# sampling for injectivity


def _random_tangent_pair(c: ConeModel, rng: random.Random, spread: int):
    """A random (v, u) in T R with small integer coordinates."""
    gens = c.dual_generators
    while True:
        chosen = [g for g in gens if rng.random() < 0.5] or [rng.choice(gens)]
        lam = [sum(col) for col in zip(*chosen)]
        face = [r for r in c.rays if dot(lam, r) == 0]
        if face:
            break
    v = [Fraction(0)] * c.dim
    for r in face:
        w = rng.randint(0, spread)
        v = [x + w * y for x, y in zip(v, r)]
    w = [Fraction(rng.randint(-spread, spread)) for _ in range(c.dim)]
    t = dot(lam, w) / dot(lam, c.v_tilde)
    u = [x - t * y for x, y in zip(w, c.v_tilde)]
    return tuple(v), tuple(u)


@dataclass(frozen=True)
class InjectivityReport:
    samples: int
    distinct: int
    collisions: list
    shared_second: int
    projection_ok: bool

    @property
    def ok(self) -> bool:
        return not self.collisions and self.projection_ok


def check_psi_injective(c: ConeModel, samples: int = 10_000, seed: int = 0,
                        spread: int = 3) -> InjectivityReport:
    """Hash psi over ``samples`` distinct seeded points of T R; any two
    distinct pairs with the same image are reported.  Coordinates are small
    integers (``spread`` grows only when the small box is exhausted) so
    that many samples share pi(u).  ``shared_second``
    counts sample pairs with a common pi(u), the pairs on which injectivity
    is a real constraint."""
    rng = random.Random(seed)
    points = set()
    stale = 0
    while len(points) < samples:
        before = len(points)
        points.add(_random_tangent_pair(c, rng, spread))
        stale = stale + 1 if len(points) == before else 0
        if stale > 20:
            # small cones run out of distinct small-integer points
            spread *= 2
            stale = 0
    seen: dict = {}
    collisions = []
    by_second: dict = {}
    projection_ok = True
    for v, u in sorted(points):
        image = psi_stretch(c, v, u)
        if image[1] != c.project(u):
            projection_ok = False
        prev = seen.setdefault(image, (v, u))
        if prev != (v, u):
            collisions.append((prev, (v, u)))
        by_second[image[1]] = by_second.get(image[1], 0) + 1
    shared = sum(m * (m - 1) // 2 for m in by_second.values())
    return InjectivityReport(len(points), len(seen), collisions, shared, projection_ok)


def two_partitions(n: int) -> list[tuple[frozenset[int], frozenset[int]]]:
    """Cyclic 2-partitions of 0..n with a chosen initial part."""
    out = []
    for sigma in enumerate_cyclic_partitions(n):
        if sigma.k == 2:
            a, b = sigma.blocks
            out.append((a, b))
            out.append((b, a))
    return out
