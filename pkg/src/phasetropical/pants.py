"""Closed broken lines with n+1 marked sides: the compactified pair of pants.

A point is a closed circuit z_0 + ... + z_n = 0 of plane vectors with at
least two non-zero sides, up to rotation and positive scaling.  Sides of
length zero keep a recorded direction.  Everything is exact over Q^2:
directions are compared by quadrant and cross-product sign only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import pi, tan
from typing import Iterable, Mapping, Sequence

from .cyclic import CyclicPartition, StratumLabel, W_elements, label_leq
from .poset import FacePoset

Vec = tuple[Fraction, Fraction]
ZERO: Vec = (Fraction(0), Fraction(0))


def vec(x, y) -> Vec:
    return (Fraction(x), Fraction(y))


def cross(a: Vec, b: Vec) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


def dot(a: Vec, b: Vec) -> Fraction:
    return a[0] * b[0] + a[1] * b[1]


def add(a: Vec, b: Vec) -> Vec:
    return (a[0] + b[0], a[1] + b[1])


def scale(c, a: Vec) -> Vec:
    return (c * a[0], c * a[1])


def cmul(a: Vec, b: Vec) -> Vec:
    """Product of Gaussian rationals."""
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def cdiv(a: Vec, b: Vec) -> Vec:
    n = dot(b, b)
    return ((a[0] * b[0] + a[1] * b[1]) / n, (a[1] * b[0] - a[0] * b[1]) / n)


def is_zero(a: Vec) -> bool:
    return a[0] == 0 and a[1] == 0


def upper(a: Vec) -> bool:
    """Argument in [0, pi)."""
    return a[1] > 0 or (a[1] == 0 and a[0] > 0)


def same_direction(a: Vec, b: Vec) -> bool:
    return cross(a, b) == 0 and dot(a, b) > 0


def antipodal(a: Vec, b: Vec) -> bool:
    return cross(a, b) == 0 and dot(a, b) < 0


def compare_args(a: Vec, b: Vec) -> int:
    """Order by argument in [0, 2pi)."""
    ha, hb = upper(a), upper(b)
    if ha != hb:
        return -1 if ha else 1
    c = cross(a, b)
    return -1 if c > 0 else (1 if c < 0 else 0)


def unit_direction(t) -> Vec:
    """Rational point of the unit circle at parameter t = tan(phi / 2)."""
    t = Fraction(t)
    d = 1 + t * t
    return ((1 - t * t) / d, 2 * t / d)


def rotation(t) -> Vec:
    return unit_direction(t)


class PolygonError(ValueError):
    pass


@dataclass(frozen=True)
class PolygonPoint:
    edges: tuple[Vec, ...]
    directions: Mapping[int, Vec] = field(default_factory=dict, compare=False, hash=False)

    def __init__(self, edges: Iterable[Sequence], directions: Mapping[int, Sequence] | None = None):
        es = tuple(vec(*e) for e in edges)
        dirs = {int(i): vec(*d) for i, d in (directions or {}).items()}
        total = ZERO
        for e in es:
            total = add(total, e)
        if not is_zero(total):
            raise PolygonError("sides do not close up")
        if sum(1 for e in es if not is_zero(e)) < 2:
            raise PolygonError("a closed circuit needs at least two non-zero sides")
        for i, e in enumerate(es):
            if is_zero(e):
                if i not in dirs or is_zero(dirs[i]):
                    raise PolygonError(f"zero side {i} has no recorded direction")
            else:
                dirs.pop(i, None)
        object.__setattr__(self, "edges", es)
        object.__setattr__(self, "directions", dirs)

    @property
    def n(self) -> int:
        return len(self.edges) - 1

    def direction(self, i: int) -> Vec:
        e = self.edges[i]
        return e if not is_zero(e) else self.directions[i]

    @property
    def support(self) -> frozenset[int]:
        return frozenset(i for i, e in enumerate(self.edges) if not is_zero(e))

    def equivalent(self, other: "PolygonPoint") -> bool:
        """Equal up to rotation and positive scaling: one Gaussian-rational
        factor c with other_i = c * self_i for every side."""
        if len(self.edges) != len(other.edges) or self.support != other.support:
            return False
        k = min(self.support)
        c = cdiv(other.edges[k], self.edges[k])
        for i in range(len(self.edges)):
            if not same_direction(cmul(c, self.direction(i)), other.direction(i)):
                return False
            if i in self.support and cmul(c, self.edges[i]) != other.edges[i]:
                return False
        return True

    def to_json(self) -> str:
        def enc(v: Vec):
            return [v[0].numerator, v[0].denominator, v[1].numerator, v[1].denominator]

        return json.dumps({"edges": [enc(e) for e in self.edges],
                           "dirs": {str(i): enc(d) for i, d in sorted(self.directions.items())}})

    @classmethod
    def from_json(cls, text: str) -> "PolygonPoint":
        data = json.loads(text)

        def dec(v):
            return (Fraction(v[0], v[1]), Fraction(v[2], v[3]))

        return cls([dec(e) for e in data["edges"]], {int(i): dec(d) for i, d in data.get("dirs", {}).items()})

    def vertices(self) -> list[Vec]:
        out = [ZERO]
        for e in self.edges:
            out.append(add(out[-1], e))
        return out[:-1]


def arg_map(p: PolygonPoint) -> tuple[Vec, ...]:
    """Directions of all sides (recorded ones for sides of length zero)."""
    return tuple(p.direction(i) for i in range(len(p.edges)))


def direction_partition(dirs: Sequence[Vec]) -> CyclicPartition:
    """Group equal directions and order the groups counter-clockwise."""
    order = sorted(range(len(dirs)), key=cmp_to_key(lambda i, j: compare_args(dirs[i], dirs[j])))
    blocks: list[list[int]] = []
    for i in order:
        if blocks and same_direction(dirs[blocks[-1][0]], dirs[i]):
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return CyclicPartition(blocks)


def classify(p: PolygonPoint) -> StratumLabel:
    label = StratumLabel(direction_partition(arg_map(p)), p.support)
    if not label.in_W():
        raise PolygonError(f"classification {label} is not in W")
    return label


def is_convex_circuit(p: PolygonPoint) -> bool:
    """The polygon drawn with the non-zero sides in counter-clockwise order
    of their arguments: every turn is counter-clockwise and the sides wind
    around once."""
    sigma = direction_partition(arg_map(p))
    es = [p.edges[i] for b in sigma.blocks for i in sorted(b) if not is_zero(p.edges[i])]
    if len(es) < 3:
        return False
    turns = sum(1 for a, b in zip(es, es[1:] + es[:1]) if cross(a, b) > 0)
    if turns != len(es):
        return False
    # total winding: exactly one side starts in each half-turn crossing
    crossings = sum(1 for a, b in zip(es, es[1:] + es[:1]) if upper(a) and not upper(b))
    return crossings == 1


# --------------------------------------------------------------------------
# positive closure


def positive_closure_weights(dirs: Sequence[Vec]) -> list[Fraction] | None:
    """Positive weights w with sum w_i d_i = 0, or None.

    Sums the Cramer solutions of every strictly positively spanning triple
    and of every antipodal pair; the result is positive exactly when every
    direction takes part in one of these, which holds whenever the
    directions positively span a line or the plane.
    """
    m = len(dirs)
    w = [Fraction(0)] * m
    for a in range(m):
        for b in range(a + 1, m):
            if antipodal(dirs[a], dirs[b]):
                w[a] += dot(dirs[b], dirs[b])
                w[b] += -dot(dirs[a], dirs[b])
            for c in range(b + 1, m):
                x, y, z = cross(dirs[b], dirs[c]), cross(dirs[c], dirs[a]), cross(dirs[a], dirs[b])
                if (x > 0 and y > 0 and z > 0) or (x < 0 and y < 0 and z < 0):
                    s = 1 if x > 0 else -1
                    w[a] += s * x
                    w[b] += s * y
                    w[c] += s * z
    if any(x <= 0 for x in w):
        return None
    return w


def _block_directions(sigma: CyclicPartition, j: frozenset[int]) -> list[Vec]:
    """Rational directions for the blocks of sigma in counter-clockwise
    order: blocks meeting J evenly spread, the others inside the gaps.
    With two J-blocks those are exactly opposite.
    """
    blocks = sigma.blocks
    k = len(blocks)
    jpos = [s for s in range(k) if blocks[s] & j]
    r = len(jpos)
    angle = [0.0] * k
    for t, s in enumerate(jpos):
        angle[s] = 2 * pi * t / r
        nxt = jpos[(t + 1) % r] if t + 1 < r else jpos[0] + k
        between = list(range(s + 1, nxt))
        for u, b in enumerate(between):
            angle[b % k] = 2 * pi * (t + (u + 1) / (len(between) + 1)) / r
    out = []
    for s in range(k):
        a = angle[s]
        if r == 2 and s in jpos:
            out.append(vec(1, 0) if a == 0 else vec(-1, 0))
        elif abs(a - pi) < 1e-12:
            out.append(vec(-1, 0))
        else:
            phi = a if a < pi else a - 2 * pi
            t = Fraction(tan(phi / 2)).limit_denominator(10 ** 6)
            out.append(unit_direction(t))
    return out


def witness(label: StratumLabel) -> PolygonPoint:
    """A polygon in the stratum of ``label``."""
    if not label.in_W():
        raise PolygonError(f"{label} is not in W")
    sigma, j = label.sigma, label.j
    bdirs = _block_directions(sigma, j)
    jblocks = [s for s in range(sigma.k) if sigma.blocks[s] & j]
    weights = positive_closure_weights([bdirs[s] for s in jblocks])
    if weights is None:
        raise PolygonError(f"could not close the circuit for {label}")
    n = max(sigma.ground)
    edges = [ZERO] * (n + 1)
    dirs = {}
    for s, blk in enumerate(sigma.blocks):
        for i in blk:
            dirs[i] = bdirs[s]
    for w, s in zip(weights, jblocks):
        members = sorted(sigma.blocks[s] & j)
        for i in members:
            edges[i] = scale(w / len(members), bdirs[s])
    return PolygonPoint(edges, {i: d for i, d in dirs.items() if i not in j})


# --------------------------------------------------------------------------
# closure order


def closure_contains(outer: StratumLabel, inner: StratumLabel) -> bool:
    """Whether the closure of the stratum of ``outer`` contains the stratum of ``inner``."""
    for x in (outer, inner):
        if not x.in_W():
            raise PolygonError(f"{x} is not in W")
    return label_leq(inner, outer)


def deformation(outer: StratumLabel, q: PolygonPoint, eps) -> PolygonPoint | None:
    """A point of the stratum of ``outer`` within O(eps) of ``q``, or None
    when the small deformation below does not exist.

    Continuity forces three conditions, tested first: non-zero sides of q
    stay non-zero, the sides of one outer block share a direction in q,
    and the outer cyclic order sweeps the directions of q monotonically.
    Then blocks sharing a q-direction are fanned out by angles of order
    eps^2, sides of length zero in q grow to length eps^3, and the closing
    defect (of order eps^3) is absorbed by the sides that are long in q.
    Fan angles are centred with the side lengths as weights, so the
    long sides of one direction stay balanced.
    """
    eps = Fraction(eps)
    sigma, j = outer.sigma, outer.j
    if not q.support <= j:
        return None
    qdirs = arg_map(q)
    base = []
    for blk in sigma.blocks:
        ds = [qdirs[i] for i in blk]
        if not all(same_direction(ds[0], d) for d in ds):
            return None
        base.append(ds[0])
    k = sigma.k
    qpart = direction_partition(base)
    group = [qpart.block_index[s] for s in range(k)]
    m = qpart.k
    if m == 1:
        # one direction only: q cannot be a closed circuit
        return None
    start = next(s for s in range(k) if group[s] != group[s - 1])
    position = [0] * k
    seen = []
    for t in range(k):
        s = (start + t) % k
        if t > 0 and group[s] == group[(s - 1) % k]:
            position[s] = position[(s - 1) % k] + 1
        else:
            seen.append(group[s])
    if len(seen) != len(set(seen)):
        return None
    first = seen.index(min(seen))
    rolled = seen[first:] + seen[:first]
    if rolled != sorted(rolled):
        return None

    gdir = {}
    for s in range(k):
        gdir.setdefault(group[s], base[s])
    # length of each side along its group direction
    lam = [Fraction(0)] * (q.n + 1)
    for s, blk in enumerate(sigma.blocks):
        g = gdir[group[s]]
        for i in blk:
            if i in q.support:
                lam[i] = dot(q.edges[i], g) / dot(g, g)
    heavy = [sum(lam[i] for i in blk) for blk in sigma.blocks]
    offsets = [Fraction(0)] * k
    runs: dict[int, list[int]] = {}
    for s in range(k):
        runs.setdefault(group[s], []).append(s)
    for g, run in runs.items():
        weight = sum(heavy[s] for s in run)
        if weight:
            centre = sum(heavy[s] * position[s] for s in run) / weight
        else:
            centre = Fraction(sum(position[s] for s in run), len(run))
        for s in run:
            offsets[s] = position[s] - centre
    newdirs = [cmul(gdir[group[s]], rotation(eps * eps * offsets[s])) for s in range(k)]

    n = q.n
    edges = [ZERO] * (n + 1)
    for s, blk in enumerate(sigma.blocks):
        for i in blk:
            if i in q.support:
                edges[i] = scale(lam[i], newdirs[s])
            elif i in j:
                edges[i] = scale(eps ** 3, newdirs[s])
    defect = ZERO
    for e in edges:
        defect = add(defect, e)
    if not is_zero(defect):
        single = [run for run in runs.values() if sum(1 for s in run if heavy[s]) == 1]
        if single:
            (b,) = [s for s in single[0] if heavy[s]]
            # spread over the block in proportion, so its sides stay parallel
            mu = {i: lam[i] if lam[i] else eps ** 3 for i in sigma.blocks[b] if i in j}
            total = sum(mu.values())
            for i, w in mu.items():
                edges[i] = add(edges[i], scale(-w / total, defect))
        else:
            run = next(run for run in runs.values() if sum(1 for s in run if heavy[s]) >= 2)
            hs = [s for s in run if heavy[s]]
            b1, b2 = hs[0], hs[-1]
            d1, d2 = newdirs[b1], newdirs[b2]
            det = cross(d1, d2)
            v = scale(-1, defect)
            c1 = cross(v, d2) / det
            c2 = cross(d1, v) / det
            for b, c in ((b1, c1), (b2, c2)):
                for i in sigma.blocks[b]:
                    if lam[i]:
                        edges[i] = add(edges[i], scale(c * lam[i] / heavy[b], newdirs[b]))
    # zero sides follow the (possibly adjusted) direction of their block
    blockdir = list(newdirs)
    for s, blk in enumerate(sigma.blocks):
        for i in blk:
            if not is_zero(edges[i]):
                blockdir[s] = edges[i]
                break
    dirs = {i: blockdir[sigma.block_index[i]] for i in range(n + 1) if is_zero(edges[i])}
    try:
        return PolygonPoint(edges, dirs)
    except PolygonError:
        return None


def _cone_decomposition(v: Vec, dirs: Sequence[Vec]) -> list[Fraction] | None:
    """Non-negative c with sum c_i d_i = v using at most two directions,
    with the smallest total coefficient among those choices."""
    m = len(dirs)
    best = None
    for a in range(m):
        if same_direction(v, dirs[a]):
            out = [Fraction(0)] * m
            out[a] = dot(v, dirs[a]) / dot(dirs[a], dirs[a])
            if best is None or sum(out) < sum(best):
                best = out
    for a in range(m):
        for b in range(a + 1, m):
            det = cross(dirs[a], dirs[b])
            if det == 0:
                continue
            ca = cross(v, dirs[b]) / det
            cb = cross(dirs[a], v) / det
            if ca >= 0 and cb >= 0:
                out = [Fraction(0)] * m
                out[a] += ca
                out[b] += cb
                if best is None or sum(out) < sum(best):
                    best = out
    return best


def closure_contains_geometric(outer: StratumLabel, inner: StratumLabel,
                               eps_values: Sequence = (Fraction(1, 100), Fraction(1, 1000), Fraction(1, 10000))) -> bool:
    """Deform the witness of ``inner`` into the stratum of ``outer`` along
    shrinking eps and check that the deformed points classify as ``outer``
    and converge to the witness (sides within O(eps))."""
    q = witness(inner)
    scale_q = max(max(abs(x) for x in e) for e in q.edges)
    for eps in eps_values:
        p = deformation(outer, q, eps)
        if p is None or classify(p) != outer:
            return False
        gap = max(max(abs(a - b) for a, b in zip(e, f)) for e, f in zip(p.edges, q.edges))
        if gap > 100 * len(q.edges) * eps * max(scale_q, 1):
            return False
    return True


def complex_side_poset(n: int, geometric: bool = False) -> FacePoset:
    """Strata of the compactified pants: every label of W that is realized
    by a witness polygon, ordered by closure."""
    labels = []
    for x in W_elements(n):
        p = witness(x)
        if classify(p) != x:
            raise PolygonError(f"witness for {x} classifies as {classify(p)}")
        labels.append(x)
    labels.sort()
    test = closure_contains_geometric if geometric else closure_contains
    by_rank: dict[int, list[StratumLabel]] = {}
    for x in labels:
        by_rank.setdefault(x.rank, []).append(x)
    covers = []
    for x in labels:
        for y in by_rank.get(x.rank - 1, []):
            # a side vanishing on x vanishes on its closure
            if geometric and not y.j <= x.j:
                continue
            if test(x, y):
                covers.append((y, x))
    return FacePoset(labels, covers, rank=lambda e: e.rank)


# --------------------------------------------------------------------------
# export


def to_svg(p: PolygonPoint, size: int = 200) -> str:
    pts = p.vertices()
    xs = [float(v[0]) for v in pts]
    ys = [float(v[1]) for v in pts]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    sc = 0.8 * size / span
    ox = size / 2 - sc * (max(xs) + min(xs)) / 2
    oy = size / 2 + sc * (max(ys) + min(ys)) / 2
    coords = [(ox + sc * x, oy - sc * y) for x, y in zip(xs, ys)]
    path = " ".join(f"{x:.2f},{y:.2f}" for x, y in coords)
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
             f'<polygon points="{path}" fill="none" stroke="black"/>']
    for i, (x, y) in enumerate(coords):
        lines.append(f'<text x="{x:.2f}" y="{y:.2f}" font-size="10">{i}</text>')
    lines.append("</svg>")
    return "\n".join(lines)
