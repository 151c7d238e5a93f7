"""Nets: pairwise-crossing chord diagrams on a disk with labelled boundary arcs.

Vertex ``s`` of a k-gon sits between arc ``s - 1`` and arc ``s``, so a chord
``(a, b)`` with ``a < b`` has the arcs ``a, ..., b - 1`` on one side and the
remaining arcs on the other.  Nets are stored intrinsically: the arcs are
the blocks of sigma(tau) and every vertex is used by some chord.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable

from .cyclic import CyclicPartition, enumerate_cyclic_partitions, refines
from .poset import FacePoset


class NetError(ValueError):
    pass


def chords_cross(c1: tuple[int, int], c2: tuple[int, int]) -> bool:
    """Chords on a circle meet (possibly at an endpoint)."""
    a, b = sorted(c1)
    c, d = sorted(c2)
    if {a, b} & {c, d}:
        return True
    return (a < c < b) != (a < d < b)


@dataclass(frozen=True)
class Net:
    sigma: CyclicPartition
    chords: tuple[tuple[int, int], ...]
    base: CyclicPartition | None = field(default=None, compare=False, hash=False)

    @property
    def k(self) -> int:
        return self.sigma.k

    @property
    def l(self) -> int:
        return len(self.chords)

    @property
    def rank(self) -> int:
        return self.l - 1

    def side(self, chord: tuple[int, int]) -> frozenset[int]:
        """Elements on the arcs a, ..., b-1 of the chord (a, b)."""
        a, b = chord
        return frozenset().union(*(self.sigma.blocks[s] for s in range(a, b)))

    @cached_property
    def bipartitions(self) -> frozenset[frozenset[frozenset[int]]]:
        ground = self.sigma.ground
        out = set()
        for c in self.chords:
            s = self.side(c)
            out.add(frozenset({s, ground - s}))
        return frozenset(out)

    @cached_property
    def steps(self) -> tuple[tuple[int, ...], ...]:
        """Arcs crossed between consecutive chords along the midcircle.

        Chords are ordered by (a + b) mod k and lifted to integer pairs
        (p, q) in which both endpoints move forward by at most one arc per
        step; a step moving both endpoints is a trapezoid.
        """
        k = self.k
        ordered = sorted(self.chords, key=lambda c: ((c[0] + c[1]) % k, c))
        keys = [(a + b) % k for a, b in ordered]
        if len(set(keys)) != len(keys):
            raise NetError("two chords have the same direction")
        p, q = ordered[0]
        start = (p, q)
        out = []
        for a, b in ordered[1:] + [(q, p + k)]:
            lifted = None
            for x, y in ((a, b), (b, a)):
                for shift_x in (0, k):
                    for shift_y in (0, k, 2 * k):
                        xx, yy = x + shift_x, y + shift_y
                        dx, dy = xx - p, yy - q
                        if dx in (0, 1) and dy in (0, 1) and dx + dy > 0:
                            lifted = (xx, yy)
                            break
                    if lifted:
                        break
                if lifted:
                    break
            if lifted is None:
                raise NetError(f"chords do not form a net on {self.sigma}")
            arcs = []
            if lifted[0] != p:
                arcs.append(p % k)
            if lifted[1] != q:
                arcs.append(q % k)
            out.append(tuple(arcs))
            p, q = lifted
        if (p, q) != (start[1], start[0] + k):
            raise NetError("midcircle walk does not close up")
        return tuple(out)

    @cached_property
    def shuffle(self) -> CyclicPartition:
        blocks = [frozenset().union(*(self.sigma.blocks[s] for s in arcs)) for arcs in self.steps]
        return CyclicPartition(blocks)

    @cached_property
    def trapezoids(self) -> tuple[tuple[int, int], ...]:
        """Pairs of arcs (r, s), r < s, forming opposite sides of a trapezoid."""
        return tuple(sorted(tuple(sorted(arcs)) for arcs in self.steps if len(arcs) == 2))

    def divides(self, j: Iterable[int]) -> bool:
        j = frozenset(j)
        for c in self.chords:
            s = self.side(c)
            if not (j & s) or not (j - s):
                return False
        return True

    def relation(self, i: int, j: int) -> str | tuple[int, int]:
        """Relative position of two elements: ``"same"`` (no chord divides
        them), ``"antipodal"`` (every chord does), or the ordered pair
        ``(first, second)`` read counter-clockwise along a chord side that
        contains both.
        """
        bi, bj = self.sigma.block_index[i], self.sigma.block_index[j]
        if bi == bj:
            return "same"
        k = self.k
        for a, b in self.chords:
            side_arcs = list(range(a, b))
            other_arcs = [s % k for s in range(b, a + k)]
            for arcs in (side_arcs, other_arcs):
                if bi in arcs and bj in arcs:
                    return (i, j) if arcs.index(bi) < arcs.index(bj) else (j, i)
        return "antipodal"

    def __str__(self) -> str:
        inner = ",".join(f"({a},{b})" for a, b in self.chords)
        return f"net({self.sigma}; chords=[{inner}])"

    def sort_key(self):
        return (self.rank, self.sigma.sort_key(), self.chords)

    def __lt__(self, other: "Net") -> bool:
        return self.sort_key() < other.sort_key()

    def to_dict(self) -> dict:
        return {"sigma": str(self.sigma), "chords": [list(c) for c in self.chords],
                "shuffle": str(self.shuffle), "rank": self.rank}


def make_net(base: CyclicPartition, chords: Iterable[tuple[int, int]]) -> Net:
    """Validate a chord set on the vertices of ``base`` and return the
    intrinsic net (arcs merged across unused vertices).
    """
    k = base.k
    cl = []
    for c in chords:
        a, b = sorted(int(x) for x in c)
        if a == b or a < 0 or b >= k:
            raise NetError(f"invalid chord {c} for {k} vertices")
        cl.append((a, b))
    cl = sorted(set(cl))
    if not cl:
        raise NetError("a net needs at least one chord")
    for c1, c2 in combinations(cl, 2):
        if not chords_cross(c1, c2):
            raise NetError(f"chords {c1} and {c2} do not meet")
    used = sorted({v for c in cl for v in c})
    m = len(used)
    runs = []
    for t in range(m):
        a, b = used[t], used[(t + 1) % m]
        if b <= a:
            b += k
        runs.append(frozenset().union(*(base.blocks[s % k] for s in range(a, b))))
    sigma = CyclicPartition(runs)
    # run t starts at used[t]; find its position in canonical rotation
    offset = next(t for t in range(m) if runs[t] == sigma.blocks[0])
    renum = {used[t]: (t - offset) % m for t in range(m)}
    new = tuple(sorted(tuple(sorted((renum[a], renum[b]))) for a, b in cl))
    net = Net(sigma, new, base)
    net.steps  # validates the midcircle walk
    if len(net.shuffle.blocks) != net.l:
        raise NetError("shuffle block count differs from chord count")
    return net


def net_divides(net: Net, j: Iterable[int]) -> bool:
    return net.divides(j)


def shuffle_of(net: Net) -> CyclicPartition:
    return net.shuffle


def pairwise_crossing_families(k: int, spanning: bool = True) -> list[tuple[tuple[int, int], ...]]:
    """All non-empty pairwise-crossing chord sets on k vertices; with
    ``spanning`` only those using every vertex.
    """
    all_chords = list(combinations(range(k), 2))
    out = []

    def grow(chosen, start):
        if chosen:
            if not spanning or len({v for c in chosen for v in c}) == k:
                out.append(tuple(chosen))
        for t in range(start, len(all_chords)):
            c = all_chords[t]
            if all(chords_cross(c, d) for d in chosen):
                chosen.append(c)
                grow(chosen, t + 1)
                chosen.pop()

    grow([], 0)
    return out


def nets_on(sigma: CyclicPartition) -> list[Net]:
    """Nets whose coarsened partition is exactly ``sigma``."""
    if sigma.k < 2:
        return []
    return sorted(Net(sigma, fam) for fam in pairwise_crossing_families(sigma.k))


def enumerate_nets(n: int) -> list[Net]:
    out = []
    for sigma in enumerate_cyclic_partitions(n):
        out.extend(nets_on(sigma))
    for net in out:
        net.steps
    return sorted(out)


def net_leq(a: Net, b: Net) -> bool:
    """a is a face of b: a's chords are among b's, as bipartitions."""
    return a.bipartitions <= b.bipartitions and refines(a.sigma, b.sigma)


def sub_net(net: Net, chords: Iterable[tuple[int, int]]) -> Net:
    return make_net(net.sigma, chords)


def net_facets(net: Net) -> list[Net]:
    """Nets obtained by deleting one chord."""
    if net.l == 1:
        return []
    return [sub_net(net, [c for c in net.chords if c != drop]) for drop in net.chords]


def net_poset(nets: Iterable[Net]) -> FacePoset:
    nets = sorted(set(nets))
    present = set(nets)
    covers = []
    for t in nets:
        for f in net_facets(t):
            if f in present:
                covers.append((f, t))
    return FacePoset(nets, covers, rank=lambda t: t.rank)


def maximal_nets(sigma: CyclicPartition) -> list[Net]:
    return [t for t in nets_on(sigma) if t.l == sigma.k]
