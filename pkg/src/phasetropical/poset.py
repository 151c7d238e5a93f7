"""Finite graded posets, order-complex homology, isomorphism and collapses.

A ``FacePoset`` stores only its covering relation; down-sets, up-sets and
intervals are derived on demand with integer bitmasks, which keeps the
larger lattices (tens of thousands of elements) cheap to hold.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence


def _text(label) -> str:
    return label if isinstance(label, str) else str(label)


class FacePoset:
    """A finite poset given by its covering pairs ``(lower, upper)``.

    ``rank`` may be a mapping or a callable on labels; when omitted the rank
    of an element is the length of the longest chain below it.  With
    ``graded=True`` every cover must raise the rank by exactly one.
    """

    def __init__(self, elements: Iterable[Hashable], covers: Iterable[tuple],
                 rank=None, graded: bool = True):
        self.elements: tuple = tuple(elements)
        self.index: dict = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ValueError("duplicate elements")
        n = len(self.elements)
        self.up: list[list[int]] = [[] for _ in range(n)]
        self.down: list[list[int]] = [[] for _ in range(n)]
        seen = set()
        for lo, hi in covers:
            try:
                a, b = self.index[lo], self.index[hi]
            except KeyError as exc:
                raise ValueError(f"cover mentions unknown element {exc}") from None
            if a == b:
                raise ValueError("an element cannot cover itself")
            if (a, b) in seen:
                continue
            seen.add((a, b))
            self.up[a].append(b)
            self.down[b].append(a)
        for lst in self.up:
            lst.sort()
        for lst in self.down:
            lst.sort()
        self.topo = self._topological_order()
        if rank is None:
            rk = [0] * n
            for i in self.topo:
                for j in self.up[i]:
                    rk[j] = max(rk[j], rk[i] + 1)
            self.rank = rk
        elif callable(rank):
            self.rank = [int(rank(e)) for e in self.elements]
        else:
            self.rank = [int(rank[e]) for e in self.elements]
        self.graded = graded
        if graded:
            for a, b in seen:
                if self.rank[b] != self.rank[a] + 1:
                    raise ValueError(
                        f"cover {_text(self.elements[a])} < {_text(self.elements[b])} "
                        "does not raise rank by one")
        self._down_masks = None
        self._up_masks = None

    # -- basic structure -------------------------------------------------

    def _topological_order(self) -> list[int]:
        n = len(self.elements)
        indeg = [len(d) for d in self.down]
        queue = deque(i for i in range(n) if indeg[i] == 0)
        order = []
        while queue:
            i = queue.popleft()
            order.append(i)
            for j in self.up[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    queue.append(j)
        if len(order) != n:
            raise ValueError("covering relation has a cycle")
        return order

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.index

    def __iter__(self):
        return iter(self.elements)

    def _idx(self, x) -> int:
        try:
            return self.index[x]
        except KeyError:
            raise KeyError(f"unknown element {_text(x)}") from None

    def rank_of(self, x) -> int:
        return self.rank[self._idx(x)]

    def covers(self) -> list[tuple]:
        return [(self.elements[a], self.elements[b])
                for a in range(len(self.elements)) for b in self.up[a]]

    def n_covers(self) -> int:
        return sum(len(u) for u in self.up)

    def down_masks(self) -> list[int]:
        """Bitmask of the closed down-set of every element."""
        if self._down_masks is None:
            masks = [0] * len(self.elements)
            for i in self.topo:
                m = 1 << i
                for j in self.down[i]:
                    m |= masks[j]
                masks[i] = m
            self._down_masks = masks
        return self._down_masks

    def up_masks(self) -> list[int]:
        if self._up_masks is None:
            masks = [0] * len(self.elements)
            for i in reversed(self.topo):
                m = 1 << i
                for j in self.up[i]:
                    m |= masks[j]
                masks[i] = m
            self._up_masks = masks
        return self._up_masks

    def down_set(self, x) -> set[int]:
        """Indices of the closed down-set, computed by search (no global masks)."""
        start = self._idx(x)
        seen = {start}
        stack = [start]
        while stack:
            i = stack.pop()
            for j in self.down[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen

    def up_set(self, x) -> set[int]:
        start = self._idx(x)
        seen = {start}
        stack = [start]
        while stack:
            i = stack.pop()
            for j in self.up[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen

    def leq(self, x, y) -> bool:
        i, j = self._idx(x), self._idx(y)
        if self._down_masks is not None:
            return bool(self._down_masks[j] >> i & 1)
        if self.rank[i] > self.rank[j]:
            return False
        return i in self.down_set(y)

    def minimal(self) -> list:
        return [e for i, e in enumerate(self.elements) if not self.down[i]]

    def maximal(self) -> list:
        return [e for i, e in enumerate(self.elements) if not self.up[i]]

    def f_vector(self) -> list[int]:
        if not self.elements:
            return []
        counts = Counter(self.rank)
        return [counts.get(r, 0) for r in range(max(self.rank) + 1)]

    def euler(self) -> int:
        return sum((-1) ** r for r in self.rank)

    # -- sub-posets --------------------------------------------------------

    def restrict(self, indices: Iterable[int]) -> "FacePoset":
        """Induced sub-poset on a convex set of indices such as a down-set,
        an up-set or an interval (covers then restrict to covers).
        """
        keep = sorted(set(indices))
        kept = set(keep)
        elems = [self.elements[i] for i in keep]
        covers = [(self.elements[i], self.elements[j]) for i in keep for j in self.up[i] if j in kept]
        ranks = {self.elements[i]: self.rank[i] for i in keep}
        return FacePoset(elems, covers, ranks, graded=self.graded)

    def subposet(self, labels: Iterable) -> "FacePoset":
        return self.restrict(self._idx(x) for x in labels)

    def interval_indices(self, x, y) -> set[int]:
        lo = self.up_set(x)
        hi = self.down_set(y)
        if self._idx(x) not in hi:
            raise ValueError(f"{_text(x)} is not below {_text(y)}")
        return lo & hi

    def interval(self, x, y) -> "FacePoset":
        return self.restrict(self.interval_indices(x, y))

    # -- exports -----------------------------------------------------------

    def to_json(self) -> str:
        elems = sorted(((_text(e), self.rank[i]) for i, e in enumerate(self.elements)))
        covers = sorted((_text(a), _text(b)) for a, b in self.covers())
        data = {"elements": [{"id": t, "rank": r} for t, r in elems],
                "covers": [list(c) for c in covers]}
        return json.dumps(data, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "FacePoset":
        data = json.loads(text)
        ranks = {e["id"]: e["rank"] for e in data["elements"]}
        return cls(list(ranks), [tuple(c) for c in data["covers"]], ranks)

    def to_dot(self, name: str = "poset") -> str:
        ids = {e: f"n{i}" for i, e in enumerate(sorted(self.elements, key=_text))}
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for e in sorted(self.elements, key=_text):
            label = _text(e).replace('"', '\\"')
            lines.append(f'  {ids[e]} [label="{label}"];')
        for a, b in sorted(self.covers(), key=lambda c: (_text(c[0]), _text(c[1]))):
            lines.append(f"  {ids[a]} -> {ids[b]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# intervals


def lower_interval(p: FacePoset, x) -> FacePoset:
    return p.restrict(p.down_set(x))


def is_boolean_interval(p: FacePoset, x, y) -> bool:
    """Whether [x, y] is isomorphic to the lattice of subsets of a set of
    size rk(y) - rk(x).
    """
    idx = sorted(p.interval_indices(x, y))
    return _boolean_check(p, p._idx(x), idx)


def _boolean_check(p: FacePoset, bottom: int, idx: Sequence[int]) -> bool:
    inside = set(idx)
    d = max(p.rank[i] for i in idx) - p.rank[bottom]
    if len(idx) != 1 << d:
        return False
    atoms = [i for i in p.up[bottom] if i in inside]
    if len(atoms) != d:
        return False
    position = {a: k for k, a in enumerate(atoms)}
    sets: dict[int, int] = {bottom: 0}
    for i in sorted(idx, key=lambda t: p.rank[t]):
        if i == bottom:
            continue
        s = 0
        for j in p.down[i]:
            if j in inside:
                s |= sets[j] if j != bottom else (1 << position[i])
        sets[i] = s
    seen = set()
    for i in idx:
        s = sets[i]
        if bin(s).count("1") != p.rank[i] - p.rank[bottom] or s in seen:
            return False
        seen.add(s)
        ups = sum(1 for j in p.up[i] if j in inside)
        if ups != d - (p.rank[i] - p.rank[bottom]):
            return False
    return True


def all_intervals_boolean(p: FacePoset) -> tuple[bool, tuple | None]:
    """Check that every interval of ``p`` is Boolean.

    Any interval [x, y] sits inside some [m, M] with m minimal and M maximal,
    and intervals of a Boolean lattice are Boolean, so only those extreme
    intervals are examined.  Returns (ok, offending pair or None).
    """
    for top in p.maximal():
        down = p.down_set(top)
        ordered = sorted(down)
        # up-sets inside the lower interval of ``top``
        upm: dict[int, set[int]] = {}
        for i in sorted(ordered, key=lambda t: -p.rank[t]):
            s = {i}
            for j in p.up[i]:
                if j in down:
                    s |= upm[j]
            upm[i] = s
        for m in ordered:
            if any(j in down for j in p.down[m]):
                continue
            if not _boolean_check(p, m, sorted(upm[m])):
                return False, (p.elements[m], top)
    return True, None


# --------------------------------------------------------------------------
# homology of the order complex

_PRIME = 2_147_483_647


@dataclass(frozen=True)
class ChainComplexSummary:
    betti: list[int]
    euler: int
    cells: list[int] = field(default_factory=list)


def order_complex_chains(p: FacePoset) -> list[list[tuple[int, ...]]]:
    """All chains of ``p`` grouped by dimension (a chain of k+1 elements has
    dimension k); each chain is an increasing tuple of element indices.
    """
    n = len(p)
    if n == 0:
        return []
    masks = p.up_masks()
    # strictly-above lists in topological position order
    pos = {i: k for k, i in enumerate(p.topo)}
    above = []
    for i in range(n):
        m = masks[i] & ~(1 << i)
        lst = []
        while m:
            low = m & -m
            lst.append(low.bit_length() - 1)
            m ^= low
        lst.sort(key=pos.__getitem__)
        above.append(lst)
    by_dim: list[list[tuple[int, ...]]] = []

    def extend(chain):
        d = len(chain) - 1
        while len(by_dim) <= d:
            by_dim.append([])
        by_dim[d].append(chain)
        for j in above[chain[-1]]:
            extend(chain + (j,))

    for i in p.topo:
        extend((i,))
    for lst in by_dim:
        lst.sort()
    return by_dim


def _reduce_ranks(by_dim, modulus):
    """Ranks of the boundary maps by column reduction with clearing.

    ``modulus`` is a prime for F_p arithmetic or None for exact rationals.
    """
    index = [{c: k for k, c in enumerate(lst)} for lst in by_dim]
    ranks = [0] * (len(by_dim) + 1)
    cleared: set[int] = set()
    for d in range(len(by_dim) - 1, 0, -1):
        faces = index[d - 1]
        pivots: dict[int, dict[int, object]] = {}
        next_cleared = set()
        for k, chain in enumerate(by_dim[d]):
            if k in cleared:
                continue
            col: dict[int, object] = {}
            for t in range(len(chain)):
                face = chain[:t] + chain[t + 1:]
                col[faces[face]] = 1 if t % 2 == 0 else (-1 if modulus is None else modulus - 1)
            while col:
                low = max(col)
                other = pivots.get(low)
                if other is None:
                    break
                if modulus is None:
                    f = col[low] / other[low]
                    for r, v in other.items():
                        nv = col.get(r, 0) - f * v
                        if nv:
                            col[r] = nv
                        else:
                            col.pop(r, None)
                else:
                    f = col[low] * pow(other[low], modulus - 2, modulus) % modulus
                    for r, v in other.items():
                        nv = (col.get(r, 0) - f * v) % modulus
                        if nv:
                            col[r] = nv
                        else:
                            col.pop(r, None)
            if col:
                low = max(col)
                if modulus is None:
                    from fractions import Fraction
                    col = {r: Fraction(v) for r, v in col.items()}
                pivots[low] = col
                next_cleared.add(low)
        ranks[d] = len(pivots)
        cleared = next_cleared
    return ranks


def order_complex_homology(p: FacePoset, field: str = "Q") -> ChainComplexSummary:
    """Betti numbers of the order complex over Q (default) or F2.

    For ``field="Q"`` the ranks are first computed modulo a large prime;
    since rank over F_p never exceeds rank over Q, the mod-p Betti numbers
    bound the rational ones from above, and the two agree whenever the
    Euler characteristic leaves no room for a difference.  Otherwise the
    exact rational elimination is run.
    """
    by_dim = order_complex_chains(p)
    if not by_dim:
        return ChainComplexSummary([], 0, [])
    cells = [len(c) for c in by_dim]
    euler = sum((-1) ** d * c for d, c in enumerate(cells))
    if field.upper() in ("F2", "GF2"):
        ranks = _reduce_ranks(by_dim, 2)
    elif field.upper() == "Q":
        ranks = _reduce_ranks(by_dim, _PRIME)
        betti = _betti(cells, ranks)
        if not _certified(betti, euler):
            ranks = _reduce_ranks(by_dim, None)
    else:
        raise ValueError(f"unknown field {field!r}")
    betti = _betti(cells, ranks)
    return ChainComplexSummary(betti, euler, cells)


def _betti(cells, ranks):
    betti = [cells[d] - ranks[d] - ranks[d + 1] for d in range(len(cells))]
    while len(betti) > 1 and betti[-1] == 0:
        betti.pop()
    return betti


def _certified(betti, euler) -> bool:
    """Mod-p Betti numbers b_p dominate the rational ones b_Q, agree in
    degree 0 and have the same alternating sum.  If the positive entries of
    b_p above degree 0 all sit in degrees of one parity, the difference
    b_p - b_Q is a non-negative vector with zero alternating sum supported
    in one parity class, hence zero.
    """
    parities = {d % 2 for d, b in enumerate(betti) if d > 0 and b > 0}
    return len(parities) <= 1


def boundary_poset(p: FacePoset, x) -> FacePoset:
    """The strict lower interval below ``x``."""
    down = p.down_set(x)
    down.discard(p._idx(x))
    return p.restrict(down)


def sphere_betti(dim: int) -> list[int]:
    if dim < 0:
        return []
    if dim == 0:
        return [2]
    return [1] + [0] * (dim - 1) + [1]


# --------------------------------------------------------------------------
# isomorphism


def _refine_colors(polys: Sequence[FacePoset]) -> list[list[int]]:
    colors = [[("r", p.rank[i], len(p.up[i]), len(p.down[i])) for i in range(len(p))] for p in polys]
    palette = {c: k for k, c in enumerate(sorted({c for cs in colors for c in cs}))}
    cur = [[palette[c] for c in cs] for cs in colors]
    n_classes = len(palette)
    while True:
        sigs = []
        for p, cs in zip(polys, cur):
            sigs.append([(cs[i], tuple(sorted(cs[j] for j in p.up[i])),
                          tuple(sorted(cs[j] for j in p.down[i]))) for i in range(len(p))])
        palette = {s: k for k, s in enumerate(sorted({s for ss in sigs for s in ss}))}
        new = [[palette[s] for s in ss] for ss in sigs]
        if len(palette) == n_classes:
            return new
        n_classes = len(palette)
        cur = new


def poset_isomorphic(a: FacePoset, b: FacePoset) -> dict | None:
    """A rank-preserving order isomorphism a -> b, or None.

    Colour refinement on ranks and cover neighbourhoods prunes candidates;
    the remaining search is a deterministic backtracking match that keeps
    cover relations consistent with every already-matched element.
    """
    if len(a) != len(b) or a.n_covers() != b.n_covers():
        return None
    if sorted(a.rank) != sorted(b.rank):
        return None
    if len(a) == 0:
        return {}
    ca, cb = _refine_colors([a, b])
    if Counter(ca) != Counter(cb):
        return None
    by_color: dict[int, list[int]] = {}
    for j, c in enumerate(cb):
        by_color.setdefault(c, []).append(j)
    class_size = Counter(ca)
    nbr_a = [set(a.up[i]) | set(a.down[i]) for i in range(len(a))]
    upb = [set(x) for x in b.up]
    downb = [set(x) for x in b.down]
    # matching order: start in the rarest class, then grow along covers
    order: list[int] = []
    placed = [False] * len(a)
    remaining = sorted(range(len(a)), key=lambda i: (class_size[ca[i]], ca[i], i))
    for seed in remaining:
        if placed[seed]:
            continue
        queue = deque([seed])
        placed[seed] = True
        while queue:
            i = queue.popleft()
            order.append(i)
            for j in sorted(nbr_a[i], key=lambda t: (class_size[ca[t]], ca[t], t)):
                if not placed[j]:
                    placed[j] = True
                    queue.append(j)
    fmap = [-1] * len(a)
    used = [False] * len(b)

    def candidates(i):
        anchor = None
        for j in a.down[i]:
            if fmap[j] >= 0:
                anchor = b.up[fmap[j]]
                break
        if anchor is None:
            for j in a.up[i]:
                if fmap[j] >= 0:
                    anchor = b.down[fmap[j]]
                    break
        pool = anchor if anchor is not None else by_color[ca[i]]
        return [c for c in pool if not used[c] and cb[c] == ca[i]]

    def consistent(i, c):
        mapped_a = 0
        for j in a.up[i]:
            if fmap[j] >= 0:
                mapped_a += 1
                if fmap[j] not in upb[c]:
                    return False
        for j in a.down[i]:
            if fmap[j] >= 0:
                mapped_a += 1
                if fmap[j] not in downb[c]:
                    return False
        mapped_b = sum(1 for j in b.up[c] if used[j]) + sum(1 for j in b.down[c] if used[j])
        return mapped_a == mapped_b

    stack = [(0, candidates(order[0]), 0)]
    while stack:
        depth, cands, k = stack.pop()
        i = order[depth]
        if fmap[i] >= 0:
            used[fmap[i]] = False
            fmap[i] = -1
        while k < len(cands) and not consistent(i, cands[k]):
            k += 1
        if k == len(cands):
            continue
        c = cands[k]
        fmap[i] = c
        used[c] = True
        stack.append((depth, cands, k + 1))
        if depth + 1 == len(order):
            result = {a.elements[x]: b.elements[fmap[x]] for x in range(len(a))}
            for lo, hi in a.covers():
                if b.index[result[hi]] not in upb[b.index[result[lo]]]:
                    raise AssertionError("isomorphism search produced a non-cover")
            return result
        nxt = order[depth + 1]
        stack.append((depth + 1, candidates(nxt), 0))
    return None


def relabel(p: FacePoset, mapping: Callable) -> FacePoset:
    return FacePoset([mapping(e) for e in p.elements],
                     [(mapping(x), mapping(y)) for x, y in p.covers()],
                     {mapping(e): p.rank[i] for i, e in enumerate(p.elements)}, graded=p.graded)


# --------------------------------------------------------------------------
# polyhedral complexes and collapses


@dataclass
class PolyhedralComplexAbstract:
    cells: FacePoset
    dim: int = -1
    declared_pure: bool = False

    def __post_init__(self):
        top = max(self.cells.rank) if len(self.cells) else -1
        if self.dim < 0:
            self.dim = top
        if top != self.dim:
            raise ValueError(f"declared dimension {self.dim} but top rank is {top}")
        if self.declared_pure and not self.is_pure():
            raise ValueError("complex declared pure but has a maximal cell below top dimension")

    def is_pure(self) -> bool:
        p = self.cells
        return all(p.rank[i] == self.dim for i in range(len(p)) if not p.up[i])


@dataclass
class CollapseResult:
    success: bool
    status: str  # "collapsed", "stuck", "inconclusive"
    certificate: list[tuple] = field(default_factory=list)
    remaining: list = field(default_factory=list)
    nodes: int = 0


def greedy_collapse(c: PolyhedralComplexAbstract | FacePoset, budget: int = 10**6) -> CollapseResult:
    """Search for a sequence of elementary collapses down to one vertex.

    A free face is a cell G whose only proper coface is a single cell F (so
    F is maximal and G is a facet of it); the pair (G, F) is removed.  Free
    pairs are taken in index order; when the greedy run gets stuck the
    search backtracks, stopping after ``budget`` collapse steps.
    """
    p = c.cells if isinstance(c, PolyhedralComplexAbstract) else c
    n = len(p)
    if n == 0:
        raise ValueError("empty complex")
    for i in range(n):
        for j in p.down[i]:
            if p.rank[j] != p.rank[i] - 1:
                raise ValueError("collapse search needs a graded cell poset")
    alive = [True] * n
    upcount = [len(p.up[i]) for i in range(n)]
    n_alive = n

    def free_pairs():
        out = []
        for g in range(n):
            if alive[g] and upcount[g] == 1:
                f = next(j for j in p.up[g] if alive[j])
                if upcount[f] == 0:
                    out.append((g, f))
        return out

    def remove(g, f):
        nonlocal n_alive
        for x in (f, g):
            alive[x] = False
            for j in p.down[x]:
                upcount[j] -= 1
        n_alive -= 2

    def restore(g, f):
        nonlocal n_alive
        for x in (g, f):
            alive[x] = True
            for j in p.down[x]:
                upcount[j] += 1
        n_alive += 2

    path: list[tuple[int, int]] = []
    stack = [(free_pairs(), 0)]
    nodes = 0
    while stack:
        if n_alive == 1:
            cert = [(p.elements[g], p.elements[f]) for g, f in path]
            return CollapseResult(True, "collapsed", cert, [p.elements[i] for i in range(n) if alive[i]], nodes)
        options, k = stack[-1]
        if k >= len(options):
            stack.pop()
            if path:
                restore(*path.pop())
            continue
        if nodes >= budget:
            return CollapseResult(False, "inconclusive", [], [p.elements[i] for i in range(n) if alive[i]], nodes)
        stack[-1] = (options, k + 1)
        g, f = options[k]
        remove(g, f)
        path.append((g, f))
        nodes += 1
        stack.append((free_pairs(), 0))
    return CollapseResult(False, "stuck", [], [p.elements[i] for i in range(n) if alive[i]], nodes)
