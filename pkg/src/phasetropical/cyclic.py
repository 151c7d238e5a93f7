"""Cyclic partitions of {0, ..., n} and the poset W of pairs (sigma, J)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations
from typing import Iterable, Iterator

from .poset import FacePoset


def _set_text(s: Iterable[int]) -> str:
    return "{" + ",".join(str(x) for x in sorted(s)) + "}"


@dataclass(frozen=True)
class CyclicPartition:
    """Disjoint non-empty blocks in a cyclic order.

    Stored in canonical rotation: the block containing the smallest element
    of the ground set comes first.
    """

    blocks: tuple[frozenset[int], ...]

    def __init__(self, blocks: Iterable[Iterable[int]]):
        bl = [frozenset(b) for b in blocks]
        if not bl:
            raise ValueError("a cyclic partition needs at least one block")
        if any(not b for b in bl):
            raise ValueError("blocks must be non-empty")
        total = sum(len(b) for b in bl)
        ground = frozenset().union(*bl)
        if len(ground) != total:
            raise ValueError("blocks must be pairwise disjoint")
        m = min(ground)
        start = next(i for i, b in enumerate(bl) if m in b)
        object.__setattr__(self, "blocks", tuple(bl[start:] + bl[:start]))

    @classmethod
    def singletons(cls, order: Iterable[int]) -> "CyclicPartition":
        return cls([[i] for i in order])

    @classmethod
    def parse(cls, text: str) -> "CyclicPartition":
        text = text.strip()
        if not (text.startswith("<") and text.endswith(">")):
            raise ValueError(f"not a cyclic partition: {text!r}")
        blocks = []
        for part in text[1:-1].split("|"):
            part = part.strip().strip("{}")
            blocks.append([int(x) for x in part.split(",") if x.strip()])
        return cls(blocks)

    @property
    def k(self) -> int:
        return len(self.blocks)

    @cached_property
    def ground(self) -> frozenset[int]:
        return frozenset().union(*self.blocks)

    @cached_property
    def block_index(self) -> dict[int, int]:
        return {i: s for s, b in enumerate(self.blocks) for i in b}

    def __str__(self) -> str:
        return "<" + "|".join(_set_text(b) for b in self.blocks) + ">"

    def __repr__(self) -> str:
        return f"CyclicPartition({self})"

    def __lt__(self, other: "CyclicPartition") -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (self.k, tuple(tuple(sorted(b)) for b in self.blocks))

    def rotated(self, start: int) -> tuple[frozenset[int], ...]:
        """Block sequence beginning at block ``start`` (not canonical)."""
        return self.blocks[start:] + self.blocks[:start]

    def is_full(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def divides(self, j: Iterable[int]) -> bool:
        j = set(j)
        return sum(1 for b in self.blocks if b & j) >= 2

    def merge_adjacent(self, s: int) -> "CyclicPartition":
        """Merge block s with its cyclic successor."""
        k = self.k
        if k < 2:
            raise ValueError("nothing to merge")
        t = (s + 1) % k
        merged = self.blocks[s] | self.blocks[t]
        out = []
        for r, b in enumerate(self.blocks):
            if r == s:
                out.append(merged)
            elif r != t:
                out.append(b)
        return CyclicPartition(out)

    def coarsenings(self) -> list["CyclicPartition"]:
        """All cyclic partitions obtained by merging runs of consecutive
        blocks (including itself and the one-block partition).
        """
        k = self.k
        out = {CyclicPartition([self.ground])}
        for c in range(2, k + 1):
            for cuts in combinations(range(k), c):
                blocks = []
                for a, b in zip(cuts, cuts[1:] + (cuts[0] + k,)):
                    blocks.append(frozenset().union(*(self.blocks[r % k] for r in range(a, b))))
                out.add(CyclicPartition(blocks))
        return sorted(out)


def refines(a: CyclicPartition, b: CyclicPartition) -> bool:
    """Whether a precedes b in the order on cyclic partitions, i.e. b refines
    a: every block of a is a union of a run of consecutive blocks of b, and
    the runs appear in the cyclic order of a.
    """
    if a.ground != b.ground:
        raise ValueError("cyclic partitions of different ground sets")
    lab = []
    for blk in b.blocks:
        owners = {a.block_index[i] for i in blk}
        if len(owners) != 1:
            return False
        lab.append(owners.pop())
    ka, kb = a.k, b.k
    if ka == 1:
        return True
    changes = 0
    for t in range(kb):
        x, y = lab[t], lab[(t + 1) % kb]
        if x != y:
            if y != (x + 1) % ka:
                return False
            changes += 1
    return changes == ka


def induced_partition(sigma: CyclicPartition, j: Iterable[int]) -> CyclicPartition:
    j = frozenset(j)
    if not j:
        raise ValueError("induced partition needs a non-empty subset")
    if not j <= sigma.ground:
        raise ValueError("subset is not contained in the ground set")
    return CyclicPartition([b & j for b in sigma.blocks if b & j])


def set_partitions(elements: list[int]) -> Iterator[list[list[int]]]:
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def enumerate_cyclic_partitions(n: int) -> list[CyclicPartition]:
    """All cyclic partitions of {0, ..., n}, canonical, sorted by block count."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = set()
    for part in set_partitions(list(range(n + 1))):
        part = [frozenset(b) for b in part]
        head = next(b for b in part if 0 in b)
        rest = [b for b in part if b is not head]
        for perm in permutations(rest):
            out.add(CyclicPartition([head, *perm]))
    return sorted(out)


@dataclass(frozen=True, order=False)
class StratumLabel:
    """A pair (sigma, J); a member of W when sigma divides J."""

    sigma: CyclicPartition
    j: frozenset[int]

    def __init__(self, sigma: CyclicPartition, j: Iterable[int]):
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "j", frozenset(j))

    @property
    def rank(self) -> int:
        return self.sigma.k + len(self.j) - 4

    def in_W(self) -> bool:
        return self.j <= self.sigma.ground and self.sigma.divides(self.j)

    def __str__(self) -> str:
        return f"({self.sigma}, {_set_text(self.j)})"

    def __repr__(self) -> str:
        return f"StratumLabel{self}"

    def sort_key(self):
        return (self.rank, self.sigma.sort_key(), tuple(sorted(self.j)))

    def __lt__(self, other: "StratumLabel") -> bool:
        return self.sort_key() < other.sort_key()

    @classmethod
    def parse(cls, text: str) -> "StratumLabel":
        m = re.fullmatch(r"\s*\((<.*>)\s*,\s*\{([^}]*)\}\s*\)\s*", text)
        if not m:
            raise ValueError(f"not a stratum label: {text!r}")
        j = [int(x) for x in m.group(2).split(",") if x.strip()]
        return cls(CyclicPartition.parse(m.group(1)), j)


def label_leq(a: StratumLabel, b: StratumLabel) -> bool:
    """The order of W: (sigma', J') <= (sigma, J) iff sigma refines sigma' and J' is in J."""
    return a.j <= b.j and refines(a.sigma, b.sigma)


def W_covers_below(x: StratumLabel) -> list[StratumLabel]:
    """Elements of W covered by x."""
    out = []
    sigma, j = x.sigma, x.j
    for i in sorted(j):
        jj = j - {i}
        if sigma.divides(jj):
            out.append(StratumLabel(sigma, jj))
    if sigma.k >= 3:
        for s in range(sigma.k):
            merged = sigma.merge_adjacent(s)
            if merged.divides(j):
                out.append(StratumLabel(merged, j))
    return out


def W_elements(n: int) -> Iterator[StratumLabel]:
    ground = list(range(n + 1))
    subsets = [frozenset(c) for r in range(2, n + 2) for c in combinations(ground, r)]
    for sigma in enumerate_cyclic_partitions(n):
        if sigma.k < 2:
            continue
        for j in subsets:
            if sigma.divides(j):
                yield StratumLabel(sigma, j)


def build_W(n: int) -> FacePoset:
    """The graded poset W for the ground set {0, ..., n}."""
    if n < 1:
        raise ValueError("W needs n >= 1")
    elems = sorted(W_elements(n))
    covers = [(y, x) for x in elems for y in W_covers_below(x)]
    return FacePoset(elems, covers, rank=lambda e: e.rank)


def W_lower_interval(label: StratumLabel) -> FacePoset:
    """The lower interval of ``label`` in W, built without materializing W."""
    if not label.in_W():
        raise ValueError(f"{label} is not in W")
    seen = {label}
    stack = [label]
    covers = []
    while stack:
        x = stack.pop()
        for y in W_covers_below(x):
            covers.append((y, x))
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return FacePoset(sorted(seen), covers, rank=lambda e: e.rank)


def maximal_labels(n: int) -> list[StratumLabel]:
    full = frozenset(range(n + 1))
    return [StratumLabel(CyclicPartition.singletons((0,) + p), full)
            for p in permutations(range(1, n + 1))]
