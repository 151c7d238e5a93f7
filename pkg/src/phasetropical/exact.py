"""Exact rational and integer linear algebra used throughout the package.

Everything here works on ``Fraction``/``int`` entries; nothing is ever
converted to floating point.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd, inf
from typing import Iterable, Sequence

Vector = tuple
Matrix = list


def as_fractions(rows: Iterable[Iterable]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in rows]


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def rref(rows: Iterable[Iterable]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = as_fractions(rows)
    pivots: list[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Iterable[Iterable]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : rows . x = 0}."""
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Unique solution of a x = b, or None when inconsistent or underdetermined."""
    n = len(a[0])
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    red, pivots = rref(aug)
    if n in pivots or len(pivots) < n:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(red, pivots):
        x[p] = row[n]
    return x


def solve_particular(a: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Some solution of a x = b (free variables set to 0), None if inconsistent."""
    n = len(a[0])
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(red, pivots):
        x[p] = row[n]
    return x


def affine_rank(points: Sequence[Sequence]) -> int:
    """Dimension of the affine span (-1 for the empty set)."""
    if not points:
        return -1
    base = points[0]
    return rank([[x - y for x, y in zip(p, base)] for p in points[1:]]) if len(points) > 1 else 0


def det(m: Sequence[Sequence]) -> Fraction:
    a = as_fractions(m)
    n = len(a)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        result *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return sign * result


def primitive(v: Sequence) -> tuple:
    """Scale a rational vector to the primitive integer vector on the same ray."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


# --------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(a: Sequence[Sequence[int]]):
    """Return (U, S, V) with U @ A @ V == S, U and V unimodular, S diagonal
    with each diagonal entry dividing the next.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    s = [[int(x) for x in row] for row in a]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        s[dst] = [x + f * y for x, y in zip(s[dst], s[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):
        for row in s:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    t = 0
    while t < min(m, n):
        entries = [(abs(s[i][j]), i, j) for i in range(t, m) for j in range(t, n) if s[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                q = s[i][t] // s[t][t]
                if q:
                    add_row(i, t, -q)
                if s[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = s[t][j] // s[t][t]
                if q:
                    add_col(j, t, -q)
                if s[t][j]:
                    done = False
            if done:
                # divisibility of the remaining block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if s[i][j] % s[t][t]), None)
                if bad is None:
                    break
                add_row(t, bad[0], 1)
                continue
            entries = [(abs(s[i][t]), i, t) for i in range(t, m) if s[i][t]]
            entries += [(abs(s[t][j]), t, j) for j in range(t, n) if s[t][j]]
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, s, v


def invariant_factors(a: Sequence[Sequence[int]]) -> list[int]:
    """Non-zero diagonal entries of the Smith normal form."""
    _, s, _ = smith_normal_form(a)
    return [s[i][i] for i in range(min(len(s), len(s[0]) if s else 0)) if s[i][i]]


def integer_kernel(a: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """A basis of the saturated lattice {x in Z^n : A x = 0}."""
    if not a:
        return [tuple(int(i == j) for i in range(ncols)) for j in range(ncols)]
    _, s, v = smith_normal_form(a)
    r = sum(1 for i in range(min(len(s), ncols)) if s[i][i])
    return [tuple(v[i][j] for i in range(ncols)) for j in range(r, ncols)]


def mat_inverse(m: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(m)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def mat_vec(m: Sequence[Sequence], v: Sequence) -> list:
    return [dot(row, v) for row in m]


# --------------------------------------------------------------------------
# Difference-constraint systems


class DifferenceSystem:
    """Constraints ``x[a] - x[b] <= c`` on homogeneous coordinates.

    Every polytope of the coamoeba and alcove decompositions is cut out by
    constraints of this shape, so feasibility, implicit equalities and
    membership up to integer lattice shifts all reduce to shortest paths.
    """

    def __init__(self, size: int):
        self.size = size
        self.constraints: list[tuple[int, int, Fraction]] = []

    def add_le(self, a: int, b: int, c) -> None:
        self.constraints.append((a, b, Fraction(c)))

    def add_ge(self, a: int, b: int, c) -> None:
        # x_a - x_b >= c  <=>  x_b - x_a <= -c
        self.constraints.append((b, a, -Fraction(c)))

    def add_eq(self, a: int, b: int, c) -> None:
        self.add_le(a, b, c)
        self.add_ge(a, b, c)

    def _distances(self):
        n = self.size
        d = [[inf] * n for _ in range(n)]
        for i in range(n):
            d[i][i] = 0
        for a, b, c in self.constraints:
            # edge b -> a with weight c bounds x_a - x_b
            if c < d[b][a]:
                d[b][a] = c
        for k in range(n):
            dk = d[k]
            for i in range(n):
                dik = d[i][k]
                if dik == inf:
                    continue
                di = d[i]
                for j in range(n):
                    if dik + dk[j] < di[j]:
                        di[j] = dik + dk[j]
        return d

    def is_feasible(self) -> bool:
        d = self._distances()
        return all(d[i][i] >= 0 for i in range(self.size))

    def dimension(self) -> int:
        """Dimension of the solution set modulo the diagonal; -1 if empty."""
        d = self._distances()
        if any(d[i][i] < 0 for i in range(self.size)):
            return -1
        classes = 0
        seen = [False] * self.size
        for i in range(self.size):
            if seen[i]:
                continue
            classes += 1
            for j in range(self.size):
                if d[i][j] != inf and d[j][i] != inf and d[i][j] + d[j][i] == 0:
                    seen[j] = True
        return classes - 1

    def contains(self, x: Sequence) -> bool:
        return all(x[a] - x[b] <= c for a, b, c in self.constraints)

    def lattice_shift(self, points: Sequence[Sequence], period=2) -> list[int] | None:
        """Integer vector m with p + period*m satisfying every constraint for
        all given points simultaneously, or None.
        """
        n = self.size
        bound: dict[tuple[int, int], int] = {}
        for a, b, c in self.constraints:
            w = min((c - p[a] + p[b]) // period for p in points)
            key = (b, a)
            if key not in bound or w < bound[key]:
                bound[key] = w
        # Bellman-Ford from a virtual source (all potentials start at 0)
        pot = [0] * n
        edges = [(b, a, w) for (b, a), w in bound.items()]
        for _ in range(n):
            changed = False
            for b, a, w in edges:
                if pot[b] + w < pot[a]:
                    pot[a] = pot[b] + w
                    changed = True
            if not changed:
                break
        else:
            if any(pot[b] + w < pot[a] for b, a, w in edges):
                return None
        if any(pot[b] + w < pot[a] for b, a, w in edges):
            return None
        base = pot[0]
        return [x - base for x in pot]

    def scaled(self, factor: int) -> "DifferenceSystem":
        """The same system in coordinates multiplied by ``factor``; integer
        constants make repeated membership tests cheap.
        """
        out = DifferenceSystem(self.size)
        for a, b, c in self.constraints:
            c = c * factor
            out.constraints.append((a, b, int(c) if c.denominator == 1 else c))
        return out

    def contains_mod(self, x: Sequence, period=2) -> bool:
        return self.lattice_shift([x], period) is not None

    def vertices(self) -> list[tuple[Fraction, ...]]:
        """Vertices of the solution set with x[0] = 0 (bounded systems).

        Implicit equalities are eliminated first, so active sets are only
        enumerated among the inequalities between equality classes.
        """
        d = self._distances()
        n = self.size
        if any(d[i][i] < 0 for i in range(n)):
            raise ValueError("infeasible system")
        rep = list(range(n))
        for i in range(n):
            for j in range(i):
                if rep[j] == j and d[j][i] != inf and d[i][j] != inf and d[j][i] + d[i][j] == 0:
                    rep[i] = j
                    break
        reps = sorted(set(rep))
        free = [r for r in reps if r != rep[0]]
        col = {r: t for t, r in enumerate(free)}
        # x_i = x_rep[i] + offset[i]; x_0 = 0 fixes x_rep[0] = -offset[0]
        offset = [d[rep[i]][i] for i in range(n)]
        base = -offset[0]
        tight: dict[tuple[int, int], Fraction] = {}
        for a, b, c in self.constraints:
            ra, rb = rep[a], rep[b]
            if ra == rb:
                continue
            c = c - offset[a] + offset[b]
            if (ra, rb) not in tight or c < tight[(ra, rb)]:
                tight[(ra, rb)] = c
        if not free:
            pts = [()]
        else:
            rows, rhs = [], []
            for (ra, rb), c in sorted(tight.items()):
                r = [Fraction(0)] * len(free)
                if ra in col:
                    r[col[ra]] += 1
                else:
                    c -= base
                if rb in col:
                    r[col[rb]] -= 1
                else:
                    c += base
                rows.append(r)
                rhs.append(c)
            pts = polytope_vertices([], [], rows, rhs)
        out = []
        for p in pts:
            val = {r: p[col[r]] for r in free}
            val[rep[0]] = base
            out.append(tuple(Fraction(val[rep[i]] + offset[i]) for i in range(n)))
        return sorted(out)

    def linear_rows(self) -> tuple[list[list[Fraction]], list[Fraction]]:
        """The system as rows ``r . x <= c``, one row per ordered pair."""
        tight: dict[tuple[int, int], Fraction] = {}
        for a, b, c in self.constraints:
            if (a, b) not in tight or c < tight[(a, b)]:
                tight[(a, b)] = c
        rows, rhs = [], []
        for (a, b), c in sorted(tight.items()):
            r = [Fraction(0)] * self.size
            r[a] += 1
            r[b] -= 1
            rows.append(r)
            rhs.append(c)
        return rows, rhs


# --------------------------------------------------------------------------
# Polyhedra


def polytope_vertices(eq_rows, eq_rhs, le_rows, le_rhs) -> list[tuple[Fraction, ...]]:
    """Vertices of {x : E x = e, G x <= g} by enumerating active sets.

    Exponential in the number of inequalities; intended for the small
    polytopes of the coamoeba decomposition.  Raises ValueError when the
    polyhedron has a lineality space (no vertices though non-empty).
    """
    n = len(le_rows[0]) if le_rows else len(eq_rows[0])
    eq_rows = as_fractions(eq_rows)
    le_rows = as_fractions(le_rows)
    eq_rhs = [Fraction(x) for x in eq_rhs]
    le_rhs = [Fraction(x) for x in le_rhs]
    base_rank = rank(eq_rows) if eq_rows else 0
    need = n - base_rank
    if rank(eq_rows + le_rows) < n:
        raise ValueError("polyhedron contains a line")
    found = set()
    for subset in combinations(range(len(le_rows)), need):
        rows = eq_rows + [le_rows[i] for i in subset]
        if rank(rows) < n:
            continue
        rhs = eq_rhs + [le_rhs[i] for i in subset]
        x = solve(rows, rhs)
        if x is None:
            continue
        if all(dot(r, x) <= c for r, c in zip(le_rows, le_rhs)) and all(
                dot(r, x) == c for r, c in zip(eq_rows, eq_rhs)):
            found.add(tuple(x))
    return sorted(found)


def extreme_rays(rows: Sequence[Sequence]) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone {x : r . x >= 0 for r in rows}.

    Double description method with the combinatorial adjacency test.  Rays
    are returned as primitive integer vectors, sorted.
    """
    a = as_fractions(rows)
    if not a:
        raise ValueError("cone without constraints is not pointed")
    d = len(a[0])
    if rank(a) < d:
        raise ValueError("cone is not pointed")
    # initial simplicial cone from d independent rows
    basis: list[int] = []
    for i in range(len(a)):
        if rank([a[j] for j in basis] + [a[i]]) > len(basis):
            basis.append(i)
        if len(basis) == d:
            break
    inv = mat_inverse([a[i] for i in basis])
    rays = [primitive([inv[r][c] for r in range(d)]) for c in range(d)]
    processed = list(basis)

    def zero_set(ray):
        return frozenset(i for i in processed if dot(a[i], ray) == 0)

    for i in range(len(a)):
        if i in basis:
            continue
        vals = [dot(a[i], r) for r in rays]
        pos = [r for r, v in zip(rays, vals) if v > 0]
        neg = [r for r, v in zip(rays, vals) if v < 0]
        zer = [r for r, v in zip(rays, vals) if v == 0]
        zsets = {r: zero_set(r) for r in rays}
        new = pos + zer
        for p in pos:
            for q in neg:
                common = zsets[p] & zsets[q]
                if len(common) < d - 2:
                    continue
                if any(r is not p and r is not q and common <= zsets[r] for r in rays):
                    continue
                ap, aq = dot(a[i], p), dot(a[i], q)
                new.append(primitive([ap * y - aq * x for x, y in zip(p, q)]))
        processed.append(i)
        rays = sorted(set(new))
    return sorted(rays)


def convex_hull_facets(points: Sequence[Sequence]) -> list[tuple[tuple[Fraction, ...], Fraction]]:
    """Facets ``a . x <= b`` of the convex hull of a full-dimensional point set."""
    pts = as_fractions(points)
    rows = [[-x for x in p] + [Fraction(1)] for p in pts]
    out = []
    for ray in extreme_rays(rows):
        *normal, b = ray
        out.append((tuple(Fraction(x) for x in normal), Fraction(b)))
    return out
