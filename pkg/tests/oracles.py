"""Independent reference implementations used only by the tests.

Everything here is deliberately naive and self-contained: different
algorithms from the library, no shared helpers, exact arithmetic. Slow is
fine; these run on desk-scale inputs.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def ideals_by_size(d: int, n_max: int) -> dict[int, list[frozenset]]:
    """All finite order ideals of Z_{>=0}^d, grouped by size.

    Cells of an ideal, sorted lexicographically, have the property that each
    prefix is again an ideal (predecessors are lex-smaller). So every ideal
    is reached exactly once by always appending a lex-larger addable cell.
    """
    by_size: dict[int, list[frozenset]] = {k: [] for k in range(n_max + 1)}
    origin = (0,) * d

    def grow(cells: frozenset, last):
        by_size[len(cells)].append(cells)
        if len(cells) == n_max:
            return
        candidates = set()
        for c in cells:
            for i in range(d):
                up = c[:i] + (c[i] + 1,) + c[i + 1 :]
                if up not in cells:
                    candidates.add(up)
        if not cells:
            candidates.add(origin)
        for cand in sorted(candidates):
            if last is not None and cand <= last:
                continue
            if all(
                cand[i] == 0
                or cand[:i] + (cand[i] - 1,) + cand[i + 1 :] in cells
                for i in range(d)
            ):
                grow(cells | {cand}, cand)

    grow(frozenset(), None)
    return by_size


def ideal_counts(d: int, n_max: int) -> list[int]:
    sizes = ideals_by_size(d, n_max)
    return [len(sizes[k]) for k in range(n_max + 1)]


def tuple_count_direct(r: int, d: int, n: int) -> int:
    """r-tuples of ideals with total size n, enumerated one by one."""
    sizes = ideals_by_size(d, n)
    total = 0
    for split in itertools.product(range(n + 1), repeat=r):
        if sum(split) != n:
            continue
        prod = 1
        for k in split:
            prod *= len(sizes[k])
        total += prod
    return total


def charfn_of_chain(chain) -> dict:
    """Pointwise number of ideals in the chain containing each cell."""
    counts: dict = {}
    for ideal in chain:
        for cell in ideal:
            counts[cell] = counts.get(cell, 0) + 1
    return counts


def fixed_points_direct(S, r: int) -> int:
    """Count subset assignments edge by edge, no pruning."""
    verts = S.vertices()
    menus = [list(itertools.combinations(range(r), v[0])) for v in verts]
    pos = {v: i for i, v in enumerate(verts)}
    edges = [(pos[u], pos[v]) for u, v in S.edges]
    total = 0
    for choice in itertools.product(*menus):
        if all(set(choice[i]) <= set(choice[j]) for i, j in edges):
            total += 1
    return total


# ---------------------------------------------------------------------------
# Finite-field brute force, self-contained mod-p echelon arithmetic.


def _rref_mod(rows: list[list[int]], p: int) -> list[list[int]]:
    rows = [[x % p for x in row] for row in rows]
    out = []
    ncols = len(rows[0]) if rows else 0
    col = 0
    while rows and col < ncols:
        piv = next((i for i, row in enumerate(rows) if row[col] % p), None)
        if piv is None:
            col += 1
            continue
        row = rows.pop(piv)
        inv = pow(row[col], p - 2, p)
        row = [(x * inv) % p for x in row]
        rows = [
            [(x - r2[col] * y) % p for x, y in zip(r2, row)] if r2[col] else r2
            for r2 in rows
        ]
        out = [
            [(x - r2[col] * y) % p for x, y in zip(r2, row)] if r2[col] else r2
            for r2 in out
        ]
        out.append(row)
        col += 1
    return out


def rank_mod(rows: list[list[int]], p: int) -> int:
    return len([r for r in _rref_mod(rows, p) if any(r)])


def subspaces_mod(p: int, ambient: int, dim: int) -> list[tuple]:
    """All dimension-`dim` subspaces of F_p^ambient as canonical RREF tuples."""
    found = set()
    vectors = list(itertools.product(range(p), repeat=ambient))
    for combo in itertools.combinations(vectors[1:], dim):
        rows = _rref_mod([list(v) for v in combo], p)
        rows = [r for r in rows if any(r)]
        if len(rows) == dim:
            found.add(tuple(tuple(r) for r in rows))
    if dim == 0:
        return [()]
    return sorted(found)


def count_points_direct(S, r: int, q: int) -> int:
    """Tuples of subspaces with containment along edges, fully enumerated."""
    verts = S.vertices()
    menus = [subspaces_mod(q, r, v[0]) for v in verts]
    pos = {v: i for i, v in enumerate(verts)}
    edges = [(pos[u], pos[v]) for u, v in S.edges]

    def contained(small, big):
        if not small:
            return True
        stacked = [list(row) for row in small] + [list(row) for row in big]
        return rank_mod(stacked, q) == len(big)

    total = 0
    for choice in itertools.product(*menus):
        if all(contained(choice[i], choice[j]) for i, j in edges):
            total += 1
    return total


def lagrange_eval(points: list[tuple[int, int]], x) -> Fraction:
    """Value at x of the unique interpolating polynomial through the points."""
    x = Fraction(x)
    total = Fraction(0)
    for i, (xi, yi) in enumerate(points):
        term = Fraction(yi)
        for j, (xj, _) in enumerate(points):
            if i != j:
                term *= (x - xj) / Fraction(xi - xj)
        total += term
    return total


def lagrange_degree(points: list[tuple[int, int]]) -> int:
    """Least degree fitting the points exactly (finite differences)."""
    xs = [Fraction(x) for x, _ in points]
    coeffs = [Fraction(y) for _, y in points]
    # Newton's divided differences; trailing zeros cut the degree.
    table = list(coeffs)
    newton = [table[0]]
    for level in range(1, len(points)):
        table = [
            (table[i + 1] - table[i]) / (xs[i + level] - xs[i])
            for i in range(len(table) - 1)
        ]
        newton.append(table[0])
    deg = 0
    for k, c in enumerate(newton):
        if c != 0:
            deg = k
    return deg


def min_l1_direct(a_pts, b_pts) -> int | None:
    best = None
    for a in a_pts:
        for b in b_pts:
            dist = sum(abs(x - y) for x, y in zip(a, b))
            if best is None or dist < best:
                best = dist
    return best


def segment_cells_direct(p, q, lo, hi) -> set:
    """Cells of the integer grid met by segment pq, by exact box clipping.

    p, q are Fraction tuples, lo/hi the inclusive cell-index bounds per axis.
    A cell (i_1..i_m) is the box [i_1, i_1+1] x ... ; touching counts.
    """
    m = len(p)

    def clip(c):
        # Liang-Barsky on [c, c+1]^m against the parametrized segment.
        t0, t1 = Fraction(0), Fraction(1)
        for i in range(m):
            d = q[i] - p[i]
            lo_i, hi_i = Fraction(c[i]), Fraction(c[i] + 1)
            if d == 0:
                if p[i] < lo_i or p[i] > hi_i:
                    return False
                continue
            ta, tb = (lo_i - p[i]) / d, (hi_i - p[i]) / d
            if ta > tb:
                ta, tb = tb, ta
            t0, t1 = max(t0, ta), min(t1, tb)
            if t0 > t1:
                return False
        return True

    out = set()
    ranges = [range(lo[i], hi[i] + 1) for i in range(m)]
    for cell in itertools.product(*ranges):
        if clip(cell):
            out.add(cell)
    return out
