"""Realization both ways: functions to intersection patterns and back.

Forward: project the support cells of a characteristic function to Z^{d-1}
and read off which carriers touch. Backward: turn an abstract partite graph
(or interval family, or prepared grid sets) into a characteristic function
whose structure is equivalent to the input.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from . import _cells, _geometry
from ._backend import label_components, merge_indices, merge_min
from .charfn import CharFn, PaddedCharFn, validate
from .errors import ResourceLimitError, ValidationError
from .incidence import IncidenceStructure, build_S_chi

DEFAULT_MATERIALIZE_CAP = 10**6


def _key_str(v) -> str:
    return repr(v)


def _centers_intersect(u: tuple, w: tuple) -> bool:
    """Discrete intersection predicate for projected centers.

    Centers intersect when equal, differing by a signed unit vector, or
    differing by +-(1,...,1): the last case is the projected shadow of a
    step in the collapsed coordinate.
    """
    diff = [a - b for a, b in zip(u, w)]
    nonzero = [x for x in diff if x != 0]
    if not nonzero:
        return True
    if len(nonzero) == 1 and abs(nonzero[0]) == 1:
        return True
    if len(nonzero) == len(diff) and (all(x == 1 for x in diff) or all(x == -1 for x in diff)):
        return True
    return False


class ProjectedRegions:
    """Projected carriers of a structure: center sets in Z^{d-1} with levels."""

    __slots__ = ("dim", "rank", "regions", "levels")

    def __init__(self, dim: int, rank: int, regions: dict, levels: dict):
        if dim < 1:
            raise ValidationError("dim must be >= 1")
        regions = {k: frozenset(tuple(p) for p in v) for k, v in regions.items()}
        levels = dict(levels)
        if set(regions) != set(levels):
            raise ValidationError("regions and levels must share the same vertices")
        for v, region in regions.items():
            if not region:
                raise ValidationError(f"region of {v} is empty")
            lv = levels[v]
            if not isinstance(lv, int) or not (1 <= lv <= rank):
                raise ValidationError(f"level of {v} out of range 1..{rank}")
            for p in region:
                if len(p) != dim - 1:
                    raise ValidationError(f"center {p} has wrong dimension")
            if not _region_connected(region):
                raise ValidationError(f"region of {v} is not connected")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "regions", regions)
        object.__setattr__(self, "levels", levels)

    def __setattr__(self, name, value):
        raise AttributeError("ProjectedRegions is immutable")

    def vertex_order(self) -> list:
        return sorted(self.regions, key=lambda v: (self.levels[v], _key_str(v)))


def _region_connected(region: frozenset) -> bool:
    pts = list(region)
    seen = {pts[0]}
    stack = [pts[0]]
    rest = set(pts[1:])
    while stack:
        cur = stack.pop()
        hit = [q for q in rest if _centers_intersect(cur, q)]
        for q in hit:
            rest.discard(q)
            seen.add(q)
            stack.append(q)
    return not rest


def chi_to_regions(chi, r: int) -> ProjectedRegions:
    """Project each carrier cell a to (a_1 - a_d, ..., a_{d-1} - a_d)."""
    cs = build_S_chi(chi, r)
    regions = {}
    levels = {}
    for v, carrier in cs.carrier.items():
        proj = set()
        for a in carrier:
            proj.add(tuple(a[i] - a[-1] for i in range(len(a) - 1)))
        regions[v] = frozenset(proj)
        levels[v] = v[0]
    dim = chi.dim
    return ProjectedRegions(dim, max(r - 1, 0), regions, levels)


def intersection_structure(pr: ProjectedRegions) -> IncidenceStructure:
    """Edges between regions whose centers meet under the discrete predicate."""
    order = pr.vertex_order()
    index = {}
    part_sizes = [0] * pr.rank
    for v in order:
        lv = pr.levels[v]
        index[v] = (lv, part_sizes[lv - 1])
        part_sizes[lv - 1] += 1
    edges = set()
    verts = list(order)
    for i, p in enumerate(verts):
        for q in verts[i + 1 :]:
            if any(
                _centers_intersect(u, w) for u in pr.regions[p] for w in pr.regions[q]
            ):
                lp, lq = pr.levels[p], pr.levels[q]
                if lp == lq:
                    raise ValidationError(
                        f"same-level regions {p} and {q} intersect"
                    )
                a, b = (index[p], index[q]) if lp < lq else (index[q], index[p])
                edges.add((a, b))
    return IncidenceStructure(pr.rank, part_sizes, edges)


class GridSets:
    """Finite connected cell sets in Z_{>=0}^{d-1} with levels, pre-scaled.

    Same-level sets must be disjoint, and disjoint sets (any levels) must be
    at Manhattan distance >= 4(r-1). validate() enforces all of it.
    """

    __slots__ = ("dim_minus_1", "rank", "sets", "levels")

    def __init__(self, dim_minus_1: int, rank: int, sets: dict, levels: dict):
        if dim_minus_1 < 1 or rank < 1:
            raise ValidationError("need dim_minus_1 >= 1 and rank >= 1")
        norm = {}
        for v, cells in sets.items():
            if not isinstance(cells, _cells.CellSet):
                cells = _cells.CellSet.from_points(dim_minus_1, cells)
            norm[v] = cells
        levels = dict(levels)
        if set(norm) != set(levels):
            raise ValidationError("sets and levels must share the same vertices")
        object.__setattr__(self, "dim_minus_1", dim_minus_1)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "sets", norm)
        object.__setattr__(self, "levels", levels)

    def __setattr__(self, name, value):
        raise AttributeError("GridSets is immutable")

    def vertex_order(self) -> list:
        return sorted(self.sets, key=lambda v: (self.levels[v], _key_str(v)))

    def validate(self) -> None:
        m = self.dim_minus_1
        for v, cells in self.sets.items():
            lv = self.levels[v]
            if not isinstance(lv, int) or not (1 <= lv <= self.rank - 1):
                raise ValidationError(f"level of {v} must lie in 1..{self.rank - 1}")
            if len(cells) == 0:
                raise ValidationError(f"set of {v} is empty")
            if cells.dim != m:
                raise ValidationError(f"set of {v} has wrong dimension")
            arr = cells.to_array()
            if arr.min() < 0:
                raise ValidationError(f"set of {v} leaves the nonnegative orthant")
            if not _cellset_connected(cells):
                raise ValidationError(f"set of {v} is not connected")
        order = self.vertex_order()
        pts = {}
        boxes = {}
        for v in order:
            arr = self.sets[v].to_array().astype(np.float64)
            pts[v] = arr
            boxes[v] = (arr.min(axis=0), arr.max(axis=0))
        need = 4 * (self.rank - 1)
        for i, p in enumerate(order):
            for q in order[i + 1 :]:
                inter = _cellsets_intersect(self.sets[p], self.sets[q])
                if inter and self.levels[p] == self.levels[q]:
                    raise ValidationError(
                        f"same-level sets {p} and {q} intersect"
                    )
                if not inter:
                    box_gap = float(
                        np.maximum(0, boxes[q][0] - boxes[p][1]).sum()
                        + np.maximum(0, boxes[p][0] - boxes[q][1]).sum()
                    )
                    if box_gap >= need:
                        continue
                    dist = _min_l1_below(pts[p], pts[q], need)
                    if dist is not None:
                        raise ValidationError(
                            f"disjoint sets {p} and {q} are at Manhattan distance "
                            f"{dist} < {need}"
                        )

    def intersecting_pairs(self) -> list:
        """Vertex-key pairs (p, q), level(p) < level(q), whose sets meet."""
        order = self.vertex_order()
        out = []
        for i, p in enumerate(order):
            for q in order[i + 1 :]:
                if self.levels[p] != self.levels[q] and _cellsets_intersect(
                    self.sets[p], self.sets[q]
                ):
                    out.append((p, q) if self.levels[p] < self.levels[q] else (q, p))
        return out

    def structure(self) -> IncidenceStructure:
        """Intersection structure: edge (p,q) iff the sets meet, lower part first."""
        order = self.vertex_order()
        part_sizes = [0] * (self.rank - 1)
        index = {}
        for v in order:
            lv = self.levels[v]
            index[v] = (lv, part_sizes[lv - 1])
            part_sizes[lv - 1] += 1
        edges = set()
        for i, p in enumerate(order):
            for q in order[i + 1 :]:
                if self.levels[p] != self.levels[q] and _cellsets_intersect(
                    self.sets[p], self.sets[q]
                ):
                    a, b = index[p], index[q]
                    if a[0] > b[0]:
                        a, b = b, a
                    edges.add((a, b))
        return IncidenceStructure(self.rank - 1, part_sizes, edges)


def _cellset_connected(cells: _cells.CellSet) -> bool:
    if cells._packed is not None:
        labels = label_components(cells._packed, cells.layout.steps())
        return labels.size == 0 or int(labels.max()) == 0
    return len(_cells.orthogonal_components(list(cells))) <= 1


def _cellsets_intersect(A: _cells.CellSet, B: _cells.CellSet) -> bool:
    if A._packed is not None and B._packed is not None and A.layout == B.layout:
        return bool(np.any(merge_indices(A._packed, B._packed) >= 0))
    return bool(set(A) & set(B))


def _dedupe_sorted(x: np.ndarray) -> np.ndarray:
    if x.size == 0:
        return x
    head = np.empty(x.size, dtype=bool)
    head[0] = True
    head[1:] = x[1:] != x[:-1]
    return x[head]


def _min_l1_below(a_pts: np.ndarray, b_pts: np.ndarray, need: int, tree=None):
    """Exact minimum Manhattan distance if below ``need``, else None.

    The distance bound lets the tree prune whole subtrees, so well
    separated sets cost little. Integer coordinates keep the result exact.
    """
    if len(a_pts) < len(b_pts):
        a_pts, b_pts = b_pts, a_pts
        tree = None
    if tree is None:
        tree = cKDTree(a_pts)
    dist, _ = tree.query(b_pts, k=1, p=1, distance_upper_bound=float(need))
    best = float(dist.min())
    return int(best) if best < need else None


class LiftedSets:
    """Two-layer lifts B_p of grid sets into Z^d, hovering over the band.

    For a vertex at level l with cells A, the lift is
        {(x, M + 2(l-1) - sum(x))} union {(x, M + 2(l-1) + 1 - sum(x))}.
    All lift cells have coordinate sums in [M, M + 2(r-1)).
    """

    __slots__ = ("dim", "rank", "offset", "sets", "levels", "edges", "layout")

    def __init__(self, dim, rank, offset, sets, levels, edges, layout=None):
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "sets", dict(sets))
        object.__setattr__(self, "levels", dict(levels))
        object.__setattr__(self, "edges", frozenset(edges))
        object.__setattr__(self, "layout", layout)

    def __setattr__(self, name, value):
        raise AttributeError("LiftedSets is immutable")

    def cutoff(self) -> int:
        return self.offset + 2 * (self.rank - 1)

    def check_properties(self) -> dict:
        """The five construction properties, each tested directly."""
        report = {}
        report["connected"] = all(
            _cellset_connected(cells) for cells in self.sets.values()
        )
        report["disjoint"] = self._all_disjoint()
        report["band"] = self._all_in_band()
        report["edge_witness"] = all(
            _lift_edge_witness(self, p, q) for p, q in self.edges
        )
        report["upper_bound_gap"] = _lift_gap_ok(self)
        return report

    def _all_disjoint(self) -> bool:
        total = sum(len(c) for c in self.sets.values())
        packed = [c._packed for c in self.sets.values()]
        if self.layout is not None and all(p is not None for p in packed):
            zeros = [np.zeros(p.size, dtype=np.int64) for p in packed]
            return merge_min(packed, zeros)[0].size == total
        union = set()
        for cells in self.sets.values():
            union.update(cells)
        return len(union) == total

    def _all_in_band(self) -> bool:
        lo, hi = self.offset, self.cutoff()
        for cells in self.sets.values():
            if self.layout is not None and cells._packed is not None:
                if cells._packed.size == 0:
                    continue
                sums = self.layout.coord_sums(cells._packed)
                if sums.min() < lo or sums.max() >= hi:
                    return False
            else:
                if any(not lo <= sum(p) < hi for p in cells):
                    return False
        return True


def _lift_edge_witness(ls: LiftedSets, p, q) -> bool:
    """A dominating pair a <= b certifying the intended edge (p, q)."""
    Bp, Bq = ls.sets[p], ls.sets[q]
    lp, lq = ls.levels[p], ls.levels[q]
    if lp >= lq:
        return False
    M = ls.offset
    if ls.layout is not None and Bp._packed is not None and Bq._packed is not None:
        # cells over a common base point: upper layer of p, lower layer of q
        w = ls.layout.widths[-1]
        kp = _dedupe_sorted(Bp._packed >> w)
        kq = _dedupe_sorted(Bq._packed >> w)
        keys = kp[merge_indices(kq, kp) >= 0]
        if keys.size == 0:
            return False
        base = keys << w
        s = ls.layout.coord_sums(base)
        a = base + (M + 2 * (lp - 1) + 1 - s)
        b = base + (M + 2 * (lq - 1) - s)
        # same base point, so a <= b componentwise iff the last coords compare
        return bool(
            np.any(
                (merge_indices(Bp._packed, a) >= 0)
                & (merge_indices(Bq._packed, b) >= 0)
                & (a <= b)
            )
        )
    base_p = {tuple(x[:-1]) for x in Bp}
    base_q = {tuple(x[:-1]) for x in Bq}
    common = base_p & base_q
    for alpha in common:
        s = sum(alpha)
        a = alpha + (M + 2 * (lp - 1) + 1 - s,)
        b = alpha + (M + 2 * (lq - 1) - s,)
        if a in Bp and b in Bq and all(x <= y for x, y in zip(a, b)):
            return True
    return False


def _lift_gap_ok(ls: LiftedSets) -> bool:
    """Non-adjacent disjoint pairs: common upper bounds leave the band.

    For cells a, b the coordinate sum of max(a,b) equals
    (sum a + sum b + |a - b|_1) / 2, so it suffices to bound the minimum
    Manhattan distance per pair of constant-sum layers.
    """
    C = ls.cutoff()
    keys = sorted(ls.sets, key=_key_str)
    layers = {}  # vertex -> list of [sum, float array, bbox, tree slot]
    for v in keys:
        arr = ls.sets[v].to_array()
        sums = arr.sum(axis=1)
        layers[v] = []
        for s in np.unique(sums):
            sub = arr[sums == s].astype(np.float64)
            layers[v].append([int(s), sub, (sub.min(axis=0), sub.max(axis=0)), None])
    for i, p in enumerate(keys):
        for q in keys[i + 1 :]:
            if (p, q) in ls.edges or (q, p) in ls.edges:
                continue
            for lp in layers[p]:
                for lq in layers[q]:
                    need = 2 * C - lp[0] - lq[0]
                    if need <= 0:
                        continue
                    # cheap box bound on the Manhattan distance first
                    lo = float(
                        np.maximum(0.0, lq[2][0] - lp[2][1]).sum()
                        + np.maximum(0.0, lp[2][0] - lq[2][1]).sum()
                    )
                    if lo >= need:
                        continue
                    a, b = (lp, lq) if len(lp[1]) >= len(lq[1]) else (lq, lp)
                    if a[3] is None:
                        a[3] = cKDTree(a[1])
                    if _min_l1_below(a[1], b[1], need, tree=a[3]) is not None:
                        return False
    return True


def lift_sets(gs: GridSets) -> LiftedSets:
    """Build the two-layer lifts over validated grid sets."""
    m = gs.dim_minus_1
    max_sum = 0
    axis_max = [0] * m
    for cells in gs.sets.values():
        arr = cells.to_array()
        if arr.size:
            max_sum = max(max_sum, int(arr.sum(axis=1).max()))
            for j in range(m):
                axis_max[j] = max(axis_max[j], int(arr[:, j].max()))
    M = max_sum + 1
    d = m + 1
    layout = None
    if d <= _cells.MAX_PACK_DIM:
        # headroom for the band walk: any coordinate can grow by up to the
        # band height before the coordinate sum leaves the simplex
        band = 2 * (gs.rank - 1)
        cutoff = M + band
        try:
            layout = _cells.PackLayout.for_extents([x + band for x in axis_max] + [cutoff])
        except ResourceLimitError:
            layout = None
    lifted = {}
    for v, cells in gs.sets.items():
        base = 2 * (gs.levels[v] - 1) + M
        arr = cells.to_array()
        sums = arr.sum(axis=1)
        lower = np.column_stack([arr, base - sums])
        upper = np.column_stack([arr, base + 1 - sums])
        pts = np.concatenate([lower, upper])
        if layout is not None:
            packed = np.sort(layout.pack_array(pts))
            lifted[v] = _cells.CellSet.from_packed(d, packed, layout=layout)
        else:
            lifted[v] = _cells.CellSet.from_points(d, map(tuple, pts.tolist()))
    return LiftedSets(d, gs.rank, M, lifted, gs.levels, gs.intersecting_pairs(), layout=layout)


def sets_to_chi(gs: GridSets, cap: int = DEFAULT_MATERIALIZE_CAP):
    """Characteristic function realizing the intersection pattern of grid sets.

    Returns a PaddedCharFn for d <= 4 and an explicit CharFn (materialized
    under ``cap``) for higher dimensions. The output validates, equals
    rank everywhere on the simplex except above the lifted sets, and its
    structure is equivalent to gs.structure().
    """
    gs.validate()
    ls = lift_sets(gs)
    report = ls.check_properties()
    bad = [k for k, ok in report.items() if not ok]
    if bad:
        raise AssertionError(f"lift property check failed: {bad}")
    return _chi_from_lift(ls, cap)


def _chi_from_lift(ls: LiftedSets, cap: int):
    r = ls.rank
    d = ls.dim
    M = ls.offset
    C = ls.cutoff()
    if ls.layout is not None:
        return _dp_packed(ls, r, d, M, C)
    return _dp_dict(ls, r, d, M, C, cap)


def _dp_packed(ls: LiftedSets, r: int, d: int, M: int, C: int) -> PaddedCharFn:
    layout = ls.layout
    steps = layout.steps()
    # each lift set splits into constant-sum layers, each one a sorted slice
    by_sum: dict = {}
    for v in sorted(ls.sets, key=_key_str):
        packed = ls.sets[v]._packed
        if packed.size == 0:
            continue
        val = r - ls.levels[v]
        sums = layout.coord_sums(packed)
        for s in np.unique(sums).tolist():
            m = sums == s
            layer = packed[m]
            by_sum.setdefault(int(s), []).append(
                (layer, np.full(layer.size, val, dtype=np.int64))
            )

    frontier_cells = np.empty(0, dtype=np.int64)
    frontier_vals = np.empty(0, dtype=np.int64)
    out_cells = []
    out_vals = []
    for s in range(M, C):
        chunks_c = [frontier_cells + st for st in steps] if frontier_cells.size else []
        chunks_v = [frontier_vals] * len(chunks_c)
        own = by_sum.get(s, ())
        for oc, ov in own:
            chunks_c.append(oc)
            chunks_v.append(ov)
        if not chunks_c:
            continue
        frontier_cells, frontier_vals = merge_min(chunks_c, chunks_v)
        for oc, ov in own:
            idx = merge_indices(frontier_cells, oc)
            if not np.array_equal(frontier_vals[idx], ov):
                raise AssertionError("lift cell evaluated below its own level")
        out_cells.append(frontier_cells)
        out_vals.append(frontier_vals)
    # frontiers have pairwise distinct coordinate sums, so this merge is a
    # plain disjoint union sorted by cell
    cells, vals = merge_min(out_cells, out_vals)
    # validity is forced by the recurrence: every up-neighbor of a frontier
    # cell lands in the next frontier with a value no larger, and lift values
    # stay in 1..r-1; the constructor still enforces encoding invariants
    return PaddedCharFn(d, r, C, cells, vals, layout=layout)


def _dp_dict(ls: LiftedSets, r: int, d: int, M: int, C: int, cap: int) -> CharFn:
    from math import comb

    if comb(C - 1 + d, d) > cap:
        raise ResourceLimitError(
            f"materializing {comb(C - 1 + d, d)} cells exceeds cap {cap}"
        )
    own: dict = {}
    for v, cells in ls.sets.items():
        for p in cells:
            own[p] = r - ls.levels[v]
    by_sum: dict = {}
    for p, val in own.items():
        by_sum.setdefault(sum(p), {})[p] = val
    frontier: dict = {}
    overrides: dict = {}
    for s in range(M, C):
        nxt: dict = {}
        for p, val in frontier.items():
            for i in range(d):
                q = p[:i] + (p[i] + 1,) + p[i + 1 :]
                if q not in nxt or nxt[q] > val:
                    nxt[q] = val
        for p, val in by_sum.get(s, {}).items():
            if p in nxt and nxt[p] < val:
                raise AssertionError("lift cell evaluated below its own level")
            if p not in nxt or nxt[p] > val:
                nxt[p] = val
        frontier = nxt
        overrides.update(frontier)
    entries = {}
    from .charfn import _simplex_points

    for p in _simplex_points(d, C):
        entries[p] = overrides.get(p, r)
    chi = CharFn(d, entries)
    if not validate(chi, r):
        raise AssertionError("constructed function failed validation")
    return chi


def graph_to_gridsets(G: IncidenceStructure, d: int, r: int) -> GridSets:
    """Moment-curve drawing of a partite graph, rasterized to grid sets.

    Vertex v gets the point P_v on the moment curve; each edge contributes
    the half-segment from P_v to the midpoint of P_v P_w. The grid pitch is
    chosen so that the rasterizations of non-adjacent vertices stay
    Manhattan-separated.
    """
    if not isinstance(d, int) or d < 4:
        raise ValidationError("need d >= 4 for the moment-curve construction")
    if not isinstance(r, int) or r < 2 or G.rank != r - 1:
        raise ValidationError(f"graph must have exactly r-1 = {r - 1} parts")
    m = d - 1
    verts = G.vertices()
    points = {}
    for i, v in enumerate(verts):
        base = _geometry.moment_point(i + 1, min(3, m))
        points[v] = tuple(Fraction(c) for c in base) + (Fraction(0),) * (m - len(base))
    adj = G.undirected_adjacency()
    segments = {}
    for v in verts:
        segs = []
        for w in sorted(adj[v]):
            mid = tuple((a + b) / 2 for a, b in zip(points[v], points[w]))
            segs.append((points[v], mid))
        if not segs:
            segs.append((points[v], points[v]))
        segments[v] = segs
    min_sq = None
    for i, v in enumerate(verts):
        for w in verts[i + 1 :]:
            if w in adj[v]:
                continue
            for s1 in segments[v]:
                for s2 in segments[w]:
                    got = _geometry.seg_seg_min_sq(s1[0], s1[1], s2[0], s2[1])
                    if min_sq is None or got < min_sq:
                        min_sq = got
    if min_sq is not None and min_sq == 0:
        raise AssertionError("non-adjacent drawings intersect; moment placement broken")
    pitch = _geometry.grid_pitch(min_sq, r, d)
    raster = {v: _geometry.rasterize_segments(segments[v], pitch) for v in verts}
    layout = None
    if m <= _cells.MAX_PACK_DIM:
        axis_max = [0] * m
        for cells in raster.values():
            for p in cells:
                for j in range(m):
                    if p[j] > axis_max[j]:
                        axis_max[j] = p[j]
        try:
            # one layout shared by every set so packed intersection tests apply
            layout = _cells.PackLayout.for_extents(axis_max)
        except ResourceLimitError:
            layout = None
    sets = {v: _cells.CellSet.from_points(m, raster[v], layout=layout) for v in verts}
    levels = {v: v[0] for v in verts}
    return GridSets(m, r, sets, levels)


def graph_to_chi(G: IncidenceStructure, d: int, r: int, cap: int = DEFAULT_MATERIALIZE_CAP):
    """Characteristic function whose structure is equivalent to the graph."""
    return sets_to_chi(graph_to_gridsets(G, d, r), cap)


def intervals_to_chi(intervals: dict, levels: dict, r: int, cap: int = DEFAULT_MATERIALIZE_CAP):
    """Characteristic function realizing a partite interval family (d = 2).

    ``intervals`` maps vertices to closed rational intervals (lo, hi).
    Same-level intervals must be pairwise disjoint.
    """
    if set(intervals) != set(levels):
        raise ValidationError("intervals and levels must share the same vertices")
    if not intervals:
        raise ValidationError("need at least one interval")
    parsed = {}
    for v, pair in intervals.items():
        lo, hi = pair
        lo, hi = as_fraction(lo), as_fraction(hi)
        if lo > hi:
            raise ValidationError(f"interval of {v} is empty")
        parsed[v] = (lo, hi)
    keys = sorted(parsed, key=_key_str)
    min_gap = None
    for i, p in enumerate(keys):
        for q in keys[i + 1 :]:
            lo1, hi1 = parsed[p]
            lo2, hi2 = parsed[q]
            gap = max(lo1 - hi2, lo2 - hi1)
            if gap <= 0:
                if levels[p] == levels[q]:
                    raise ValidationError(
                        f"same-level intervals {p} and {q} overlap"
                    )
            elif min_gap is None or gap < min_gap:
                min_gap = gap
    pitch = _geometry.grid_pitch(min_gap * min_gap if min_gap is not None else None, r, 2)
    shift = min(lo for lo, _ in parsed.values())
    shift = -shift if shift < 0 else Fraction(0)
    sets = {}
    for v, (lo, hi) in parsed.items():
        sets[v] = _cells.CellSet.from_points(
            1, _geometry.rasterize_interval(lo + shift, hi + shift, pitch)
        )
    gs = GridSets(1, r, sets, dict(levels))
    return sets_to_chi(gs, cap)


def as_fraction(x) -> Fraction:
    """Rational parser for interval endpoints: int, float, str, or [num, den]."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ValidationError(f"not a number: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**9)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad rational {x!r}") from exc
    if isinstance(x, (list, tuple)) and len(x) == 2:
        try:
            return Fraction(int(x[0]), int(x[1]))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad rational {x!r}") from exc
    raise ValidationError(f"bad rational {x!r}")


# ---------------------------------------------------------------------------
# External formats


def parse_graph_text(text: str) -> IncidenceStructure:
    """Edge-list format: a "parts: n1 n2 ..." header, then one "u v" per line.

    Vertices are numbered 1..sum(sizes) part-major: part 1 holds 1..n1, part 2
    holds n1+1..n1+n2, and so on. Lines starting with '#' are comments.
    """
    sizes = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("parts:"):
            if sizes is not None:
                raise ValidationError("duplicate parts header")
            try:
                sizes = [int(tok) for tok in line[len("parts:") :].split()]
            except ValueError as exc:
                raise ValidationError(f"bad parts header on line {lineno}") from exc
            continue
        if sizes is None:
            raise ValidationError("parts header must precede edges")
        toks = line.split()
        if len(toks) != 2:
            raise ValidationError(f"expected 'u v' on line {lineno}")
        try:
            edges.append((int(toks[0]), int(toks[1])))
        except ValueError as exc:
            raise ValidationError(f"bad vertex id on line {lineno}") from exc
    if sizes is None:
        raise ValidationError("missing parts header")
    bounds = []
    acc = 0
    for s in sizes:
        bounds.append((acc + 1, acc + s))
        acc += s

    def locate(u: int):
        for i, (lo, hi) in enumerate(bounds, start=1):
            if lo <= u <= hi:
                return (i, u - lo)
        raise ValidationError(f"vertex id {u} out of range 1..{acc}")

    resolved = []
    for u, v in edges:
        a, b = locate(u), locate(v)
        if a[0] == b[0]:
            raise ValidationError(f"edge {u} {v} joins two part-{a[0]} vertices")
        if a[0] > b[0]:
            a, b = b, a
        resolved.append((a, b))
    return IncidenceStructure(len(sizes), sizes, resolved)


def regions_to_json(pr: ProjectedRegions) -> dict:
    return {
        "d": pr.dim,
        "rank": pr.rank,
        "regions": [
            {
                "vertex": list(v) if isinstance(v, tuple) else v,
                "level": pr.levels[v],
                "centers": [list(c) for c in sorted(pr.regions[v])],
            }
            for v in pr.vertex_order()
        ],
    }


def regions_from_json(obj: dict) -> ProjectedRegions:
    try:
        regions = {}
        levels = {}
        for rec in obj["regions"]:
            v = rec["vertex"]
            v = tuple(v) if isinstance(v, list) else v
            regions[v] = {tuple(c) for c in rec["centers"]}
            levels[v] = rec["level"]
        return ProjectedRegions(obj["d"], obj["rank"], regions, levels)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed regions: {exc}") from exc


def gridsets_to_json(gs: GridSets) -> dict:
    return {
        "dim_minus_1": gs.dim_minus_1,
        "rank": gs.rank,
        "sets": [
            {
                "vertex": list(v) if isinstance(v, tuple) else v,
                "level": gs.levels[v],
                "cells": [list(c) for c in gs.sets[v]],
            }
            for v in gs.vertex_order()
        ],
    }


def gridsets_from_json(obj: dict) -> GridSets:
    try:
        sets = {}
        levels = {}
        for rec in obj["sets"]:
            v = rec["vertex"]
            v = tuple(v) if isinstance(v, list) else v
            sets[v] = {tuple(c) for c in rec["cells"]}
            levels[v] = rec["level"]
        return GridSets(obj["dim_minus_1"], obj["rank"], sets, levels)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed grid sets: {exc}") from exc
