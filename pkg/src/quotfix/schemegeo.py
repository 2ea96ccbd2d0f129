"""Geometry of the configuration locus attached to an incidence structure.

A structure with parts 1..r-1 describes tuples of nested subspaces of k^r:
each vertex v in part m carries an m-dimensional subspace E_v, and every
edge (u, v) forces E_u inside E_v. This module computes invariants of that
locus: dimension through interval peeling, fixed points of the coordinate
torus, point counts over prime fields, and tangent dimensions at explicit
configurations.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from math import comb

from .errors import ResourceLimitError, ValidationError
from .incidence import IncidenceStructure, classify, transitive_closure
from .linalg import (
    ExactMatrix,
    check_field,
    gaussian_binomial,
    random_subspace_containing,
    subspaces_containing,
)

FIXED_POINT_NODE_CAP = 10**7
COUNT_ENUM_CAP = 10**7
WITNESS_PRIME = 10007
COUNT_PRIMES = (2, 3, 5, 7, 11)


def grassmannian_dim(m: int, r: int) -> int:
    """Dimension m(r-m) of the space of m-planes in k^r."""
    if not (0 <= m <= r):
        raise ValidationError(f"need 0 <= m <= r, got m={m}, r={r}")
    return m * (r - m)


def flag_dim(dims, r: int) -> int:
    """Dimension of the variety of nested subspaces with the given ranks."""
    dims = list(dims)
    if any(not (0 <= x <= r) for x in dims):
        raise ValidationError("flag ranks must lie in 0..r")
    if any(a >= b for a, b in zip(dims, dims[1:])):
        raise ValidationError("flag ranks must be strictly increasing")
    full = dims + [r]
    return sum(a * (b - a) for a, b in zip(full, full[1:]))


# ---------------------------------------------------------------------------
# Configurations


class SubspaceConfig:
    """A point of the configuration locus: one subspace per vertex.

    spaces maps each vertex v to an ExactMatrix whose rows are a canonical
    reduced-echelon basis of E_v; the row count equals the part index of v.
    """

    __slots__ = ("structure", "field", "spaces", "r")

    def __init__(self, structure: IncidenceStructure, field, spaces: dict):
        check_field(field)
        r = structure.rank + 1
        if set(spaces) != set(structure.vertices()):
            raise ValidationError("spaces must cover exactly the vertices")
        for v, mat in spaces.items():
            if not isinstance(mat, ExactMatrix) or mat.field != field:
                raise ValidationError(f"space of {v} must be an ExactMatrix over the field")
            if mat.shape != (v[0], r):
                raise ValidationError(
                    f"space of {v} must have {v[0]} rows and {r} columns"
                )
            red, _ = mat.rref()
            if red.rows != mat.rows:
                raise ValidationError(f"space of {v} must be a full-rank echelon basis")
        for u, v in structure.edges:
            if spaces[u].stack(spaces[v]).rank() != v[0]:
                raise ValidationError(f"edge {(u, v)}: containment fails")
        object.__setattr__(self, "structure", structure)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "spaces", dict(spaces))
        object.__setattr__(self, "r", r)

    def __setattr__(self, name, value):
        raise AttributeError("SubspaceConfig is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SubspaceConfig)
            and self.structure == other.structure
            and self.field == other.field
            and self.spaces == other.spaces
        )


def config_to_json(config: SubspaceConfig) -> dict:
    field = "Q" if config.field == "Q" else {"Fp": config.field}
    spaces = {}
    for v in sorted(config.spaces):
        mat = config.spaces[v]
        spaces[f"{v[0]},{v[1]}"] = [[str(x) for x in row] for row in mat.rows]
    return {"field": field, "spaces": spaces}


def config_from_json(data: dict, structure: IncidenceStructure) -> SubspaceConfig:
    raw = data["field"]
    field = "Q" if raw == "Q" else int(raw["Fp"])
    spaces = {}
    for key, rows in data["spaces"].items():
        i, j = (int(x) for x in key.split(","))
        conv = Fraction if field == "Q" else int
        spaces[(i, j)] = ExactMatrix(field, [[conv(x) for x in row] for row in rows])
    return SubspaceConfig(structure, field, spaces)


# ---------------------------------------------------------------------------
# Torus fixed points and point counts


def _check_ambient(S: IncidenceStructure, r: int) -> None:
    if S.rank != r - 1:
        raise ValidationError(f"structure has {S.rank} parts; ambient rank {r} needs {r - 1}")


def coordinate_fixed_points(S: IncidenceStructure, r: int, cap: int = FIXED_POINT_NODE_CAP) -> int:
    """Number of coordinate-subspace configurations.

    Counts assignments v -> S_v of subsets of {1..r} with |S_v| = part(v)
    and S_u contained in S_v along every edge. Vertices are processed in
    part-major order (a topological order), branching only where a later
    vertex can still see the choice.
    """
    _check_ambient(S, r)
    verts = S.vertices()
    preds: dict = {v: [] for v in verts}
    has_succ = {v: False for v in verts}
    for u, v in S.edges:
        preds[v].append(u)
        has_succ[u] = True
    full = (1 << r) - 1
    budget = [cap]

    def rec(i: int, masks: dict) -> int:
        if i == len(verts):
            return 1
        budget[0] -= 1
        if budget[0] < 0:
            raise ResourceLimitError(f"fixed-point search exceeded {cap} nodes")
        v = verts[i]
        need = v[0]
        base = 0
        for u in preds[v]:
            base |= masks[u]
        have = bin(base).count("1")
        if have > need:
            return 0
        free = [b for b in range(r) if not (base >> b) & 1]
        if not has_succ[v]:
            return comb(len(free), need - have) * rec(i + 1, masks)
        total = 0
        for extra in itertools.combinations(free, need - have):
            m = base
            for b in extra:
                m |= 1 << b
            masks[v] = m
            total += rec(i + 1, masks)
        masks.pop(v, None)
        return total

    return rec(0, {})


def count_points_Fq(S: IncidenceStructure, r: int, q: int, cap: int = COUNT_ENUM_CAP) -> int:
    """Exact number of subspace configurations over the prime field F_q."""
    _check_ambient(S, r)
    if not isinstance(q, int) or q < 2 or any(q % i == 0 for i in range(2, int(q**0.5) + 1)):
        raise ValidationError(f"q must be prime, got {q!r}")
    verts = S.vertices()
    preds: dict = {v: [] for v in verts}
    has_succ = {v: False for v in verts}
    for u, v in S.edges:
        preds[v].append(u)
        has_succ[u] = True
    estimate = 1
    for v in verts:
        if has_succ[v]:
            estimate *= gaussian_binomial(r, v[0], q)
            if estimate > cap:
                raise ResourceLimitError(
                    f"estimated enumeration above cap {cap} at q={q}"
                )

    def rec(i: int, chosen: dict) -> int:
        if i == len(verts):
            return 1
        v = verts[i]
        stacked = [row for u in preds[v] for row in chosen[u]]
        base, _ = _echelon(q, stacked, r)
        if len(base) > v[0]:
            return 0
        if not has_succ[v]:
            factor = gaussian_binomial(r - len(base), v[0] - len(base), q)
            return factor * rec(i + 1, chosen)
        total = 0
        for rows in subspaces_containing(q, r, v[0], base):
            chosen[v] = rows
            total += rec(i + 1, chosen)
        chosen.pop(v, None)
        return total

    return rec(0, {})


def _echelon(p: int, rows, ncols: int):
    """Reduced echelon rows and pivots over F_p, plain-int rows."""
    mat = ExactMatrix(p, rows)
    red, pivots = mat.rref()
    return [list(row) for row in red.rows], list(pivots)


# ---------------------------------------------------------------------------
# Dimension via interval peeling


def interval_dimension(S, r: int, intervals: dict | None = None) -> int:
    """Dimension of the configuration locus of an interval structure.

    Repeatedly removes the active vertex whose interval ends first; each
    removal contributes (d2-d1)(d3-d2), where d1/d3 come from the deepest
    lower and shallowest upper vertex whose interval still meets it.
    """
    if hasattr(S, "structure"):
        S = S.structure
    _check_ambient(S, r)
    if intervals is None:
        record = classify(S)
        if not record["is_interval"]:
            raise ValidationError("structure has no interval representation")
        intervals = record["intervals"]
    if set(intervals) != set(S.vertices()):
        raise ValidationError("interval map must cover exactly the vertices")
    active = dict(intervals)
    total = 0
    while active:
        p2 = min(active, key=lambda v: (active[v][1], v))
        lo2, hi2 = active[p2]
        d2 = p2[0]
        d1, d3 = 0, r
        for u, (lo, hi) in active.items():
            if u == p2 or hi < lo2 or hi2 < lo:
                continue
            if u[0] < d2:
                d1 = max(d1, u[0])
            elif u[0] > d2:
                d3 = min(d3, u[0])
        total += (d2 - d1) * (d3 - d2)
        del active[p2]
    return total


def _peel_order(S: IncidenceStructure, r: int, intervals: dict) -> list:
    """Peeling schedule: (vertex, deepest lower partner, shallowest upper)."""
    active = dict(intervals)
    order = []
    while active:
        p2 = min(active, key=lambda v: (active[v][1], v))
        lo2, hi2 = active[p2]
        d2 = p2[0]
        p1 = p3 = None
        for u, (lo, hi) in sorted(active.items()):
            if u == p2 or hi < lo2 or hi2 < lo:
                continue
            if u[0] < d2 and (p1 is None or u[0] > p1[0]):
                p1 = u
            elif u[0] > d2 and (p3 is None or u[0] < p3[0]):
                p3 = u
        order.append((p2, p1, p3))
        del active[p2]
    return order


# ---------------------------------------------------------------------------
# Tangent spaces


def tangent_dimension(config: SubspaceConfig, check_closure: bool = False) -> int:
    """Dimension of the space of first-order deformations at the config.

    Deformations assign each vertex a map E_v -> k^r/E_v; every edge (u, v)
    demands compatibility of the two maps on E_u. The result is the ambient
    degree-of-freedom count minus the rank of those linear conditions.
    """
    S = config.structure
    ambient = sum(grassmannian_dim(v[0], config.r) for v in S.vertices())
    rank = _constraint_rank(config, S.edges)
    if check_closure:
        closed = _constraint_rank(config, transitive_closure(S))
        if closed != rank:
            raise AssertionError("closure constraints changed the tangent rank")
    return ambient - rank


def _constraint_rank(config: SubspaceConfig, edges) -> int:
    field = config.field
    r = config.r
    verts = config.structure.vertices()
    offsets = {}
    pos = 0
    for v in verts:
        offsets[v] = pos
        pos += v[0] * (r - v[0])
    nvars = pos
    zero = 0

    info = {}
    for v in verts:
        mat = config.spaces[v]
        red, pivots = mat.rref()
        wcols = [j for j in range(r) if j not in set(pivots)]
        info[v] = (red.rows, list(pivots), wcols)

    rows = []
    for u, v in sorted(edges):
        urows, _, wu = info[u]
        vrows, pv, wv = info[v]
        du, dv = u[0], v[0]
        where = {c: k for k, c in enumerate(pv)}
        # express each basis row of E_u in E_v's basis: coefficients are the
        # entries at E_v's pivot columns (echelon bases make this exact)
        for i in range(du):
            x = urows[i]
            coeff = [x[c] for c in pv]
            for jj, j in enumerate(wv):
                row = [zero] * nvars
                # unknown X_u[i, l] pushes e_l through the projection mod E_v
                for ll, l in enumerate(wu):
                    if l in where:
                        val = -vrows[where[l]][j]
                    else:
                        val = 1 if l == j else 0
                    if val:
                        row[offsets[u] + i * (r - du) + ll] = val
                # minus the deformation of E_v applied to x
                for k in range(dv):
                    if coeff[k]:
                        row[offsets[v] + k * (r - dv) + jj] = -coeff[k]
                rows.append(row)
    if not rows:
        return 0
    return ExactMatrix(field, rows).rank()


# ---------------------------------------------------------------------------
# Config sampling


def random_config(S: IncidenceStructure, r: int, p: int, rng, retries: int = 8):
    """Random configuration over F_p, or None if sampling keeps failing."""
    _check_ambient(S, r)
    verts = S.vertices()
    preds: dict = {v: [] for v in verts}
    for u, v in S.edges:
        preds[v].append(u)
    for _ in range(retries):
        chosen: dict = {}
        ok = True
        for v in verts:
            stacked = [row for u in preds[v] for row in chosen[u]]
            base, _ = _echelon(p, stacked, r)
            if len(base) > v[0]:
                ok = False
                break
            chosen[v] = random_subspace_containing(rng, p, r, v[0], base)
        if ok:
            spaces = {v: ExactMatrix(p, rows) for v, rows in chosen.items()}
            return SubspaceConfig(S, p, spaces)
    return None


def random_interval_config(
    S: IncidenceStructure, r: int, p: int, rng, intervals: dict | None = None
):
    """Random configuration built by reversing the interval peeling.

    Inserting vertices in reverse peel order needs only one lower and one
    upper constraint each, which nested intervals always make satisfiable.
    """
    _check_ambient(S, r)
    if intervals is None:
        record = classify(S)
        if not record["is_interval"]:
            raise ValidationError("structure has no interval representation")
        intervals = record["intervals"]
    chosen: dict = {}
    for p2, p1, p3 in reversed(_peel_order(S, r, intervals)):
        lower = chosen[p1] if p1 is not None else ()
        if p3 is None:
            chosen[p2] = random_subspace_containing(rng, p, r, p2[0], lower)
            continue
        upper = chosen[p3]
        # work inside the upper space: rows of `upper` are its basis
        d3 = p3[0]
        lower_in = [_coords_in(p, row, upper) for row in lower]
        small = random_subspace_containing(rng, p, d3, p2[0], _echelon(p, lower_in, d3)[0])
        lifted = [
            [sum(c * upper[k][j] for k, c in enumerate(row)) % p for j in range(r)]
            for row in small
        ]
        chosen[p2] = tuple(tuple(x) for x in _echelon(p, lifted, r)[0])
    spaces = {v: ExactMatrix(p, rows) for v, rows in chosen.items()}
    return SubspaceConfig(S, p, spaces)


def _coords_in(p: int, row, basis) -> list:
    """Coordinates of a vector lying in the echelon row space of basis."""
    pivots = [next(j for j, x in enumerate(b) if x) for b in basis]
    return [row[c] % p for c in pivots]


def _part_partitions(items: list):
    """Set partitions of the items, coarsest (fewest blocks) first."""
    if not items:
        yield []
        return
    parts: list = []

    def grow(i: int, blocks: list):
        if i == len(items):
            parts.append([tuple(b) for b in blocks])
            return
        for b in blocks:
            b.append(items[i])
            grow(i + 1, blocks)
            b.pop()
        blocks.append([items[i]])
        grow(i + 1, blocks)
        blocks.pop()

    grow(1, [[items[0]]])
    parts.sort(key=len)
    yield from parts


def coincidence_configs(
    S: IncidenceStructure, r: int, p: int, rng, limit: int = 24
):
    """Configs with chosen same-part vertices forced equal, coarsest first."""
    verts = S.vertices()
    by_part: dict = {}
    for v in verts:
        by_part.setdefault(v[0], []).append(v)
    menus = [list(_part_partitions(vs)) for _, vs in sorted(by_part.items())]
    count = 1
    for m in menus:
        count *= len(m)
    patterns = itertools.product(*menus)
    if count <= 4096:
        patterns = sorted(patterns, key=lambda combo: sum(len(c) for c in combo))
    made = 0
    for combo in patterns:
        if made >= limit:
            return
        rep = {}
        for blocks in combo:
            for block in blocks:
                for v in block:
                    rep[v] = block[0]
        quot_edges = {(rep[u], rep[v]) for u, v in S.edges if rep[u] != rep[v]}
        if any(u[0] == v[0] for u, v in quot_edges):
            continue
        cfg = _quotient_config(S, r, p, rng, rep, quot_edges)
        if cfg is not None:
            made += 1
            yield cfg


def _quotient_config(S, r, p, rng, rep, quot_edges, retries: int = 6):
    reps = sorted({rep[v] for v in S.vertices()})
    preds: dict = {v: [] for v in reps}
    for u, v in quot_edges:
        preds[v].append(u)
    for _ in range(retries):
        chosen: dict = {}
        ok = True
        for v in reps:
            stacked = [row for u in preds[v] for row in chosen[u]]
            base, _ = _echelon(p, stacked, r)
            if len(base) > v[0]:
                ok = False
                break
            chosen[v] = random_subspace_containing(rng, p, r, v[0], base)
        if not ok:
            continue
        spaces = {v: ExactMatrix(p, chosen[rep[v]]) for v in S.vertices()}
        try:
            return SubspaceConfig(S, p, spaces)
        except ValidationError:
            continue
    return None


# ---------------------------------------------------------------------------
# Verdicts


def smooth_verdict(
    chi, r: int, d: int | None = None, seed: int = 0, samples: int = 5,
    prime: int = WITNESS_PRIME,
) -> dict:
    """Smoothness report for the locus attached to the function's structure.

    Known-smooth shapes get a reason; otherwise tangent dimensions are
    sampled at coincidence-forced and random configurations, and a strict
    jump above the smallest observed tangent is reported as a witness.
    """
    from .charfn import validate
    from .incidence import build_S_chi

    if not validate(chi, r):
        raise ValidationError("characteristic function fails validation")
    if d is None:
        d = chi.dim
    elif d != chi.dim:
        raise ValidationError(f"function lives in dimension {chi.dim}, not {d}")
    S = build_S_chi(chi, r).structure
    if S.vertex_count() == 0:
        return {"verdict": "Smooth", "reason": "empty structure: a single point", "dimension": 0}
    if r <= 2:
        return {
            "verdict": "Smooth",
            "reason": "one part only: a product of projective lines",
            "dimension": S.vertex_count(),
        }
    if d <= 2:
        out = {"verdict": "Smooth", "reason": "ambient dimension at most 2: an iterated Grassmannian bundle"}
        try:
            out["dimension"] = interval_dimension(S, r)
        except (ValidationError, ResourceLimitError):
            pass
        return out
    try:
        record = classify(S)
    except ResourceLimitError:
        record = None
    if record is not None and record["is_interval"]:
        return {
            "verdict": "Smooth",
            "reason": "interval structure: an iterated Grassmannian bundle",
            "dimension": interval_dimension(S, r, record["intervals"]),
        }
    rng = random.Random(seed)
    found = []
    for cfg in coincidence_configs(S, r, prime, rng):
        found.append((tangent_dimension(cfg), cfg))
        if len(found) >= samples:
            break
    while len(found) < 2 * samples:
        cfg = random_config(S, r, prime, rng)
        if cfg is None:
            break
        found.append((tangent_dimension(cfg), cfg))
    if not found:
        return {"verdict": "Unknown", "reason": "no configurations sampled"}
    tmin = min(t for t, _ in found)
    tmax, witness = max(found, key=lambda x: x[0])
    if tmax > tmin:
        return {
            "verdict": "SingularWitness",
            "tangent": tmax,
            "reference": tmin,
            "config": witness,
        }
    return {
        "verdict": "Unknown",
        "reason": f"all {len(found)} sampled tangents equal {tmin}",
        "tangent": tmax,
    }
