"""Partite incidence structures and their combinatorics.

An incidence structure of rank k is a vertex set split into parts P_1..P_k
together with edges that always point from a lower part to a higher one.
Structures are compared up to part-preserving relabeling after taking the
transitive closure; that relation is decided by a canonical form.
"""

from __future__ import annotations

import itertools
from typing import Iterable

import numpy as np

from . import _cells
from ._backend import label_components, merge_indices
from .charfn import CharFn, PaddedCharFn, validate
from .errors import ResourceLimitError, ValidationError

EQUIV_PART_CAP = 12
EQUIV_PERM_CAP = 10**6
CLASSIFY_VERTEX_CAP = 24
CLASSIFY_CLIQUE_CAP = 12

Vertex = tuple  # (part index, local id)


class IncidenceStructure:
    """Vertices (part, local id) in parts 1..rank; edges go up in part index."""

    __slots__ = ("rank", "part_sizes", "edges", "_key")

    def __init__(self, rank: int, part_sizes: Iterable[int], edges: Iterable[tuple]):
        if not isinstance(rank, int) or rank < 0:
            raise ValidationError("rank must be a nonnegative integer")
        part_sizes = tuple(int(s) for s in part_sizes)
        if len(part_sizes) != rank or any(s < 0 for s in part_sizes):
            raise ValidationError(f"need {rank} nonnegative part sizes")
        clean = set()
        for e in edges:
            u, v = e
            u, v = (int(u[0]), int(u[1])), (int(v[0]), int(v[1]))
            for w in (u, v):
                if not (1 <= w[0] <= rank) or not (0 <= w[1] < part_sizes[w[0] - 1]):
                    raise ValidationError(f"edge endpoint {w} is not a vertex")
            if u[0] >= v[0]:
                raise ValidationError(f"edge {u}->{v} must go from a lower part to a higher one")
            clean.add((u, v))
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "part_sizes", part_sizes)
        object.__setattr__(self, "edges", frozenset(clean))
        object.__setattr__(self, "_key", (rank, part_sizes, tuple(sorted(clean))))

    def __setattr__(self, name, value):
        raise AttributeError("IncidenceStructure is immutable")

    def vertices(self) -> list[Vertex]:
        return [(i, j) for i in range(1, self.rank + 1) for j in range(self.part_sizes[i - 1])]

    def part_vertices(self, i: int) -> list[Vertex]:
        return [(i, j) for j in range(self.part_sizes[i - 1])]

    def vertex_count(self) -> int:
        return sum(self.part_sizes)

    def undirected_adjacency(self) -> dict:
        adj: dict = {v: set() for v in self.vertices()}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def __eq__(self, other) -> bool:
        return isinstance(other, IncidenceStructure) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return (
            f"IncidenceStructure(rank={self.rank}, part_sizes={self.part_sizes}, "
            f"edges={len(self.edges)})"
        )


class ChiStructure:
    """Incidence structure of a characteristic function, with carriers.

    carrier maps each vertex to the connected level-set component it labels.
    """

    __slots__ = ("structure", "carrier", "chi", "r")

    def __init__(self, structure: IncidenceStructure, carrier: dict, chi, r: int):
        object.__setattr__(self, "structure", structure)
        object.__setattr__(self, "carrier", dict(carrier))
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "r", r)

    def __setattr__(self, name, value):
        raise AttributeError("ChiStructure is immutable")

    def __repr__(self) -> str:
        return f"ChiStructure(r={self.r}, structure={self.structure!r})"


def build_S_chi(chi, r: int) -> ChiStructure:
    """Structure of a characteristic function.

    Vertices are the connected components of the level sets chi^{-1}(v) for
    v = 1..r-1, placed in part r-v. Edge (p,q) iff some a in p has an upper
    unit-step neighbor b in q with chi(a) > chi(b). Level r components carry
    the full fiber and are not vertices.
    """
    if not validate(chi, r):
        raise ValidationError("not a valid characteristic function for this r")
    if isinstance(chi, PaddedCharFn):
        return _build_padded(chi, r)
    return _build_explicit(chi, r)


def _build_explicit(chi: CharFn, r: int) -> ChiStructure:
    by_value: dict = {v: [] for v in range(1, r)}
    for point, value in chi.entries.items():
        if value < r:
            by_value[value].append(point)
    comp_of: dict = {}
    carrier: dict = {}
    part_sizes = [0] * (r - 1) if r >= 1 else []
    for v in range(1, r):
        comps = _cells.orthogonal_components(by_value[v])
        part = r - v
        part_sizes[part - 1] = len(comps)
        for j, comp in enumerate(comps):
            vert = (part, j)
            carrier[vert] = _cells.CellSet.from_points(chi.dim, comp)
            for point in comp:
                comp_of[point] = vert
    edges = set()
    for point, value in chi.entries.items():
        if value >= r or value < 2:
            continue  # an edge source needs 1 < chi(a) <= r-1
        u = comp_of[point]
        for i in range(chi.dim):
            nb = point[:i] + (point[i] + 1,) + point[i + 1 :]
            w = chi.entries.get(nb, 0)
            if 1 <= w < value:
                edges.add((u, comp_of[nb]))
    structure = IncidenceStructure(max(r - 1, 0), part_sizes, edges)
    return ChiStructure(structure, carrier, chi, r)


def _build_padded(chi: PaddedCharFn, r: int) -> ChiStructure:
    if r != chi.rank:
        # background cells would become vertices; handle via materialization
        return _build_explicit(chi.to_charfn(), r)
    dim = chi.dim
    steps = chi.layout.steps()
    cells, vals = chi._cells, chi._vals
    part_sizes = [0] * (r - 1)
    carrier: dict = {}
    # component id per override cell, parallel to `cells`
    comp_part = np.zeros(cells.size, dtype=np.int64)
    comp_local = np.zeros(cells.size, dtype=np.int64)
    for v in range(1, r):
        mask = vals == v
        sub = cells[mask]
        if sub.size == 0:
            continue
        labels = label_components(sub, steps)
        part = r - v
        count = int(labels.max()) + 1
        part_sizes[part - 1] = count
        comp_part[mask] = part
        comp_local[mask] = labels
        for j in range(count):
            carrier[(part, j)] = _cells.CellSet.from_packed(
                dim, sub[labels == j], layout=chi.layout
            )
    edges = set()
    for step in steps:
        idx = merge_indices(cells, cells + step)
        hit = np.flatnonzero(idx >= 0)
        dsts = idx[hit]
        src = hit[(vals[hit] > vals[dsts]) & (vals[hit] < r)]
        if src.size == 0:
            continue
        dst = idx[src]
        quad = np.unique(
            np.stack(
                [comp_part[src], comp_local[src], comp_part[dst], comp_local[dst]],
                axis=1,
            ),
            axis=0,
        )
        for a, b, c, e in quad.tolist():
            edges.add(((a, b), (c, e)))
    structure = IncidenceStructure(r - 1, part_sizes, edges)
    return ChiStructure(structure, carrier, chi, r)


def transitive_closure(S: IncidenceStructure) -> frozenset:
    """Reachability closure of the edge set (a DAG: edges go up in parts)."""
    succ: dict = {}
    for u, v in S.edges:
        succ.setdefault(u, set()).add(v)
    closure: dict = {}

    def reach(u) -> set:
        if u in closure:
            return closure[u]
        acc = set()
        for v in succ.get(u, ()):
            acc.add(v)
            acc |= reach(v)
        closure[u] = acc
        return acc

    out = set()
    for u in list(succ):
        for v in reach(u):
            out.add((u, v))
    return frozenset(out)


def closed_structure(S: IncidenceStructure) -> IncidenceStructure:
    return IncidenceStructure(S.rank, S.part_sizes, transitive_closure(S))


def _refine_colors(vertices: list, edges: frozenset) -> dict:
    """Stable iterated refinement; colors are label-independent integers."""
    succ: dict = {v: [] for v in vertices}
    pred: dict = {v: [] for v in vertices}
    for u, v in edges:
        succ[u].append(v)
        pred[v].append(u)
    color = {v: v[0] for v in vertices}  # start from the part index
    while True:
        sig = {
            v: (
                color[v],
                tuple(sorted(color[w] for w in succ[v])),
                tuple(sorted(color[w] for w in pred[v])),
            )
            for v in vertices
        }
        order = sorted(set(sig.values()))
        relabel = {s: i for i, s in enumerate(order)}
        new = {v: relabel[sig[v]] for v in vertices}
        if new == color:
            return color
        color = new


def canonical_key(S: IncidenceStructure, cap: int = EQUIV_PART_CAP):
    """Canonical form of the closure under part-preserving relabeling.

    Vertices are ordered per part by refinement color; ties are resolved by
    minimizing the relabeled edge list over permutations within tied blocks.
    Blocks of mutually interchangeable vertices contribute no permutations.
    """
    for s in S.part_sizes:
        if s > cap:
            raise ResourceLimitError(f"part size {s} exceeds equivalence cap {cap}")
    edges = transitive_closure(S)
    vertices = S.vertices()
    color = _refine_colors(vertices, edges)
    succ: dict = {v: set() for v in vertices}
    pred: dict = {v: set() for v in vertices}
    for u, v in edges:
        succ[u].add(v)
        pred[v].add(u)

    # per part: fixed-order blocks of same-colored vertices
    part_blocks: list[list[list]] = []
    total_perms = 1
    for i in range(1, S.rank + 1):
        groups: dict = {}
        for v in S.part_vertices(i):
            groups.setdefault(color[v], []).append(v)
        blocks = [groups[c] for c in sorted(groups)]
        for b in blocks:
            if len(b) > 1 and all(
                succ[w] == succ[b[0]] and pred[w] == pred[b[0]] for w in b[1:]
            ):
                continue  # interchangeable: any order yields the same key
            total_perms *= _factorial(len(b))
        part_blocks.append(blocks)
    if total_perms > EQUIV_PERM_CAP:
        raise ResourceLimitError(f"equivalence tie-break needs {total_perms} permutations")

    block_perms = []
    for blocks in part_blocks:
        for b in blocks:
            if len(b) > 1 and not all(
                succ[w] == succ[b[0]] and pred[w] == pred[b[0]] for w in b[1:]
            ):
                block_perms.append([list(p) for p in itertools.permutations(b)])
            else:
                block_perms.append([b])

    best = None
    for choice in itertools.product(*block_perms):
        relabel = {}
        pos = 0
        counters = [0] * (S.rank + 1)
        for b in choice:
            for v in b:
                part = v[0]
                relabel[v] = (part, counters[part])
                counters[part] += 1
            pos += 1
        key = tuple(sorted((relabel[u], relabel[v]) for u, v in edges))
        if best is None or key < best:
            best = key
    return (S.rank, S.part_sizes, best)


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def equivalent(S1: IncidenceStructure, S2: IncidenceStructure, cap: int = EQUIV_PART_CAP) -> bool:
    """True iff a part-preserving bijection equates the transitive closures."""
    if S1.rank != S2.rank or S1.part_sizes != S2.part_sizes:
        return False
    if len(transitive_closure(S1)) != len(transitive_closure(S2)):
        return False
    return canonical_key(S1, cap) == canonical_key(S2, cap)


def extension_equivalent(chiS: ChiStructure, I_ext: Iterable[tuple]) -> bool:
    """Witness check for extended edge sets.

    Requires I_ext to contain the structure's own edges. Returns True when
    every extension edge (p,q) has carrier points a in p, b in q with a <= b
    coordinatewise; equivalence of the extended structure is then guaranteed.
    A False return means a missing witness, not settled inequivalence.
    """
    ext = set()
    for u, v in I_ext:
        ext.add(((int(u[0]), int(u[1])), (int(v[0]), int(v[1]))))
    if not chiS.structure.edges <= ext:
        raise ValidationError("extension must contain the structure's edges")
    for u, v in ext:
        if u not in chiS.carrier or v not in chiS.carrier:
            raise ValidationError(f"extension edge {(u, v)} uses unknown vertices")
        if u[0] >= v[0]:
            raise ValidationError("extension edges must go from a lower part to a higher one")
        if not _has_dominating_pair(chiS.carrier[u], chiS.carrier[v]):
            return False
    return True


def _has_dominating_pair(A: _cells.CellSet, B: _cells.CellSet) -> bool:
    """Exists a in A, b in B with a <= b coordinatewise."""
    if len(A) * len(B) > 10**7:
        raise ResourceLimitError("carrier pair too large for witness search")
    a_arr = A.to_array()
    b_arr = B.to_array()
    for b in b_arr:
        if np.any(np.all(a_arr <= b, axis=1)):
            return True
    return False


def rank_lift(S: IncidenceStructure, k: int) -> IncidenceStructure:
    """Embed a rank-2 structure into rank k >= 3.

    Adds a single vertex s in part 3 connected from every old vertex; parts
    4..k stay empty. The closure then remembers all original incidences.
    """
    if S.rank != 2:
        raise ValidationError("rank_lift expects a rank-2 structure")
    if not isinstance(k, int) or k < 3:
        raise ValidationError("target rank must be an integer >= 3")
    part_sizes = list(S.part_sizes) + [1] + [0] * (k - 3)
    s = (3, 0)
    edges = set(S.edges)
    for v in S.vertices():
        edges.add((v, s))
    return IncidenceStructure(k, part_sizes, edges)


# ---------------------------------------------------------------------------
# Graph-class tests


def _is_chordal(vertices: list, adj: dict) -> tuple[bool, list]:
    """Maximum cardinality search; returns (is_chordal, peo)."""
    weight = {v: 0 for v in vertices}
    order = []
    seen = set()
    for _ in range(len(vertices)):
        v = max((v for v in vertices if v not in seen), key=lambda v: (weight[v], v))
        order.append(v)
        seen.add(v)
        for w in adj[v]:
            if w not in seen:
                weight[w] += 1
    order.reverse()  # perfect elimination order candidate
    pos = {v: i for i, v in enumerate(order)}
    for i, v in enumerate(order):
        later = [w for w in adj[v] if pos[w] > i]
        if not later:
            continue
        u = min(later, key=lambda w: pos[w])
        rest = set(later) - {u}
        if not rest <= adj[u]:
            return False, order
    return True, order


def _maximal_cliques(vertices: list, adj: dict) -> list[frozenset]:
    """Bron-Kerbosch with pivoting; fine at the sizes we allow."""
    cliques = []

    def bk(R: set, P: set, X: set):
        if not P and not X:
            cliques.append(frozenset(R))
            return
        pivot = max(P | X, key=lambda v: len(adj[v] & P))
        for v in sorted(P - adj[pivot]):
            bk(R | {v}, P & adj[v], X & adj[v])
            P.remove(v)
            X.add(v)

    bk(set(), set(vertices), set())
    cliques.sort(key=sorted)
    return cliques


def _consecutive_ones_order(cliques: list[frozenset]) -> list[int] | None:
    """An ordering of the cliques making each vertex's cliques consecutive.

    Depth-first search over orderings with early pruning: once a vertex's
    clique run is interrupted it may never reappear.
    """
    n = len(cliques)
    if n <= 1:
        return list(range(n))
    budget = [2 * 10**6]

    def dfs(placed: list[int], open_set: set, closed: set, remaining: set):
        budget[0] -= 1
        if budget[0] < 0:
            raise ResourceLimitError("clique ordering search exceeded its node budget")
        if not remaining:
            return placed
        for i in sorted(remaining):
            Q = cliques[i]
            if Q & closed:
                continue
            still_open = set()
            newly_closed = set()
            ok = True
            for v in open_set:
                if v in Q:
                    still_open.add(v)
                else:
                    newly_closed.add(v)
            for v in Q:
                if v not in open_set:
                    # a vertex opening now must not appear in any placed clique
                    still_open.add(v)
            res = dfs(
                placed + [i],
                still_open,
                closed | newly_closed,
                remaining - {i},
            )
            if res is not None:
                return res
        return None

    return dfs([], set(), set(), set(range(n)))


def classify(S: IncidenceStructure) -> dict:
    """Completeness and interval-graph membership of the undirected graph.

    Returns a record with is_complete, is_interval, an interval representation
    (clique index ranges) when one exists, and the part size profile. Both
    tests look at the transitive closure: equivalence of structures only
    preserves the closed relation, so any honest graph-class answer must be
    closure-invariant. (Nested same-axis components in two variables produce
    raw 4-cycles whose closures are chordal.)
    """
    vertices = S.vertices()
    if len(vertices) > CLASSIFY_VERTEX_CAP:
        raise ResourceLimitError(f"classify vertex cap {CLASSIFY_VERTEX_CAP} exceeded")
    adj = closed_structure(S).undirected_adjacency()
    n = len(vertices)
    is_complete = all(
        (u == v) or (v in adj[u]) for u in vertices for v in vertices
    ) if n else True

    intervals = None
    if n == 0:
        is_interval = True
        intervals = {}
    else:
        chordal, _ = _is_chordal(vertices, adj)
        if not chordal:
            is_interval = False
        else:
            cliques = _maximal_cliques(vertices, adj)
            if len(cliques) > CLASSIFY_CLIQUE_CAP:
                raise ResourceLimitError(
                    f"classify clique cap {CLASSIFY_CLIQUE_CAP} exceeded"
                )
            order = _consecutive_ones_order(cliques)
            if order is None:
                is_interval = False
            else:
                is_interval = True
                position = {ci: k for k, ci in enumerate(order)}
                intervals = {}
                for v in vertices:
                    spots = [position[i] for i, Q in enumerate(cliques) if v in Q]
                    intervals[v] = (min(spots), max(spots))
    return {
        "is_complete": is_complete,
        "is_interval": is_interval,
        "intervals": intervals,
        "partite_profile": S.part_sizes,
    }


# ---------------------------------------------------------------------------
# External formats


def structure_to_json(S: IncidenceStructure) -> dict:
    return {
        "rank": S.rank,
        "parts": [[list(v) for v in S.part_vertices(i)] for i in range(1, S.rank + 1)],
        "edges": [[list(u), list(v)] for u, v in sorted(S.edges)],
    }


def structure_from_json(obj: dict) -> IncidenceStructure:
    try:
        rank = obj["rank"]
        parts = obj["parts"]
        part_sizes = []
        for i, part in enumerate(parts, start=1):
            ids = sorted(tuple(v) for v in part)
            if ids != [(i, j) for j in range(len(ids))]:
                raise ValidationError(f"part {i} must list vertices ({i},0)..({i},n-1)")
            part_sizes.append(len(ids))
        edges = [(tuple(u), tuple(v)) for u, v in obj.get("edges", [])]
        return IncidenceStructure(rank, part_sizes, edges)
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"malformed incidence structure: {exc}") from exc


def structure_to_dot(S: IncidenceStructure) -> str:
    lines = ["graph incidence {"]
    for i in range(1, S.rank + 1):
        lines.append(f"  subgraph cluster_part{i} {{")
        lines.append(f'    label="part {i}";')
        for _, j in S.part_vertices(i):
            lines.append(f'    "p{i}_{j}";')
        lines.append("  }")
    for (a, b), (c, d) in sorted(S.edges):
        lines.append(f'  "p{a}_{b}" -- "p{c}_{d}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
