"""Shared fixtures. The realization corpus is expensive, so it is built once
per session and reused by every test that needs it."""

from __future__ import annotations

import itertools
import time

import pytest

from quotfix.incidence import IncidenceStructure, build_S_chi, equivalent
from quotfix.realize import graph_to_gridsets, lift_sets, sets_to_chi


def _compositions(total, k):
    if k == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def _relabel_canon(rank, sizes, edges):
    """Minimal edge list over within-part vertex permutations."""
    perms = [list(itertools.permutations(range(n))) for n in sizes]
    best = None
    for combo in itertools.product(*perms):
        key = tuple(
            sorted(
                ((u[0], combo[u[0] - 1][u[1]]), (v[0], combo[v[0] - 1][v[1]]))
                for u, v in edges
            )
        )
        if best is None or key < best:
            best = key
    return (rank, tuple(sizes), best)


def partite_classes(max_n=5, ranks=(2, 3)):
    """Every partite graph on <= max_n vertices, one per relabeling class."""
    out = []
    seen = set()
    for rank in ranks:
        for total in range(max_n + 1):
            for sizes in _compositions(total, rank):
                pairs = [
                    ((i + 1, a), (j + 1, b))
                    for i in range(rank)
                    for j in range(i + 1, rank)
                    for a in range(sizes[i])
                    for b in range(sizes[j])
                ]
                for mask in range(1 << len(pairs)):
                    edges = [pairs[k] for k in range(len(pairs)) if mask >> k & 1]
                    key = _relabel_canon(rank, sizes, edges)
                    if key in seen:
                        continue
                    seen.add(key)
                    out.append(IncidenceStructure(rank, tuple(sizes), edges))
    return out


@pytest.fixture(scope="session")
def realization_corpus():
    """Realize every corpus graph in dimension 4 and compare structures.

    Returns per-class records plus the wall-clock cost, shared between the
    round-trip and construction-property acceptance tests.
    """
    t0 = time.time()
    records = []
    for G in partite_classes():
        r = G.rank + 1
        gs = graph_to_gridsets(G, 4, r)
        ls = lift_sets(gs)
        props = ls.check_properties()
        chi = sets_to_chi(gs)
        cs = build_S_chi(chi, r)
        records.append(
            {
                "graph": G,
                "properties": props,
                "round_trip_ok": equivalent(cs.structure, G),
            }
        )
    return {"elapsed": time.time() - t0, "records": records}
