import random
from fractions import Fraction

import numpy as np
import pytest

from oracles import min_l1_direct, segment_cells_direct
from quotfix import _geometry
from quotfix.charfn import CharFn, enumerate_charfns, validate
from quotfix.errors import ValidationError
from quotfix.fixtures import k22_structure, staircase_charfn, staircase_structure
from quotfix.incidence import IncidenceStructure, build_S_chi, equivalent
from quotfix.realize import (
    GridSets,
    _min_l1_below,
    as_fraction,
    chi_to_regions,
    graph_to_chi,
    graph_to_gridsets,
    gridsets_from_json,
    gridsets_to_json,
    intersection_structure,
    intervals_to_chi,
    lift_sets,
    parse_graph_text,
    regions_from_json,
    regions_to_json,
    sets_to_chi,
)


# ---------------------------------------------------------------------------
# Projection round trip


def test_projection_round_trip_small():
    cases = [(chi, 2) for chi in enumerate_charfns(2, 2, 4)]
    cases += [(chi, 3) for chi in enumerate_charfns(3, 1, 4)]
    cases.append((staircase_charfn(), 3))
    for chi, r in cases:
        pr = chi_to_regions(chi, r)
        got = intersection_structure(pr)
        want = build_S_chi(chi, r).structure
        assert equivalent(got, want), (chi, r)


def test_regions_of_known_function():
    pr = chi_to_regions(staircase_charfn(), 3)
    # part-1 components project along the diagonal to single centers
    assert pr.regions[(1, 0)] == frozenset({(-1,)})
    assert pr.regions[(1, 1)] == frozenset({(1,), (2,)})
    assert regions_from_json(regions_to_json(pr)).regions == pr.regions


# ---------------------------------------------------------------------------
# Interval realizations (two variables)


def test_intervals_realize_staircase():
    S = staircase_structure()
    intervals = {
        (1, 0): (0, 2),
        (1, 1): (4, 6),
        (2, 0): (Fraction(1, 2), 1),
        (2, 1): (Fraction(3, 2), 5),
    }
    levels = {v: v[0] for v in intervals}
    chi = intervals_to_chi(intervals, levels, 3)
    assert validate(chi, 3)
    assert equivalent(build_S_chi(chi, 3).structure, S)


def test_intervals_same_level_overlap_rejected():
    with pytest.raises(ValidationError):
        intervals_to_chi(
            {(1, 0): (0, 2), (1, 1): (1, 3)},
            {(1, 0): 1, (1, 1): 1},
            2,
        )


def test_as_fraction_forms():
    assert as_fraction("3/7") == Fraction(3, 7)
    assert as_fraction([3, 7]) == Fraction(3, 7)
    assert as_fraction(2) == 2
    with pytest.raises(ValidationError):
        as_fraction("x")
    with pytest.raises(ValidationError):
        as_fraction([1, 0])


# ---------------------------------------------------------------------------
# Grid sets and lifts


def _tiny_gridsets():
    # two crossing sets and a far-away one, rank 3 (so gap must be >= 8)
    sets = {
        "a": [(0, 0), (0, 1), (0, 2)],
        "b": [(0, 2), (1, 2)],
        "c": [(20, 20)],
    }
    levels = {"a": 1, "b": 2, "c": 2}
    return GridSets(2, 3, sets, levels)


def test_gridsets_structure():
    gs = _tiny_gridsets()
    gs.validate()
    S = gs.structure()
    assert S.part_sizes == (1, 2)
    assert S.edges == frozenset({((1, 0), (2, 0))})


def test_gridsets_validate_rejects_close_disjoint_sets():
    gs = GridSets(2, 3, {"a": [(0, 0)], "b": [(3, 0)]}, {"a": 1, "b": 2})
    with pytest.raises(ValidationError):
        gs.validate()


def test_gridsets_validate_rejects_same_level_overlap():
    gs = GridSets(2, 3, {"a": [(0, 0)], "b": [(0, 0)]}, {"a": 1, "b": 1})
    with pytest.raises(ValidationError):
        gs.validate()


def test_gridsets_json_round_trip():
    gs = _tiny_gridsets()
    back = gridsets_from_json(gridsets_to_json(gs))
    assert back.levels == gs.levels
    assert {v: set(c) for v, c in back.sets.items()} == {
        v: set(c) for v, c in gs.sets.items()
    }


def test_lift_properties_hold():
    ls = lift_sets(_tiny_gridsets())
    assert all(ls.check_properties().values())


def test_sets_to_chi_realizes_the_intersection_pattern():
    gs = _tiny_gridsets()
    chi = sets_to_chi(gs)
    assert validate(chi, 3)
    assert equivalent(build_S_chi(chi, 3).structure, gs.structure())


def test_sets_to_chi_explicit_route():
    # five variables force the explicit materialized representation
    sets = {"a": [(0, 0, 0, 0)], "b": [(0, 0, 0, 0), (1, 0, 0, 0)]}
    gs = GridSets(4, 2, sets, {"a": 1, "b": 1})
    with pytest.raises(ValidationError):
        sets_to_chi(gs)  # same level, overlapping
    gs = GridSets(4, 2, {"a": [(0, 0, 0, 0)]}, {"a": 1})
    chi = sets_to_chi(gs)
    assert isinstance(chi, CharFn)
    assert validate(chi, 2)
    assert build_S_chi(chi, 2).structure.part_sizes == (1,)


# ---------------------------------------------------------------------------
# Moment-curve realization


def test_graph_to_gridsets_structure_matches():
    G = staircase_structure()
    gs = graph_to_gridsets(G, 4, 3)
    gs.validate()
    S = gs.structure()
    assert S.part_sizes == G.part_sizes
    assert S.edges == G.edges


def test_graph_to_chi_small_graph():
    G = k22_structure()
    chi = graph_to_chi(G, 4, 3)
    assert equivalent(build_S_chi(chi, 3).structure, G)


def test_graph_to_chi_guards():
    with pytest.raises(ValidationError):
        graph_to_chi(k22_structure(), 3, 3)  # needs d >= 4
    with pytest.raises(ValidationError):
        graph_to_chi(k22_structure(), 4, 4)  # rank must equal r-1


# ---------------------------------------------------------------------------
# Geometry primitives against brute force


def test_supercover_matches_clipping_oracle():
    from quotfix._backend import supercover

    rng = random.Random(7)
    for _ in range(40):
        m = rng.choice((2, 3))
        a2 = [rng.randrange(0, 13) for _ in range(m)]  # halved coordinates
        b2 = [rng.randrange(0, 13) for _ in range(m)]
        got = {
            tuple(int(x) for x in row)
            for row in supercover(
                np.array(a2, dtype=np.int64), np.array(b2, dtype=np.int64), 2
            )
        }
        p = tuple(Fraction(x, 2) for x in a2)
        q = tuple(Fraction(x, 2) for x in b2)
        lo = [0] * m
        hi = [max(a2[i], b2[i]) // 2 + 1 for i in range(m)]
        assert got == segment_cells_direct(p, q, lo, hi), (a2, b2)


def test_min_l1_matches_brute_force():
    rng = random.Random(11)
    for _ in range(30):
        m = rng.choice((1, 2, 3))
        A = np.array([[rng.randrange(0, 30) for _ in range(m)] for _ in range(8)])
        B = np.array([[rng.randrange(0, 30) for _ in range(m)] for _ in range(5)])
        need = rng.randrange(1, 25)
        exact = min_l1_direct(A.tolist(), B.tolist())
        got = _min_l1_below(A.astype(np.float64), B.astype(np.float64), need)
        if exact < need:
            assert got == exact
        else:
            assert got is None


def test_rasterize_interval_endpoints_touch():
    cells = _geometry.rasterize_interval(Fraction(1), Fraction(2), Fraction(1, 2))
    assert cells == [(1,), (2,), (3,), (4,)]
    # touching a cell border claims both neighbors
    cells = _geometry.rasterize_interval(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))
    assert cells == [(0,), (1,)]


# ---------------------------------------------------------------------------
# Text format


def test_parse_graph_text():
    G = parse_graph_text("# comment\nparts: 2 1\n1 3\n2 3\n")
    assert G.rank == 2
    assert G.part_sizes == (2, 1)
    assert G.edges == frozenset({((1, 0), (2, 0)), ((1, 1), (2, 0))})


@pytest.mark.parametrize(
    "text",
    [
        "1 2\n",  # no header
        "parts: 2 1\nparts: 2 1\n",  # duplicate header
        "parts: 2 1\n1 9\n",  # vertex out of range
        "parts: 2 1\n1 2\n",  # same-part edge
        "parts: 2 1\n1 2 3\n",  # malformed line
    ],
)
def test_parse_graph_text_rejects(text):
    with pytest.raises(ValidationError):
        parse_graph_text(text)
