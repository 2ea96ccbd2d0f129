"""Acceptance suite: nine external criteria, one printed line each.

Each test prints "criterion N [label]: PASS/FAIL (elapsed)" straight to the
terminal (bypassing capture) and then asserts, so a red run still shows the
full scoreboard.
"""

import time
from math import comb

from oracles import lagrange_degree, lagrange_eval
from quotfix.charfn import enumerate_charfns
from quotfix.fixtures import (
    crossed_lines_charfn,
    k22_structure,
    staircase_structure,
)
from quotfix.incidence import build_S_chi, classify, equivalent
from quotfix.linalg import ExactMatrix
from quotfix.realize import chi_to_regions, intersection_structure
from quotfix.schemegeo import (
    SubspaceConfig,
    coordinate_fixed_points,
    count_points_Fq,
    interval_dimension,
    random_interval_config,
    smooth_verdict,
    tangent_dimension,
)
from quotfix.verify import check_identity, product_series_check

# criterion 7 spans two tests (the corpus fixture feeds both); the timing is
# accumulated here so the printed line reports the real total
_SHARED = {}


def _report(capsys, num, label, passed, t0, budget=None):
    elapsed = time.time() - t0
    status = "PASS" if passed else "FAIL"
    detail = f"({elapsed:.1f}s)" if budget is None else f"({elapsed:.1f}s / {budget:.0f}s)"
    with capsys.disabled():
        print(f"criterion {num} [{label}]: {status} {detail}")
    assert passed, f"criterion {num} failed: {label}"
    if budget is not None:
        assert elapsed < budget, f"criterion {num} exceeded {budget}s"


def test_criterion_1_enumeration_oracle(capsys):
    t0 = time.time()
    plane = [len(enumerate_charfns(1, 2, n)) for n in range(11)]
    space = [len(enumerate_charfns(1, 3, n)) for n in range(6)]
    ok = plane == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42] and space == [1, 1, 3, 6, 13, 24]
    _report(capsys, 1, "enumeration counts", ok, t0, budget=10)


def test_criterion_2_decomposition_identity(capsys):
    t0 = time.time()
    ok = True
    for r in (1, 2, 3):
        for d in (1, 2, 3):
            ok = ok and check_identity(r, d, 6)["ok"]
    ok = ok and check_identity(3, 4, 4)["ok"]
    _report(capsys, 2, "fixed points = tuple counts", ok, t0, budget=300)


def test_criterion_3_product_series(capsys):
    t0 = time.time()
    ok = all(product_series_check(r, 8)["ok"] for r in (1, 2, 3))
    _report(capsys, 3, "two-variable Euler series", ok, t0, budget=120)


def test_criterion_4_rank_two_products(capsys):
    t0 = time.time()
    ok = True
    for d in (1, 2, 3):
        for n in range(8):
            for chi in enumerate_charfns(2, d, n):
                S = build_S_chi(chi, 2).structure
                k = S.part_sizes[0]
                if interval_dimension(S, 2) != k:
                    ok = False
                if coordinate_fixed_points(S, 2) != 2**k:
                    ok = False
    _report(capsys, 4, "rank-2 loci are products of lines", ok, t0)


def test_criterion_5_interval_certificate(capsys):
    t0 = time.time()
    import random

    ok = True
    checked = 0
    for r in (1, 2, 3, 4):
        for n in range(9):
            for chi in enumerate_charfns(r, 2, n):
                S = build_S_chi(chi, r)
                record = classify(S.structure)
                if not record["is_interval"]:
                    ok = False
                    continue
                dim = interval_dimension(S, r, intervals=record["intervals"])
                rng = random.Random(checked)
                for _ in range(5):
                    cfg = random_interval_config(
                        S.structure, r, 10007, rng, intervals=record["intervals"]
                    )
                    if tangent_dimension(cfg) != dim:
                        ok = False
                checked += 1
    _report(capsys, 5, f"plane tangents match dimension ({checked} functions)", ok, t0,
            budget=300)


def test_criterion_6_singular_fixture(capsys):
    t0 = time.time()
    chi = crossed_lines_charfn(3)
    S = build_S_chi(chi, 3).structure
    ok = equivalent(S, k22_structure())
    ok = ok and coordinate_fixed_points(S, 3) == 18
    ok = ok and count_points_Fq(S, 3, 2) == 105

    e1, e2, e3 = [1, 0, 0], [0, 1, 0], [0, 0, 1]

    def config(points, lines):
        spaces = {
            (1, 0): ExactMatrix("Q", [points[0]]),
            (1, 1): ExactMatrix("Q", [points[1]]),
            (2, 0): ExactMatrix("Q", lines[0]),
            (2, 1): ExactMatrix("Q", lines[1]),
        }
        return SubspaceConfig(k22_structure(), "Q", spaces)

    # the chart at full coincidence is a product of a node with a 3-space:
    # tangent 5 there, 4 once the points (or lines) separate
    ok = ok and tangent_dimension(config([e1, e1], [[e1, e2], [e1, e2]])) == 5
    ok = ok and tangent_dimension(config([e1, e1], [[e1, e2], [e1, e3]])) == 4

    verdict = smooth_verdict(chi, 3, seed=0)
    ok = ok and verdict["verdict"] == "SingularWitness"
    _report(capsys, 6, "singular witness at the crossing", ok, t0, budget=30)


def test_criterion_7_round_trips(capsys, realization_corpus):
    t0 = time.time()
    ok = True
    for r in (1, 2, 3):
        for d in (1, 2, 3):
            for n in range(7):
                for chi in enumerate_charfns(r, d, n):
                    got = intersection_structure(chi_to_regions(chi, r))
                    want = build_S_chi(chi, r).structure
                    if not equivalent(got, want):
                        ok = False
    projection_elapsed = time.time() - t0
    ok = ok and all(rec["round_trip_ok"] for rec in realization_corpus["records"])
    total = projection_elapsed + realization_corpus["elapsed"]
    n_classes = len(realization_corpus["records"])
    status = "PASS" if ok and total < 600 else "FAIL"
    with capsys.disabled():
        print(
            f"criterion 7 [structure round trips, {n_classes} graph classes]: "
            f"{status} ({total:.1f}s / 600s)"
        )
    assert ok
    assert total < 600


def test_criterion_8_lift_properties(capsys, realization_corpus):
    t0 = time.time()
    ok = all(
        all(rec["properties"].values()) for rec in realization_corpus["records"]
    )
    _report(capsys, 8, "lift construction properties", ok, t0)


def test_criterion_9_interpolation(capsys):
    t0 = time.time()
    S = staircase_structure()
    pts = [(q, count_points_Fq(S, 3, q)) for q in (2, 3, 5, 7, 11, 13)]
    degree = lagrange_degree(pts)
    at_one = lagrange_eval(pts, 1)
    ok = degree == 5 and at_one == 24 == coordinate_fixed_points(S, 3)
    _report(capsys, 9, "point counts interpolate to the fixed-point count", ok, t0,
            budget=60)
