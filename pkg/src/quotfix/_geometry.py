"""Exact rational geometry for the realization pipeline.

Everything here works over Fraction: segment distances, the grid pitch
selection, and rasterization of segments onto integer grids. Floating point
never decides a predicate.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

import numpy as np

from ._backend import supercover


def moment_point(t: int, m: int) -> tuple[int, ...]:
    """Point (t, t^2, ..., t^m) on the moment curve."""
    return tuple(t**k for k in range(1, m + 1))


def _dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _sub(u, v) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def _norm_sq(u) -> Fraction:
    return _dot(u, u)


def point_seg_min_sq(p, a, b) -> Fraction:
    """Squared distance from point p to closed segment [a, b]."""
    d = _sub(b, a)
    den = _norm_sq(d)
    w = _sub(p, a)
    if den == 0:
        return _norm_sq(w)
    t = _dot(w, d) / den
    if t < 0:
        t = Fraction(0)
    elif t > 1:
        t = Fraction(1)
    closest = tuple(wi - t * di for wi, di in zip(w, d))
    return _norm_sq(closest)


def seg_seg_min_sq(a0, a1, b0, b1) -> Fraction:
    """Squared distance between closed segments [a0,a1] and [b0,b1]."""
    u = _sub(a1, a0)
    v = _sub(b1, b0)
    w0 = _sub(a0, b0)
    A = _norm_sq(u)
    B = _dot(u, v)
    C = _norm_sq(v)
    D = _dot(u, w0)
    E = _dot(v, w0)
    best = min(
        point_seg_min_sq(a0, b0, b1),
        point_seg_min_sq(a1, b0, b1),
        point_seg_min_sq(b0, a0, a1),
        point_seg_min_sq(b1, a0, a1),
    )
    denom = A * C - B * B
    if denom > 0:
        s = (B * E - C * D) / denom
        t = (A * E - B * D) / denom
        if 0 <= s <= 1 and 0 <= t <= 1:
            diff = tuple(
                w0i + s * ui - t * vi for w0i, ui, vi in zip(w0, u, v)
            )
            best = min(best, _norm_sq(diff))
    return best


def ceil_sqrt(n: int) -> int:
    """Smallest integer whose square is >= n."""
    if n <= 0:
        return 0
    k = isqrt(n)
    return k if k * k == n else k + 1


def grid_pitch(min_sq: Fraction, r: int, d: int) -> Fraction:
    """Largest pitch 2^-k with pitch * (4(r-1) + ceil(sqrt(d))) <= sqrt(min_sq).

    Compared exactly via squares. Returns 1 when min_sq places no constraint
    (callers pass None/inf by passing min_sq=None).
    """
    if min_sq is None:
        return Fraction(1)
    if min_sq <= 0:
        raise ValueError("separation distance must be positive")
    bound = 4 * (r - 1) + ceil_sqrt(d)
    delta = Fraction(1)
    while delta * delta * bound * bound > min_sq:
        delta /= 2
    return delta


def rasterize_segments(segments, pitch: Fraction) -> list[tuple[int, ...]]:
    """Grid cells of pitch ``pitch`` meeting any of the closed segments.

    Segment endpoints must be rational points whose denominators divide 2
    after division by the pitch (true for the moment-curve construction).
    Cells are closed boxes [k*pitch, (k+1)*pitch]^m; a segment touching only
    a box boundary still claims the box.
    """
    cells = set()
    inv = 1 / pitch
    for a, b in segments:
        anum, bnum = [], []
        for coord in a:
            q = coord * inv * 2
            if q.denominator != 1:
                raise ValueError(f"endpoint coordinate {coord} not exact at pitch {pitch}")
            anum.append(int(q))
        for coord in b:
            q = coord * inv * 2
            if q.denominator != 1:
                raise ValueError(f"endpoint coordinate {coord} not exact at pitch {pitch}")
            bnum.append(int(q))
        got = supercover(
            np.array(anum, dtype=np.int64), np.array(bnum, dtype=np.int64), 2
        )
        for row in got:
            cells.add(tuple(int(x) for x in row))
    return sorted(cells)


def rasterize_interval(lo: Fraction, hi: Fraction, pitch: Fraction) -> list[tuple[int]]:
    """1-d cells [k*pitch, (k+1)*pitch] meeting the closed interval [lo, hi]."""
    if lo > hi:
        raise ValueError("empty interval")
    lo_scaled = lo / pitch
    hi_scaled = hi / pitch
    kmin = -((-lo_scaled.numerator) // lo_scaled.denominator) - 1  # ceil - 1
    kmax = hi_scaled.numerator // hi_scaled.denominator  # floor
    kmin = max(kmin, 0)
    return [(k,) for k in range(kmin, kmax + 1)]
