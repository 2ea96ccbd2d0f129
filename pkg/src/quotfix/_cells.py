"""Lattice-point helpers: tuple-based utilities and a packed int64 encoding.

Points of Z_{>=0}^d are either plain tuples of ints (small, exact, hashable)
or, on the fast paths, int64 scalars packing the coordinates bitwise. The
packing puts coordinate 0 in the highest bits, so the numeric order of packed
values equals the lexicographic order of tuples.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import ResourceLimitError

# Default bit layout: d-1 leading coordinates at 15 bits, the last one at 18.
# 3*15 + 18 = 63 bits, so any d <= 4 point fits a signed int64. Instances with
# larger extents get a custom layout sized from their actual coordinate maxima.
COORD_BITS = 15
LAST_BITS = 18
MAX_PACK_DIM = 4
PACK_BIT_BUDGET = 63


class PackLayout:
    """Bitwise layout for packing d nonnegative coordinates into an int64.

    Coordinate 0 occupies the highest bits, so numeric order of packed values
    equals lexicographic order of tuples for any choice of widths. Every
    width leaves one unit of headroom so that adding a unit step to an
    in-range point never carries across fields.
    """

    __slots__ = ("dim", "widths", "shifts")

    def __init__(self, dim: int, widths):
        widths = tuple(int(w) for w in widths)
        if dim < 1 or len(widths) != dim or any(w < 1 for w in widths):
            raise ResourceLimitError(f"bad pack widths {widths} for dim {dim}")
        if sum(widths) > PACK_BIT_BUDGET:
            raise ResourceLimitError(
                f"pack widths {widths} need {sum(widths)} bits, budget is {PACK_BIT_BUDGET}"
            )
        shifts = []
        acc = 0
        for w in reversed(widths):
            shifts.append(acc)
            acc += w
        shifts.reverse()
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "shifts", tuple(shifts))

    def __setattr__(self, name, value):
        raise AttributeError("PackLayout is immutable")

    @classmethod
    def default(cls, d: int) -> "PackLayout":
        if d < 1 or d > MAX_PACK_DIM:
            raise ResourceLimitError(
                f"packed encoding supports 1 <= d <= {MAX_PACK_DIM}, got {d}"
            )
        return cls(d, [COORD_BITS] * (d - 1) + [LAST_BITS])

    @classmethod
    def for_extents(cls, maxima) -> "PackLayout":
        """Smallest layout holding coordinates up to the given maxima, plus
        one unit of arithmetic headroom per axis."""
        widths = [max(int(m) + 1, 1).bit_length() for m in maxima]
        return cls(len(widths), widths)

    def limits(self) -> list[int]:
        return [1 << w for w in self.widths]

    def steps(self) -> np.ndarray:
        """Packed increments for the unit vectors e_0 .. e_{d-1}."""
        return np.array([1 << s for s in self.shifts], dtype=np.int64)

    def pack_point(self, point) -> int:
        acc = 0
        for c, s, w in zip(point, self.shifts, self.widths):
            if c < 0 or c >= (1 << w):
                raise ResourceLimitError(
                    f"coordinate {c} out of packed range [0, {1 << w})"
                )
            acc |= int(c) << s
        return acc

    def unpack_point(self, packed: int) -> tuple[int, ...]:
        return tuple(
            (int(packed) >> s) & ((1 << w) - 1)
            for s, w in zip(self.shifts, self.widths)
        )

    def pack_array(self, points: np.ndarray) -> np.ndarray:
        points = np.ascontiguousarray(points, dtype=np.int64)
        if points.ndim != 2 or points.shape[1] != self.dim:
            raise ValueError(f"expected an (n, {self.dim}) array")
        for j, w in enumerate(self.widths):
            col = points[:, j]
            if col.size and (col.min() < 0 or col.max() >= (1 << w)):
                raise ResourceLimitError(
                    f"coordinate {j} out of packed range [0, {1 << w})"
                )
        acc = np.zeros(points.shape[0], dtype=np.int64)
        for j, s in enumerate(self.shifts):
            acc |= points[:, j] << np.int64(s)
        return acc

    def unpack_array(self, packed: np.ndarray) -> np.ndarray:
        packed = np.asarray(packed, dtype=np.int64)
        out = np.empty((packed.shape[0], self.dim), dtype=np.int64)
        for j, (s, w) in enumerate(zip(self.shifts, self.widths)):
            out[:, j] = (packed >> np.int64(s)) & np.int64((1 << w) - 1)
        return out

    def coord_sums(self, packed: np.ndarray) -> np.ndarray:
        return self.unpack_array(packed).sum(axis=1)

    def __eq__(self, other) -> bool:
        return isinstance(other, PackLayout) and self.widths == other.widths

    def __hash__(self) -> int:
        return hash(self.widths)

    def __repr__(self) -> str:
        return f"PackLayout({self.widths})"


def unit_steps(d: int) -> np.ndarray:
    return PackLayout.default(d).steps()


def pack_point(point: tuple[int, ...]) -> int:
    return PackLayout.default(len(point)).pack_point(point)


def unpack_point(packed: int, d: int) -> tuple[int, ...]:
    return PackLayout.default(d).unpack_point(packed)


def pack_array(points: np.ndarray, d: int) -> np.ndarray:
    return PackLayout.default(d).pack_array(points)


def unpack_array(packed: np.ndarray, d: int) -> np.ndarray:
    return PackLayout.default(d).unpack_array(packed)


def coord_sums(packed: np.ndarray, d: int) -> np.ndarray:
    return PackLayout.default(d).coord_sums(packed)


def orthogonal_neighbors(point: tuple[int, ...]) -> list[tuple[int, ...]]:
    """All lattice points at distance one unit step (both directions)."""
    out = []
    for i, c in enumerate(point):
        up = list(point)
        up[i] = c + 1
        out.append(tuple(up))
        if c > 0:
            down = list(point)
            down[i] = c - 1
            out.append(tuple(down))
    return out


def orthogonal_components(cells: Iterable[tuple[int, ...]]) -> list[frozenset]:
    """Connected components under unit-step adjacency.

    Returned in deterministic order: sorted by the lexicographically minimal
    member of each component.
    """
    remaining = set(cells)
    comps = []
    while remaining:
        seed = min(remaining)
        stack = [seed]
        remaining.discard(seed)
        comp = {seed}
        while stack:
            cur = stack.pop()
            for nb in orthogonal_neighbors(cur):
                if nb in remaining:
                    remaining.discard(nb)
                    comp.add(nb)
                    stack.append(nb)
        comps.append(frozenset(comp))
    comps.sort(key=min)
    return comps


class CellSet:
    """Immutable finite set of lattice points.

    Backed by a sorted packed array (with its layout) when extents allow, by
    a sorted tuple of tuples otherwise. Iteration is lexicographic either way.
    """

    __slots__ = ("dim", "layout", "_packed", "_points")

    def __init__(self, dim: int, layout=None, packed=None, points=None):
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "_packed", packed)
        object.__setattr__(self, "_points", points)

    def __setattr__(self, name, value):
        raise AttributeError("CellSet is immutable")

    @classmethod
    def from_points(cls, dim: int, points: Iterable[tuple[int, ...]], layout=None) -> "CellSet":
        pts = tuple(sorted(set(tuple(p) for p in points)))
        if layout is None and dim <= MAX_PACK_DIM:
            layout = PackLayout.default(dim)
            if pts and any(
                c >= m for p in pts for c, m in zip(p, layout.limits())
            ):
                try:
                    layout = PackLayout.for_extents([max(p[j] for p in pts) for j in range(dim)])
                except ResourceLimitError:
                    layout = None
        if layout is not None:
            try:
                arr = np.array(pts, dtype=np.int64).reshape(len(pts), dim)
                return cls(dim, layout=layout, packed=layout.pack_array(arr))
            except ResourceLimitError:
                pass
        return cls(dim, points=pts)

    @classmethod
    def from_packed(cls, dim: int, packed: np.ndarray, layout=None) -> "CellSet":
        packed = np.asarray(packed, dtype=np.int64)
        if layout is None:
            layout = PackLayout.default(dim)
        return cls(dim, layout=layout, packed=packed)

    def __len__(self) -> int:
        return int(self._packed.size) if self._packed is not None else len(self._points)

    def __iter__(self):
        if self._packed is not None:
            for row in self.layout.unpack_array(self._packed):
                yield tuple(int(x) for x in row)
        else:
            yield from self._points

    def __contains__(self, point) -> bool:
        point = tuple(point)
        if self._packed is not None:
            try:
                packed = self.layout.pack_point(point)
            except ResourceLimitError:
                return False
            i = int(np.searchsorted(self._packed, packed))
            return i < self._packed.size and int(self._packed[i]) == packed
        return point in self._points

    def min_point(self) -> tuple[int, ...]:
        if self._packed is not None:
            return self.layout.unpack_point(int(self._packed[0]))
        return self._points[0]

    def to_array(self) -> np.ndarray:
        if self._packed is not None:
            return self.layout.unpack_array(self._packed)
        return np.array(self._points, dtype=np.int64).reshape(len(self._points), self.dim)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CellSet) or self.dim != other.dim or len(self) != len(other):
            return False
        if (
            self._packed is not None
            and other._packed is not None
            and self.layout == other.layout
        ):
            return bool(np.array_equal(self._packed, other._packed))
        return list(self) == list(other)

    def __hash__(self) -> int:
        return hash((self.dim, len(self)))

    def __repr__(self) -> str:
        return f"CellSet(dim={self.dim}, size={len(self)})"


def is_order_ideal(cells: Iterable[tuple[int, ...]]) -> bool:
    """True iff the set is downward closed under coordinatewise <=."""
    cells = set(cells)
    for point in cells:
        for i, c in enumerate(point):
            if c > 0:
                down = list(point)
                down[i] = c - 1
                if tuple(down) not in cells:
                    return False
    return True
