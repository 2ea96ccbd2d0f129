"""Characteristic functions: finitely supported monotone maps Z_{>=0}^d -> {0..r}.

A function chi is stored either explicitly (CharFn: a dict of nonzero values)
or in a padded form (PaddedCharFn: constant value r on a truncated simplex
with an explicit override map). The padded form exists because the realization
pipeline produces functions whose support is a whole simplex with billions of
cells; only the cells where the value drops below r are interesting.

The canonical encoding used for enumeration is a chain of nested order ideals
lambda_1 >= lambda_2 >= ... >= lambda_r with chi(a) = #{i : a in lambda_i}.
"""

from __future__ import annotations

import itertools
from math import comb
from typing import Iterator

import numpy as np

from . import _cells
from ._backend import label_components, merge_indices
from .errors import ResourceLimitError, ValidationError

DEFAULT_ENUM_CAP = 10**6
DEFAULT_MATERIALIZE_CAP = 10**6


def _check_point(point, dim: int) -> tuple[int, ...]:
    if not isinstance(point, tuple) or len(point) != dim:
        raise ValidationError(f"point {point!r} is not a {dim}-tuple")
    for c in point:
        if not isinstance(c, int) or isinstance(c, bool) or c < 0:
            raise ValidationError(f"bad coordinate in {point!r}")
    return point


class CharFn:
    """Explicit characteristic function: dict from lattice points to values >= 1.

    Structural well-formedness (finite map, nonnegative integer points,
    positive values) is enforced here; the mathematical membership conditions
    are checked by validate().
    """

    __slots__ = ("dim", "entries", "_key")

    def __init__(self, dim: int, entries: dict):
        if not isinstance(dim, int) or dim < 1:
            raise ValidationError(f"dim must be a positive integer, got {dim!r}")
        clean = {}
        for point, value in entries.items():
            point = _check_point(tuple(point), dim)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValidationError(f"value at {point!r} must be a positive integer")
            clean[point] = value
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "entries", clean)
        object.__setattr__(self, "_key", tuple(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("CharFn is immutable")

    def value(self, point) -> int:
        return self.entries.get(tuple(point), 0)

    def support(self) -> frozenset:
        return frozenset(self.entries)

    def weight(self) -> int:
        return sum(self.entries.values())

    def max_value(self) -> int:
        return max(self.entries.values(), default=0)

    def sort_key(self):
        return self._key

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CharFn)
            and self.dim == other.dim
            and self._key == other._key
        )

    def __hash__(self) -> int:
        return hash((self.dim, self._key))

    def __repr__(self) -> str:
        return f"CharFn(dim={self.dim}, entries={dict(self._key)!r})"


class PaddedCharFn:
    """Characteristic function equal to ``rank`` on a truncated simplex.

    value(a) = 0                 if sum(a) >= cutoff,
               overrides[a]      if a is an override cell (values in 1..rank-1),
               rank              otherwise.

    Overrides are kept as a sorted packed int64 array. Monotonicity forces the
    override region to be upward closed inside the simplex; validate() checks
    exactly that.
    """

    __slots__ = ("dim", "rank", "cutoff", "layout", "_cells", "_vals")

    def __init__(self, dim: int, rank: int, cutoff: int, cells: np.ndarray, vals: np.ndarray, layout=None):
        if dim < 1 or rank < 1 or cutoff < 0:
            raise ValidationError("dim and rank must be >= 1, cutoff >= 0")
        if layout is None:
            layout = _cells.PackLayout.default(dim)
        cells = np.asarray(cells, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.int64)
        if cells.shape != vals.shape or cells.ndim != 1:
            raise ValidationError("cells and vals must be parallel 1-d arrays")
        if cells.size:
            if np.any(np.diff(cells) <= 0):
                raise ValidationError("override cells must be sorted and unique")
            if vals.min() < 1 or vals.max() >= rank:
                raise ValidationError("override values must lie in 1..rank-1")
            # extract one coordinate at a time; a full (n, d) matrix is big here
            sums = np.zeros(cells.size, dtype=np.int64)
            for j, m in enumerate(layout.limits()):
                col = (cells >> layout.shifts[j]) & (m - 1)
                # neighbor arithmetic must stay inside the packed fields
                if int(col.max()) + 1 >= m:
                    raise ResourceLimitError("override coordinates too large for packing")
                sums += col
            if int(sums.max()) >= cutoff:
                raise ValidationError("override cells must lie inside the simplex")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "cutoff", cutoff)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "_cells", cells)
        object.__setattr__(self, "_vals", vals)

    def __setattr__(self, name, value):
        raise AttributeError("PaddedCharFn is immutable")

    @classmethod
    def from_overrides(cls, dim: int, rank: int, cutoff: int, overrides: dict) -> "PaddedCharFn":
        pts = [_check_point(tuple(p), dim) for p in overrides]
        layout = None
        if pts:
            try:
                layout = _cells.PackLayout.default(dim)
                if any(c >= m for p in pts for c, m in zip(p, layout.limits())):
                    layout = _cells.PackLayout.for_extents(
                        [max(p[j] for p in pts) for j in range(dim)]
                    )
            except ResourceLimitError:
                layout = _cells.PackLayout.default(dim)  # let the constructor report
        items = sorted(
            (
                (_cells.PackLayout.default(dim) if layout is None else layout).pack_point(
                    _check_point(tuple(p), dim)
                ),
                int(v),
            )
            for p, v in overrides.items()
        )
        cells = np.array([c for c, _ in items], dtype=np.int64)
        vals = np.array([v for _, v in items], dtype=np.int64)
        return cls(dim, rank, cutoff, cells, vals, layout=layout)

    @property
    def override_count(self) -> int:
        return int(self._cells.size)

    def simplex_size(self) -> int:
        # cells of Z_{>=0}^dim with coordinate sum < cutoff
        if self.cutoff == 0:
            return 0
        return comb(self.cutoff - 1 + self.dim, self.dim)

    def value(self, point) -> int:
        point = _check_point(tuple(point), self.dim)
        if sum(point) >= self.cutoff:
            return 0
        try:
            packed = self.layout.pack_point(point)
        except ResourceLimitError:
            return self.rank
        i = int(np.searchsorted(self._cells, packed))
        if i < self._cells.size and int(self._cells[i]) == packed:
            return int(self._vals[i])
        return self.rank

    def weight(self) -> int:
        deficit = int(np.sum(self.rank - self._vals)) if self._vals.size else 0
        return self.rank * self.simplex_size() - deficit

    def max_value(self) -> int:
        return self.rank if self.simplex_size() else 0

    def level_cells(self, v: int) -> np.ndarray:
        """Packed cells with value v, for 1 <= v < rank."""
        return self._cells[self._vals == v]

    def override_points(self) -> Iterator[tuple[tuple[int, ...], int]]:
        pts = self.layout.unpack_array(self._cells)
        for row, v in zip(pts, self._vals):
            yield tuple(int(x) for x in row), int(v)

    def to_charfn(self, cap: int = DEFAULT_MATERIALIZE_CAP) -> CharFn:
        """Materialize as an explicit CharFn; raises above the cell cap."""
        if self.simplex_size() > cap:
            raise ResourceLimitError(
                f"materializing {self.simplex_size()} cells exceeds cap {cap}"
            )
        over = dict(self.override_points())
        entries = {}
        for point in _simplex_points(self.dim, self.cutoff):
            entries[point] = over.get(point, self.rank)
        return CharFn(self.dim, entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PaddedCharFn):
            return False
        if (self.dim, self.rank, self.cutoff) != (other.dim, other.rank, other.cutoff):
            return False
        if not np.array_equal(self._vals, other._vals):
            return False
        if self.layout == other.layout:
            return bool(np.array_equal(self._cells, other._cells))
        return bool(
            np.array_equal(
                self.layout.unpack_array(self._cells),
                other.layout.unpack_array(other._cells),
            )
        )

    def __hash__(self) -> int:
        return hash((self.dim, self.rank, self.cutoff, self.override_count))

    def __repr__(self) -> str:
        return (
            f"PaddedCharFn(dim={self.dim}, rank={self.rank}, cutoff={self.cutoff}, "
            f"overrides={self.override_count})"
        )


def _simplex_points(dim: int, cutoff: int) -> Iterator[tuple[int, ...]]:
    """All points of Z_{>=0}^dim with coordinate sum < cutoff, lex order."""
    if cutoff <= 0:
        return
    point = [0] * dim

    def rec(j: int, budget: int):
        if j == dim - 1:
            for c in range(budget + 1):
                point[j] = c
                yield tuple(point)
            return
        for c in range(budget + 1):
            point[j] = c
            yield from rec(j + 1, budget - c)

    yield from rec(0, cutoff - 1)


def validate(chi, r: int) -> bool:
    """Membership test: values bounded by r, finite weight, monotone.

    Total function: returns False instead of raising for functions that are
    structurally fine but fail a condition.
    """
    if not isinstance(r, int) or r < 0:
        raise ValidationError(f"r must be a nonnegative integer, got {r!r}")
    if isinstance(chi, PaddedCharFn):
        return _validate_padded(chi, r)
    if chi.max_value() > r:
        return False
    entries = chi.entries
    for point, value in entries.items():
        for i, c in enumerate(point):
            if c > 0:
                down = point[:i] + (c - 1,) + point[i + 1 :]
                if entries.get(down, 0) < value:
                    return False
    return True


def _validate_padded(chi: PaddedCharFn, r: int) -> bool:
    if chi.simplex_size() > 0 and chi.rank > r:
        return False
    cells, vals = chi._cells, chi._vals
    if cells.size == 0:
        return True
    sums = chi.layout.coord_sums(cells)
    inside = sums + 1 < chi.cutoff
    for step in chi.layout.steps():
        nb = cells + step
        idx = merge_indices(cells, nb)
        # an up-neighbor inside the simplex must be an override cell ...
        if np.any(inside & (idx < 0)):
            return False
        at = np.flatnonzero(inside)
        # ... with a value that does not exceed ours
        if np.any(vals[idx[at]] > vals[at]):
            return False
    return True


def weight(chi) -> int:
    """Total weight: the sum of all values."""
    return chi.weight()


def _ideal_extensions(ideal: list, ideal_set: set, last, dim: int, universe) -> Iterator[tuple]:
    """Addable cells strictly lex-greater than ``last``.

    A cell is addable when all its lower covers are present; restricting to
    cells greater than the previously added one generates every ideal exactly
    once (lex prefixes of an ideal are ideals).
    """
    if not ideal:
        origin = (0,) * dim
        if universe is None or origin in universe:
            yield origin
        return
    seen = set()
    for a in ideal:
        for i in range(dim):
            cand = a[:i] + (a[i] + 1,) + a[i + 1 :]
            if cand in seen or cand in ideal_set:
                continue
            seen.add(cand)
            if last is not None and cand <= last:
                continue
            if universe is not None and cand not in universe:
                continue
            ok = True
            for j in range(dim):
                if cand[j] > 0:
                    down = cand[:j] + (cand[j] - 1,) + cand[j + 1 :]
                    if down not in ideal_set:
                        ok = False
                        break
            if ok:
                yield cand


def _ideals_of_size(size: int, dim: int, universe=None) -> Iterator[frozenset]:
    """Order ideals of the given size, inside ``universe`` when given."""
    ideal: list = []
    ideal_set: set = set()

    def rec(last) -> Iterator[frozenset]:
        if len(ideal) == size:
            yield frozenset(ideal_set)
            return
        for cand in sorted(_ideal_extensions(ideal, ideal_set, last, dim, universe)):
            ideal.append(cand)
            ideal_set.add(cand)
            yield from rec(cand)
            ideal.pop()
            ideal_set.discard(cand)

    yield from rec(None)


def _partitions_at_most(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Weakly decreasing tuples of ``parts`` nonnegative ints summing to n."""

    def rec(remaining: int, k: int, bound: int):
        if k == 0:
            if remaining == 0:
                yield ()
            return
        top = min(bound, remaining)
        lo = -(-remaining // k)  # ceil: later parts cannot make up more
        for first in range(top, lo - 1, -1):
            for rest in rec(remaining - first, k - 1, first):
                yield (first,) + rest

    yield from rec(n, parts, n)


def enumerate_charfns(r: int, d: int, n: int, cap: int = DEFAULT_ENUM_CAP) -> list[CharFn]:
    """All characteristic functions with bound r, dimension d, weight n.

    Returned in the canonical order (lexicographic on the sorted entry list).
    Raises ResourceLimitError if more than ``cap`` results would be produced.
    """
    if r < 1 or d < 1 or n < 0:
        raise ValidationError("need r >= 1, d >= 1, n >= 0")
    out = []
    for sizes in _partitions_at_most(n, r):
        for chain in _nested_chains(sizes, d):
            counts: dict = {}
            for ideal in chain:
                for point in ideal:
                    counts[point] = counts.get(point, 0) + 1
            out.append(CharFn(d, counts))
            if len(out) > cap:
                raise ResourceLimitError(f"enumeration exceeded cap {cap}")
    out.sort(key=CharFn.sort_key)
    return out


def _nested_chains(sizes: tuple[int, ...], d: int) -> Iterator[list[frozenset]]:
    def rec(i: int, prev) -> Iterator[list[frozenset]]:
        if i == len(sizes) or sizes[i] == 0:
            yield []
            return
        for ideal in _ideals_of_size(sizes[i], d, universe=prev):
            for rest in rec(i + 1, ideal):
                yield [ideal] + rest

    yield from rec(0, None)


class NestedIdeals:
    """Chain of nested order ideals lambda_1 >= ... >= lambda_rank."""

    __slots__ = ("rank", "ideals")

    def __init__(self, rank: int, ideals):
        if not isinstance(rank, int) or rank < 1:
            raise ValidationError("rank must be a positive integer")
        ideals = tuple(frozenset(tuple(p) for p in ideal) for ideal in ideals)
        if len(ideals) != rank:
            raise ValidationError(f"expected {rank} ideals, got {len(ideals)}")
        for ideal in ideals:
            if not _cells.is_order_ideal(ideal):
                raise ValidationError("each level set must be downward closed")
        for upper, lower in zip(ideals, ideals[1:]):
            if not lower <= upper:
                raise ValidationError("ideals must be nested")
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "ideals", ideals)

    def __setattr__(self, name, value):
        raise AttributeError("NestedIdeals is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NestedIdeals)
            and self.rank == other.rank
            and self.ideals == other.ideals
        )

    def __hash__(self) -> int:
        return hash((self.rank, tuple(frozenset(i) for i in self.ideals)))


def to_nested(chi: CharFn, r: int) -> NestedIdeals:
    """Level-set encoding lambda_i = {a : chi(a) >= i}."""
    if not validate(chi, r):
        raise ValidationError("not a valid characteristic function for this r")
    ideals = [
        frozenset(p for p, v in chi.entries.items() if v >= i) for i in range(1, r + 1)
    ]
    return NestedIdeals(r, ideals)


def from_nested(ni: NestedIdeals) -> CharFn:
    """Inverse of to_nested: chi(a) = #{i : a in lambda_i}."""
    counts: dict = {}
    dim = None
    for ideal in ni.ideals:
        for point in ideal:
            dim = len(point)
            counts[point] = counts.get(point, 0) + 1
    if dim is None:
        dim = 1  # zero function; dimension is immaterial
    return CharFn(dim, counts)


def level_components(chi, r: int, cap: int = DEFAULT_MATERIALIZE_CAP) -> dict:
    """Connected components of each level set chi^{-1}(v), v = 1..r.

    Components are frozensets of points, listed by lexicographically minimal
    element. Unit-step adjacency only; diagonal neighbors never connect.
    """
    if not validate(chi, r):
        raise ValidationError("not a valid characteristic function for this r")
    if isinstance(chi, PaddedCharFn):
        return _level_components_padded(chi, r, cap)
    by_value: dict = {v: [] for v in range(1, r + 1)}
    for point, value in chi.entries.items():
        by_value[value].append(point)
    return {v: _cells.orthogonal_components(pts) for v, pts in by_value.items()}


def _level_components_padded(chi: PaddedCharFn, r: int, cap: int) -> dict:
    if chi.override_count > cap or chi.simplex_size() > cap:
        raise ResourceLimitError("padded function too large to materialize components")
    out = {v: [] for v in range(1, r + 1)}
    over = dict(chi.override_points())
    by_value: dict = {}
    for point, v in over.items():
        by_value.setdefault(v, []).append(point)
    for v, pts in by_value.items():
        out[v] = _cells.orthogonal_components(pts)
    top = [p for p in _simplex_points(chi.dim, chi.cutoff) if p not in over]
    out[chi.rank] = _cells.orthogonal_components(top)
    return out


# ---------------------------------------------------------------------------
# JSON forms


def charfn_to_json(chi) -> dict:
    if isinstance(chi, PaddedCharFn):
        return {
            "kind": "padded",
            "d": chi.dim,
            "rank": chi.rank,
            "cutoff": chi.cutoff,
            "overrides": [
                {"point": list(p), "value": v} for p, v in chi.override_points()
            ],
        }
    return {
        "d": chi.dim,
        "entries": [
            {"point": list(p), "value": v} for p, v in sorted(chi.entries.items())
        ],
    }


def charfn_from_json(obj: dict):
    if not isinstance(obj, dict):
        raise ValidationError("expected a JSON object")
    if obj.get("kind") == "padded":
        try:
            overrides = {
                tuple(e["point"]): e["value"] for e in obj.get("overrides", [])
            }
            return PaddedCharFn.from_overrides(
                obj["d"], obj["rank"], obj["cutoff"], overrides
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed padded function: {exc}") from exc
    try:
        entries = {tuple(e["point"]): e["value"] for e in obj.get("entries", [])}
        return CharFn(obj["d"], entries)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed characteristic function: {exc}") from exc


def nested_to_json(ni: NestedIdeals) -> dict:
    return {
        "rank": ni.rank,
        "ideals": [[list(p) for p in sorted(ideal)] for ideal in ni.ideals],
    }


def nested_from_json(obj: dict) -> NestedIdeals:
    try:
        return NestedIdeals(obj["rank"], obj["ideals"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed nested ideals: {exc}") from exc
