"""Exact dense linear algebra over Q and prime fields F_p.

Everything here is deterministic and overflow-free: rationals use
fractions.Fraction, prime fields use Python ints reduced to [0, p). The
only performance-sensitive entry point is rank computation over F_p, which
dispatches to the compiled backend for matrices that are large enough to
benefit.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from ._backend import gfp_rref
from .errors import ValidationError

Field = object  # "Q" or an int prime p


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def check_field(field) -> None:
    if field == "Q":
        return
    if isinstance(field, int) and _is_prime(field):
        return
    raise ValidationError(f"field must be 'Q' or a prime, got {field!r}")


def _coerce(field, x):
    if field == "Q":
        return Fraction(x)
    return int(x) % field


class ExactMatrix:
    """Immutable dense matrix over Q or F_p.

    Args:
        field: "Q" for rationals, or a prime p for F_p.
        rows: iterable of iterables of entries; coerced into the field.
    """

    __slots__ = ("field", "rows", "ncols")

    def __init__(self, field, rows: Iterable[Iterable]):
        check_field(field)
        coerced = tuple(tuple(_coerce(field, x) for x in row) for row in rows)
        widths = {len(r) for r in coerced}
        if len(widths) > 1:
            raise ValidationError("ragged rows")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", coerced)
        object.__setattr__(self, "ncols", widths.pop() if widths else 0)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExactMatrix)
            and self.field == other.field
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.field, self.rows))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.field!r}, {self.rows!r})"

    @classmethod
    def identity(cls, field, n: int) -> "ExactMatrix":
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def stack(self, other: "ExactMatrix") -> "ExactMatrix":
        """Vertical concatenation; fields and widths must agree."""
        if self.field != other.field:
            raise ValidationError("field mismatch in stack")
        if self.nrows and other.nrows and self.ncols != other.ncols:
            raise ValidationError("width mismatch in stack")
        out = ExactMatrix(self.field, ())
        object.__setattr__(out, "rows", self.rows + other.rows)
        object.__setattr__(out, "ncols", self.ncols or other.ncols)
        return out

    def rref(self) -> tuple["ExactMatrix", tuple[int, ...]]:
        """Reduced row echelon form.

        Returns:
            (matrix in RREF with zero rows dropped, pivot column indices).
        """
        rows, pivots = _rref_rows(self.field, [list(r) for r in self.rows], self.ncols)
        out = ExactMatrix(self.field, ())
        object.__setattr__(out, "rows", tuple(tuple(r) for r in rows))
        object.__setattr__(out, "ncols", self.ncols)
        return out, tuple(pivots)

    def rank(self) -> int:
        if isinstance(self.field, int) and self.nrows * self.ncols >= 512:
            arr = np.array(self.rows, dtype=np.int64)
            return int(gfp_rref(arr, self.field))
        return len(self.rref()[1])

    def row_space(self) -> "ExactMatrix":
        """Canonical basis of the row space (RREF rows)."""
        return self.rref()[0]


def _rref_rows(field, rows: list[list], ncols: int) -> tuple[list[list], list[int]]:
    if field == "Q":
        inv = lambda x: Fraction(1) / x
        sub = lambda x, y: x - y
        mul = lambda x, y: x * y
    else:
        p = field
        inv = lambda x: pow(x, p - 2, p)
        sub = lambda x, y: (x - y) % p
        mul = lambda x, y: (x * y) % p
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        f = inv(rows[r][c])
        rows[r] = [mul(f, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                g = rows[i][c]
                rows[i] = [sub(x, mul(g, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """The q-binomial coefficient [n choose k]_q as an exact integer."""
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (q ** (n - i) - 1) // (q ** (i + 1) - 1)
    return out


def _rref_canonical(p: int, rows: Sequence[Sequence[int]], ncols: int) -> tuple[tuple[int, ...], ...]:
    red, _ = _rref_rows(p, [list(r) for r in rows], ncols)
    return tuple(tuple(r) for r in red)


def subspaces_containing(
    p: int, ambient: int, dim: int, base: Sequence[Sequence[int]] = ()
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All dim-dimensional subspaces of F_p^ambient containing the base.

    The base must be given as RREF rows (possibly empty). Yields each
    subspace exactly once as canonical RREF row tuples. The count equals
    gaussian_binomial(ambient - len(base), dim - len(base), p).

    Uses the splitting F_p^ambient = base (+) W with W spanned by the unit
    vectors at the base's non-pivot columns; subspaces containing the base
    correspond to subspaces of W.
    """
    base = [list(r) for r in base]
    l = len(base)
    if dim < l or dim > ambient:
        return
    pivots = [next(j for j, x in enumerate(row) if x != 0) for row in base]
    free_cols = [j for j in range(ambient) if j not in set(pivots)]
    w = len(free_cols)
    for small in _rref_enumerate(p, w, dim - l):
        lifted = []
        for row in small:
            full = [0] * ambient
            for j, x in zip(free_cols, row):
                full[j] = x
            lifted.append(full)
        yield _rref_canonical(p, base + lifted, ambient)


def _rref_enumerate(p: int, ncols: int, k: int) -> Iterator[list[list[int]]]:
    """All RREF matrices with k nonzero rows and ncols columns over F_p."""
    if k == 0:
        yield []
        return
    for pivots in itertools.combinations(range(ncols), k):
        free_pos = []
        for i in range(k):
            for j in range(pivots[i] + 1, ncols):
                if j not in pivots:
                    free_pos.append((i, j))
        for values in itertools.product(range(p), repeat=len(free_pos)):
            rows = [[0] * ncols for _ in range(k)]
            for i, c in enumerate(pivots):
                rows[i][c] = 1
            for (i, j), v in zip(free_pos, values):
                rows[i][j] = v
            yield rows


def random_subspace_containing(
    rng, p: int, ambient: int, dim: int, base: Sequence[Sequence[int]] = ()
) -> tuple[tuple[int, ...], ...]:
    """A uniformly random dim-subspace of F_p^ambient containing the base.

    Args:
        rng: random.Random instance (seeded by the caller).
    """
    base = [list(r) for r in base]
    l = len(base)
    if dim < l or dim > ambient:
        raise ValidationError("no subspace with the requested dimension exists")
    while True:
        extra = [[rng.randrange(p) for _ in range(ambient)] for _ in range(dim - l)]
        rows = _rref_canonical(p, base + extra, ambient)
        if len(rows) == dim:
            return rows
