"""Ready-made inputs: small named functions and graphs used throughout.

Each fixture is tiny enough to read at a glance; the tests and the command
line both consume them, so their shapes are part of the public surface.
"""

from __future__ import annotations

import itertools

from .charfn import CharFn
from .errors import ValidationError
from .incidence import IncidenceStructure


def staircase_charfn() -> CharFn:
    """Two-variable function with bound 3: one component of each kind.

    Level 3 is the origin; level 2 splits into a horizontal run and a
    lone cell; level 1 splits the same way one step further out. Its
    structure is two points A, B and two lines c1, c2 with A on c1 and
    B on both.
    """
    return CharFn(
        2,
        {(0, 0): 3, (1, 0): 2, (2, 0): 2, (0, 1): 2, (1, 1): 1, (0, 2): 1},
    )


def staircase_structure() -> IncidenceStructure:
    """The structure of staircase_charfn, labeled as the builder labels it."""
    return IncidenceStructure(
        2, (2, 2), [((1, 0), (2, 0)), ((1, 0), (2, 1)), ((1, 1), (2, 1))]
    )


def crossed_lines_charfn(r: int = 3) -> CharFn:
    """Three-variable function whose structure is two points on two lines.

    The configuration space has two irreducible components (points equal,
    or lines equal), so it witnesses a singularity at full coincidence.
    The bound r only changes the origin value; the structure stays K_{2,2}.
    """
    if r < 3:
        raise ValidationError("the crossed-lines function needs bound >= 3")
    return CharFn(
        3,
        {
            (0, 0, 0): r,
            (1, 0, 0): 2,
            (0, 1, 0): 2,
            (1, 1, 0): 1,
            (0, 0, 1): 1,
            (1, 0, 1): 1,
            (0, 1, 1): 1,
        },
    )


def k22_structure() -> IncidenceStructure:
    return IncidenceStructure(
        2, (2, 2), [((1, i), (2, j)) for i in range(2) for j in range(2)]
    )


def k33_structure() -> IncidenceStructure:
    """Complete bipartite 3-by-3; realizable in three variables."""
    return IncidenceStructure(
        2, (3, 3), [((1, i), (2, j)) for i in range(3) for j in range(3)]
    )


def subdivided_k5_structure() -> IncidenceStructure:
    """K_5 with every edge split by a new vertex; not a string graph.

    Part 1 holds the five original vertices, part 2 one vertex per
    original edge, joined to that edge's endpoints.
    """
    pairs = list(itertools.combinations(range(5), 2))
    edges = []
    for k, (i, j) in enumerate(pairs):
        edges.append(((1, i), (2, k)))
        edges.append(((1, j), (2, k)))
    return IncidenceStructure(2, (5, len(pairs)), edges)
