"""Torus-fixed loci of Quot schemes on affine space: combinatorial models.

Modules:
    charfn    characteristic functions and their enumeration
    incidence incidence structures, equivalence, interval recognition
    realize   geometric realization of structures as characteristic functions
    schemegeo subspace configurations: counting, dimension, smoothness
    verify    independent cross-checks of the fixed-point decomposition
    cli       command line entry point
"""

from .errors import ResourceLimitError, ValidationError

__version__ = "0.1.0"

__all__ = ["ResourceLimitError", "ValidationError", "__version__"]
