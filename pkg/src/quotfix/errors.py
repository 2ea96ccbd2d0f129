"""Exceptions shared across the package.

Two failure modes are part of the public contract: bad input data
(ValidationError, CLI exit code 2) and blown resource caps
(ResourceLimitError, CLI exit code 3). Everything else is a plain bug.
"""


class ValidationError(ValueError):
    """Input violates a documented precondition or invariant."""


class ResourceLimitError(RuntimeError):
    """A configured cap (result count, search width, grid size) was exceeded."""
