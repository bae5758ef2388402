"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so each class corresponds to one
failure category.
"""

from __future__ import annotations


class KanfinError(Exception):
    """Base class for all library errors."""


class DataError(KanfinError, ValueError):
    """Malformed or inconsistent input data (exit code 2)."""


class CompositionError(DataError):
    """Two maps were composed whose domain and codomain disagree."""


class InvalidCone(DataError):
    """A family offered to a factorization does not satisfy the cone law."""


class PreconditionError(DataError):
    """An operation was called outside its documented domain."""


class ResourceExhausted(KanfinError):
    """A node budget or size cap was exceeded (exit code 3).

    ``stats`` carries whatever partial statistics the search gathered.
    """

    def __init__(self, message: str, stats: dict | None = None):
        super().__init__(message)
        self.stats = dict(stats or {})


class InvariantViolation(KanfinError, AssertionError):
    """An internal invariant failed; always a bug (exit code 4)."""
