"""Exception types shared across the package.

The CLI maps these onto process exit codes, so new error conditions
should reuse one of the classes below instead of raising bare
ValueError/RuntimeError.
"""

from __future__ import annotations

__all__ = [
    "ValidationError",
    "PoleError",
    "DegenerateInputError",
    "SingularOrderError",
    "TruncationError",
    "EXIT_OK",
    "EXIT_IO",
    "EXIT_TOLERANCE",
    "EXIT_TRUNCATION",
    "EXIT_VALIDATION",
]

# CLI exit codes
EXIT_OK = 0
EXIT_IO = 1
EXIT_TOLERANCE = 2
EXIT_TRUNCATION = 3
EXIT_VALIDATION = 4


class ValidationError(ValueError):
    """An input violates a documented domain constraint."""


class PoleError(ValidationError):
    """A ratio of amplitudes was requested where its denominator vanishes."""


class DegenerateInputError(ValidationError):
    """Inputs are degenerate in a way that leaves the result undefined."""


class SingularOrderError(ValidationError):
    """The ordering parameter sits at the singular endpoint s = 1."""


class TruncationError(ValueError):
    """The truncated Fock space is too small for the requested amplitudes."""
