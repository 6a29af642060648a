"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: validation/domain problems -> 2,
numeric failures -> 3, I/O errors (plain OSError) -> 4.
"""


class PhasetestError(Exception):
    """Base class for package errors."""


class ValidationError(PhasetestError):
    """Invalid specification or configuration (bad weights, ranges, files)."""


class DomainError(ValidationError):
    """Arguments outside the mathematical domain (non-finite inputs, etc.)."""


class NumericError(PhasetestError):
    """A numeric procedure failed (bracketing, non-convergence)."""
