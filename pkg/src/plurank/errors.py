"""Exception hierarchy shared by every module.

The CLI maps :class:`DomainError` to exit code 2 and :class:`ResourceError`
to exit code 3.
"""


class PluRankError(Exception):
    """Base class for all library errors."""


class DomainError(PluRankError, ValueError):
    """An argument lies outside the domain of the operation."""


class PositivityError(DomainError):
    """A formula divides by a pairwise proportion equal to 0 or 1."""


class DegenerateError(DomainError):
    """A quantity is undefined because a variance, gap or event probability is zero."""


class DegeneratePairError(DegenerateError):
    """A pair-level quantity is undefined (zero gap or empty conditioning event)."""


class NotSinglePeakedError(DomainError):
    """Pairwise data is inconsistent with single-peakedness on the given axis."""


class CollapseInapplicableError(DomainError):
    """Pairwise data sits on the boundary, so the Plackett-Luce lift is undefined."""


class FeasibilityError(DomainError):
    """No protocol satisfies the requested constraints."""


class UnsupportedError(DomainError):
    """The requested representation is not available for this generator."""


class DependencyError(PluRankError, LookupError):
    """A required degree slice is missing from a plurality matrix."""


class ResourceError(PluRankError):
    """The request needs an enumeration that is too large to perform."""


class SolverError(PluRankError, ArithmeticError):
    """A linear-algebra step failed."""


class ParseError(PluRankError, ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
