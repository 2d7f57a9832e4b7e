"""Exception types shared across the package.

Two broad families: domain errors (bad inputs, degenerate geometry,
ill-posed requests) and accuracy errors (a result was computed but cannot
be certified to the requested tolerance).  The CLI maps DomainError and
UsageError to exit code 2 and AccuracyError to exit code 3.
"""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class DegenerateGeometryError(DomainError):
    """Geometric construction undefined for this input (center, antipodal pair, ...)."""


class UsageError(ValueError):
    """Malformed CLI arguments, config files, or report requests."""


class AccuracyError(RuntimeError):
    """Requested tolerance cannot be certified."""


class SeriesAccuracyError(AccuracyError):
    """Eigenfunction series truncated before reaching the requested tolerance."""


class QuadratureAccuracyError(AccuracyError):
    """Adaptive quadrature finished with an error estimate above tolerance."""


class NumericError(RuntimeError):
    """Internal numerical routine failed to converge or validate."""
