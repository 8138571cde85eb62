"""Exception hierarchy shared by every module."""


class FinslerError(Exception):
    """Base class for library errors."""


class DomainError(FinslerError, ValueError):
    """Evaluation outside the smoothness domain (e.g. y = 0 for a norm)."""


class MetricValidityError(FinslerError):
    """A fundamental tensor failed to be symmetric positive definite."""


class NumericalError(FinslerError):
    """A numerical procedure cannot deliver a meaningful result."""


class DecompositionError(FinslerError):
    """The Killing form is degenerate on the isotropy algebra."""


class ChartExitError(FinslerError):
    """A curve left the coordinate chart."""

    def __init__(self, message, escape_time=None):
        super().__init__(message)
        self.escape_time = escape_time


class AccuracyError(FinslerError):
    """Integrator drift exceeded its bound; a smaller step is needed."""


class DegenerateDirectionError(DomainError):
    """A Killing field or algebra vector vanishes where a direction is needed."""
