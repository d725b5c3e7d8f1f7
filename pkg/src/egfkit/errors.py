"""Exception hierarchy shared by every egfkit module."""


class EgfkitError(Exception):
    """Base class for all errors raised by egfkit."""


class DomainError(EgfkitError, ValueError):
    """An argument lies outside the domain of the operation."""


class IntegrationError(EgfkitError):
    """Adaptive quadrature exhausted its panel budget.

    The best available estimate is kept on ``partial`` so callers can
    decide whether it is usable.
    """

    def __init__(self, message, partial=float("nan"), error=float("inf")):
        super().__init__(message)
        self.partial = partial
        self.error = error


class ConvergenceError(EgfkitError):
    """A generating-function or entropy integral diverges."""


class OrderError(DomainError):
    """Order ``s == 1`` is excluded from every generating function."""


class DegenerateTailError(EgfkitError):
    """Survival probability is zero at the requested time."""


class InfiniteMeanError(EgfkitError):
    """The distribution has no finite mean, so residual life diverges."""


class InsufficientDataError(EgfkitError):
    """Too few observations for the requested estimator."""


class DegenerateSampleError(EgfkitError):
    """The sample has zero spread."""


class EstimatorUndefinedError(EgfkitError):
    """The moment estimator of the Pareto index is undefined (mean <= 1)."""
