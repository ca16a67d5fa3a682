"""Exception and warning types shared across the package."""


class CovPriorsError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CovPriorsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(CovPriorsError, RuntimeError):
    """An iterative computation failed to reach the requested accuracy."""


class ToleranceNotMetError(ConvergenceError):
    """An integrator exhausted its evaluation budget.

    Carries the best estimate obtained so far in ``estimate`` so callers
    can decide whether the partial result is still usable.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class DivergentIntegralError(CovPriorsError):
    """An integral shows no sign of converging (e.g. a non-normalizable prior
    used where a proper one is required)."""


class DegenerateMetricError(CovPriorsError):
    """The Fisher information matrix is singular at the requested point, so
    no volume element (and no covariant prior density) exists there."""


class EmptySupportError(CovPriorsError):
    """A posterior is identically zero on the supplied grid or support."""


class IncomparableEvidenceError(CovPriorsError):
    """An evidence known only up to a constant was mixed into a model
    comparison.  Improper priors leave the marginal likelihood defined only
    up to an arbitrary factor, which makes posterior model odds meaningless;
    this error enforces that contract."""


class MassLeakWarning(UserWarning):
    """A gridded posterior carries non-negligible probability mass in its
    boundary cells, so the grid probably truncates the distribution."""
