"""Shared exception types for the laboratory."""


class LabError(Exception):
    """Base class for every error raised by this package."""


class RejectedInputError(LabError, ValueError):
    """Input violates a structural precondition (bad window, bad config, ...)."""


class NegativeCoordinateError(LabError, ValueError):
    """Set depends on a coordinate below 0, outside the base algebra."""


class GradingViolationError(LabError, ValueError):
    """Set depends on a coordinate below the grade it is used at."""


class NotStochasticError(LabError, ValueError):
    """Matrix row does not sum to one."""


class NotIrreducibleError(LabError, ValueError):
    """Transition matrix is not irreducible."""


class BudgetExceededError(LabError, RuntimeError):
    """Optimizer state grew beyond the configured cap; result would not be exact."""


class TooLargeError(LabError, RuntimeError):
    """Instance too large for exhaustive enumeration."""


class InfeasibleError(LabError, RuntimeError):
    """No cover within the truncated class meets every budget constraint.

    This signals that the slack is too small for this truncation, not that
    the untruncated constrained class is empty.
    """


class DimensionCapError(LabError, ValueError):
    """Chain length beyond the configured cap."""


class GridNotMonotoneError(RejectedInputError):
    """Approximation family is not setwise decreasing in its index."""
