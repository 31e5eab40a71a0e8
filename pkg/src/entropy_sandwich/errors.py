"""Exception hierarchy shared by all modules."""


class SandwichError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SandwichError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ConvergenceError(SandwichError, RuntimeError):
    """Adaptive quadrature hit its subdivision cap.

    The best estimate obtained so far is kept on the exception so callers
    can decide whether it is good enough.
    """

    def __init__(self, message, value, abs_error_estimate, subdivisions):
        super().__init__(message)
        self.value = value
        self.abs_error_estimate = abs_error_estimate
        self.subdivisions = subdivisions


class HypothesisError(SandwichError, ValueError):
    """Input violates a structural hypothesis (common mean, unimodality, ...)."""

    def __init__(self, message, check=None):
        super().__init__(message)
        self.check = check


class NotApplicableError(SandwichError, ValueError):
    """The requested bound does not cover the given input."""


class DegenerateSplitError(HypothesisError):
    """One side of the mode carries (numerically) no mass."""
