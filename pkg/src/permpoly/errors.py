"""Exception hierarchy shared by every module of the package."""


class PermPolyError(Exception):
    """Base class for all package errors."""


class SizeError(PermPolyError, ValueError):
    """Matrix or problem dimension exceeds the cap of the requested method."""


class DomainError(PermPolyError, ValueError):
    """Input lies outside the mathematical domain of an operation."""


class AliasingError(PermPolyError, ValueError):
    """Contour discretization too coarse to extract the wanted coefficient."""


class ConditioningError(PermPolyError, ArithmeticError):
    """Numerical procedure lost the accuracy it promises.

    Attributes
    ----------
    index : int or None
        First index at which the failure was detected, when meaningful.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ConvergenceError(PermPolyError, ArithmeticError):
    """Iteration did not reach its tolerance; ``residuals`` holds the final state."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class UsageError(PermPolyError, ValueError):
    """Caller combined options in a way that has no defined meaning."""
