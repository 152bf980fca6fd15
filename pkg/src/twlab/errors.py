"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """Raised when an argument violates a documented precondition."""


class NumericalFailureError(RuntimeError):
    """Raised when an iterative numerical routine fails to converge."""


class InsufficientDataError(ValueError):
    """Raised when a statistic cannot be estimated from the data given."""
