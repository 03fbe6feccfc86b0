"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a documented precondition of an operation."""


class ConvergenceError(RuntimeError):
    """An iterative computation failed to meet its accuracy target."""
