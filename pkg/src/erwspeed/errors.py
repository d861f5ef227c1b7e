"""Exception hierarchy shared by all modules."""


class ERWError(Exception):
    """Base class for errors raised by this package."""


class DomainError(ERWError, ValueError):
    """An argument violates a precondition (non-neighbour step, bad parameter)."""


class DivergenceError(ERWError, ArithmeticError):
    """A requested Green's-function quantity is infinite."""


class PrecisionError(ERWError, ArithmeticError):
    """The requested tolerance could not be met.

    ``best`` carries the best available ``(value, error_radius)`` pair.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ResourceError(ERWError, RuntimeError):
    """An enumeration would exceed its configured budget."""
