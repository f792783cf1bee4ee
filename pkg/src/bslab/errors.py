"""Exception types shared across the package."""


class BSLabError(Exception):
    """Base class for every error raised by bslab."""


class ValidationError(BSLabError, ValueError):
    """A parameter violates its documented invariant."""


class DomainError(BSLabError, ValueError):
    """An argument lies outside the domain of a function."""


class UnsupportedRootsError(DomainError):
    """Characteristic roots are repeated or complex."""


class RangeError(DomainError):
    """A query point falls outside a surface's bounding box."""


class NoSolutionError(DomainError):
    """No volatility reproduces the target price."""


class StabilityError(BSLabError):
    """Explicit scheme requested with a mesh ratio above 1/2."""

    def __init__(self, delta):
        self.delta = delta
        super().__init__(
            f"Stability violated (delta={delta:.3f}>0.5): increase M or decrease dx"
        )


class SingularSystemError(BSLabError, ArithmeticError):
    """Zero pivot met during tridiagonal elimination."""


class ConvergenceError(BSLabError, RuntimeError):
    """An iterative method ran out of iterations."""
