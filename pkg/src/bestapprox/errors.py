"""Exception types shared across the package."""


class SpecError(ValueError):
    """Malformed measure, function or approximation description."""


class DomainError(ValueError):
    """Argument outside the domain of an operation (e.g. a quantile level not in (0, 1))."""


class UnsupportedError(NotImplementedError):
    """The requested operation is not available for this measure kind."""


class NumericalError(RuntimeError):
    """A numerical procedure failed: divergence, non-convergence, infinite moment."""
