"""Exception types raised across the package."""


class GeometryError(Exception):
    """Base class for all package errors."""


class DomainError(GeometryError, ValueError):
    """A point, ball or grid lies outside the chart where a field is defined."""


class SpacelikeError(GeometryError):
    """The graph is not spacelike (largest singular value too close to 1)."""

    def __init__(self, message, lambda1=None, location=None):
        super().__init__(message)
        self.lambda1 = lambda1
        self.location = location


class ConvergenceError(GeometryError):
    """Newton iteration failed to reach the requested residual."""

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class NumericalError(GeometryError):
    """Quadrature or another numerical primitive failed its accuracy target."""
