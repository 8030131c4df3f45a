"""Exception hierarchy."""


class SteklovError(Exception):
    """Base class for all errors raised by this package."""


class GeometryError(SteklovError, ValueError):
    """Invalid shell parameters or a degenerate coordinate point."""


class DegenerateFrameError(GeometryError):
    """Concentric shell (t = 0): the bispherical frame does not exist."""


class TouchingBoundariesError(GeometryError):
    """Inner sphere touches or crosses the outer one (t >= r2 - r1)."""


class EigenSolverError(SteklovError):
    """Eigenvalue or eigenvector computation failed."""


class QuadratureError(SteklovError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best available estimate is kept on ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
