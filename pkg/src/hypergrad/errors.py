"""Exception types raised by hypergrad."""


class HypergradError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(HypergradError, ValueError):
    """Operands have incompatible coordinate counts."""


class NonFiniteError(HypergradError, ValueError):
    """A vector contains NaN or Inf entries."""


class NotSpacelikeError(HypergradError, ValueError):
    """A vector expected to be tangent has a negative Minkowski square."""


class OffManifoldError(HypergradError, ValueError):
    """A vector does not lie on the upper sheet of the hyperboloid."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UnrenormalizableError(HypergradError, ValueError):
    """A vector cannot be rescaled onto the hyperboloid."""


class OutsideBallError(HypergradError, ValueError):
    """A point lies on or outside the boundary of the unit ball."""


class CoincidentPointsError(HypergradError, ValueError):
    """The distance gradient is singular because the points coincide."""


class UnsupportedDimensionError(HypergradError, ValueError):
    """The operation is only defined for a specific dimension."""


class NoConvergenceError(HypergradError, RuntimeError):
    """An iterative solver exhausted its iteration budget."""

    def __init__(self, message, iterations=None, grad_norm=None):
        super().__init__(message)
        self.iterations = iterations
        self.grad_norm = grad_norm
