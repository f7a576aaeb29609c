"""Riemannian gradient descent on the hyperboloid model of hyperbolic space,
with the Poincare-ball retraction for comparison."""

from .errors import (
    CoincidentPointsError,
    DimensionMismatchError,
    HypergradError,
    NoConvergenceError,
    NonFiniteError,
    NotSpacelikeError,
    OffManifoldError,
    OutsideBallError,
    UnrenormalizableError,
    UnsupportedDimensionError,
)
from .frechet import (
    DescentOutcome,
    descend_exponential,
    descend_retraction,
    objective,
    objective_gradient,
    riemannian_gradient,
    solve_reference,
)
from .hyperboloid import (
    StoppingRule,
    base_point,
    distance,
    distance_gradient,
    exp_map,
    gradient_descent,
    project_to_tangent,
    renormalize,
    tangent_basis,
    validate,
)
from .minkowski import ambient_gradient, minkowski_form, spacelike_norm
from .poincare import (
    from_ball,
    pb_distance,
    pb_distance_gradient,
    push_forward,
    retraction_error,
    retraction_step,
    to_ball,
)

__version__ = "0.1.0"

__all__ = [
    "CoincidentPointsError",
    "DimensionMismatchError",
    "HypergradError",
    "NoConvergenceError",
    "NonFiniteError",
    "NotSpacelikeError",
    "OffManifoldError",
    "OutsideBallError",
    "UnrenormalizableError",
    "UnsupportedDimensionError",
    "DescentOutcome",
    "descend_exponential",
    "descend_retraction",
    "objective",
    "objective_gradient",
    "riemannian_gradient",
    "solve_reference",
    "StoppingRule",
    "base_point",
    "distance",
    "distance_gradient",
    "exp_map",
    "gradient_descent",
    "project_to_tangent",
    "renormalize",
    "tangent_basis",
    "validate",
    "ambient_gradient",
    "minkowski_form",
    "spacelike_norm",
    "from_ball",
    "pb_distance",
    "pb_distance_gradient",
    "push_forward",
    "retraction_error",
    "retraction_step",
    "to_ball",
]
