"""The Poincare ball model and the retraction update.

Points are arrays of shape ``(..., n)`` strictly inside the unit ball.  The
maps :func:`to_ball` / :func:`from_ball` move between this model and the
hyperboloid; :func:`push_forward` carries hyperboloid tangent vectors (in
particular Riemannian gradients) across.
"""

import numpy as np

from .errors import CoincidentPointsError, OutsideBallError
from .hyperboloid import base_point, distance, exp_map, tangent_basis

#: Norm that points leaving the ball are pulled back to.
BOUNDARY_NORM = 1.0 - 1e-5


def _sqnorm(y):
    n = y.shape[-1]
    acc = y[..., 0] * y[..., 0]
    for i in range(1, n):
        acc = acc + y[..., i] * y[..., i]
    return acc


def validate(y):
    y = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(y)):
        raise ValueError("ball point has non-finite entries")
    if np.any(_sqnorm(y) >= 1.0):
        raise OutsideBallError("point is not strictly inside the unit ball")
    return y


def pb_distance(u, v):
    """Hyperbolic distance between points of the Poincare ball.

    ``arccosh(1 + 2 |u - v|^2 / ((1 - |u|^2)(1 - |v|^2)))``, evaluated as
    ``log1p(t + sqrt(t (t + 2)))`` with ``t`` the fraction so that small
    distances keep full relative precision.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    t = 2.0 * _sqnorm(u - v) / ((1.0 - _sqnorm(u)) * (1.0 - _sqnorm(v)))
    return np.log1p(t + np.sqrt(t * (t + 2.0)))


def to_ball(x):
    """Map hyperboloid points to the ball: ``(x_1..x_n) / (x_{n+1} + 1)``."""
    x = np.asarray(x, dtype=np.float64)
    return x[..., :-1] / (x[..., -1:] + 1.0)


def from_ball(y):
    """Inverse of :func:`to_ball`.

    ``2 / (1 - r^2) * (y_1, ..., y_n, (1 + r^2) / 2)`` with ``r = |y|``.

    Raises
    ------
    OutsideBallError
        If any point has norm >= 1.
    """
    y = np.asarray(y, dtype=np.float64)
    r2 = _sqnorm(y)[..., None]
    if np.any(r2 >= 1.0):
        raise OutsideBallError(
            f"cannot lift a point with norm {np.sqrt(np.max(r2)):.17g} >= 1"
        )
    scale = 2.0 / (1.0 - r2)
    return np.concatenate([scale * y, scale * (1.0 + r2) / 2.0], axis=-1)


def push_forward(x, v):
    """Differential of :func:`to_ball` at ``x`` applied to tangent vector ``v``.

    ``(v_i - x_i v_{n+1} / (x_{n+1} + 1)) / (x_{n+1} + 1)`` for ``i <= n``.
    The result is a tangent vector at ``to_ball(x)`` in ball coordinates;
    applied to a hyperboloid Riemannian gradient it gives the Riemannian
    gradient on the ball.
    """
    x = np.asarray(x, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    denom = x[..., -1:] + 1.0
    return (v[..., :-1] - x[..., :-1] * v[..., -1:] / denom) / denom


def retraction_step(psi, g, alpha):
    """Additive update ``psi - alpha * g`` with boundary rescue.

    Results on or outside the unit sphere are rescaled to norm
    ``1 - 1e-5``.  ``alpha`` may be an array broadcasting against ``psi``.
    """
    psi = np.asarray(psi, dtype=np.float64)
    new = psi - alpha * np.asarray(g, dtype=np.float64)
    norm = np.sqrt(_sqnorm(new))[..., None]
    outside = norm >= 1.0
    return np.where(outside, new * (BOUNDARY_NORM / np.where(outside, norm, 1.0)), new)


def pb_distance_gradient(u, v):
    """Euclidean gradient in ``u`` of :func:`pb_distance`.

    With ``a = 1 - |u|^2``, ``b = 1 - |v|^2`` and
    ``c = 1 + 2 |u - v|^2 / (a b)`` this is::

        4 / (b sqrt(c^2 - 1)) * ((|v|^2 - 2 <u, v> + 1) / a^2 * u - v / a)

    Multiply by :func:`euclidean_to_riemannian` to get the Riemannian
    gradient, which is what :func:`push_forward` produces.

    Raises
    ------
    CoincidentPointsError
        If ``u == v`` (``c == 1``).
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    a = 1.0 - _sqnorm(u)
    b = 1.0 - _sqnorm(v)
    t = 2.0 * _sqnorm(u - v) / (a * b)
    if np.any(t == 0.0):
        raise CoincidentPointsError("distance gradient is singular for u == v")
    root = np.sqrt(t * (t + 2.0))  # sqrt(c^2 - 1)
    uv = np.sum(u * v, axis=-1)
    coef_u = (_sqnorm(v) - 2.0 * uv + 1.0) / a**2
    return (4.0 / (b * root))[..., None] * (coef_u[..., None] * u - v / a[..., None])


def euclidean_to_riemannian(u, g):
    """Rescale a Euclidean ball gradient at ``u`` by ``((1 - |u|^2) / 2)^2``."""
    u = np.asarray(u, dtype=np.float64)
    return (((1.0 - _sqnorm(u)) / 2.0) ** 2)[..., None] * np.asarray(g, dtype=np.float64)


def retraction_error(d, step=1.0, directions=360):
    """Worst-case error of one retraction step compared with the exact step.

    A point ``p`` of H^2 is placed at distance ``d`` from the origin.  For
    ``directions`` evenly spaced unit tangent directions ``w`` at ``p`` the
    exact update ``Exp_p(step * w)`` is compared with the retraction update
    of the same Riemannian step taken in the ball and lifted back to the
    hyperboloid.  Returns the largest hyperbolic distance between the two.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    if not step > 0:
        raise ValueError("step must be positive")
    origin = base_point(2)
    p = exp_map(origin, np.array([d, 0.0, 0.0]))
    e1, e2 = tangent_basis(p)
    theta = 2.0 * np.pi * np.arange(directions) / directions
    w = np.cos(theta)[:, None] * e1 + np.sin(theta)[:, None] * e2
    exact = exp_map(p, step * w)
    psi = to_ball(p)
    moved = retraction_step(psi, -push_forward(p, w), step)
    return float(np.max(distance(exact, from_ball(moved))))
