"""The hyperboloid model of hyperbolic n-space.

Points live on the upper sheet ``{x : <x, x> = -1, x_{n+1} > 0}`` of
Minkowski space.  Geodesic distance, the exponential map and the tangent
projection are all expressed with the ambient Minkowski form, which keeps
gradient descent on the hyperboloid as simple as on the sphere.

All functions accept arrays of shape ``(..., n + 1)`` and broadcast over the
leading axes.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    CoincidentPointsError,
    NonFiniteError,
    OffManifoldError,
    UnrenormalizableError,
)
from .minkowski import _norm, as_vector, minkowski_form

#: Tolerance on ``|<x, x> + 1|`` for a point to count as on the manifold.
MANIFOLD_TOL = 1e-9
#: Below this tangent norm the exponential map uses its first-order limit.
SMALL_STEP = 1e-9
#: Below this distance the raw distance gradient is considered singular.
SINGULAR_DIST = 1e-8


def base_point(n):
    """Return the base point ``(0, ..., 0, 1)`` of H^n."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    p = np.zeros(n + 1)
    p[-1] = 1.0
    return p


def _form_residual(x):
    # Rounding in <x, x> grows with x_{n+1}^2, so the tolerance is relative
    # to that scale once points leave the unit neighbourhood of the origin.
    return np.abs(minkowski_form(x, x) + 1.0) / np.maximum(1.0, x[..., -1] ** 2)


def validate(x, tol=MANIFOLD_TOL):
    """Check that ``x`` lies on the upper sheet of the hyperboloid.

    Returns the points as a float64 array.

    Raises
    ------
    OffManifoldError
        If ``|<x, x> + 1|`` exceeds ``tol`` (scaled by ``max(1, x_{n+1}^2)``)
        or the last coordinate is not positive.  The measured residual is
        attached to the exception.
    """
    x = as_vector(x)
    residual = _form_residual(x)
    worst = float(np.max(residual))
    if worst > tol:
        raise OffManifoldError(
            f"point is off the hyperboloid: |<x,x> + 1| = {worst:.3e}", worst
        )
    if np.any(x[..., -1] < 1.0 - tol):
        raise OffManifoldError(
            "point lies on the lower sheet (last coordinate < 1)", worst
        )
    return x


def renormalize(x):
    """Rescale a timelike, future-pointing vector onto the hyperboloid.

    Returns ``x / sqrt(-<x, x>)``.  Used after every update to stop
    floating-point drift from accumulating.
    """
    x = as_vector(x)
    sq = minkowski_form(x, x)
    if np.any(sq >= 0.0) or np.any(x[..., -1] <= 0.0):
        raise UnrenormalizableError(
            "only vectors with <x, x> < 0 and positive last coordinate "
            "can be renormalized"
        )
    return x / np.sqrt(-sq)[..., None]


def _dot(a, b):
    acc = a[..., 0] * b[..., 0]
    for i in range(1, a.shape[-1]):
        acc = acc + a[..., i] * b[..., i]
    return acc


def _lift(x_spatial):
    # The point of the upper sheet with the given spatial coordinates.
    t = np.sqrt(1.0 + _dot(x_spatial, x_spatial))
    return np.concatenate([x_spatial, t[..., None]], axis=-1)


def distance(u, v):
    """Geodesic distance ``arccosh(-<u, v>)`` between points of H^n.

    Evaluated as ``2 asinh(|y - z| sqrt((u_{n+1} + 1)(v_{n+1} + 1)) / 2)``
    with ``y``, ``z`` the Poincare-ball images of ``u``, ``v``.  This is the
    same function, but ``|y - z|`` is a sum of squares, whereas both
    ``-<u, v>`` and ``<u - v, u - v>`` lose about ``eps * u_{n+1} v_{n+1}``
    to cancellation.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    su = u[..., -1:] + 1.0
    sv = v[..., -1:] + 1.0
    # Diverged (infinite) iterates give NaN here; callers flag them.
    with np.errstate(invalid="ignore", over="ignore"):
        diff = u[..., :-1] / su - v[..., :-1] / sv
        sq = _dot(diff, diff)
        return 2.0 * np.arcsinh(0.5 * np.sqrt(sq * (su[..., 0] * sv[..., 0])))


def project_to_tangent(p, g):
    """Project an ambient vector onto the tangent space at ``p``.

    Computes ``g + <p, g> p``.  Note the plus sign: on the sphere the
    corresponding projection subtracts.
    """
    p = np.asarray(p, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    return g + minkowski_form(p, g)[..., None] * p


def exp_map(p, v):
    """Exponential map ``cosh(|v|) p + sinh(|v|) v / |v|``.

    Parameters
    ----------
    p : array_like, shape (..., n + 1)
        Base point(s) on the hyperboloid.
    v : array_like, shape (..., n + 1)
        Tangent vector(s) at ``p``.

    Returns
    -------
    ndarray
        The point reached by following the geodesic from ``p`` in direction
        ``v`` for distance ``|v|``.  For ``|v| < 1e-9`` the first-order limit
        ``p + v`` is used.

    Notes
    -----
    Far from the origin the direct formula amplifies the rounding error of
    the inputs (``<p, p> + 1`` and ``<p, v>`` are only zero to about
    ``eps * p_{n+1}^2``) by up to ``e^{2|v|}``.  Instead ``v`` is carried to
    the origin by the Lorentz boost ``B_p`` taking the origin to ``p``, the
    step is taken there and the result is boosted back:
    ``Exp_p(v) = B_p Exp_o(B_p^{-1} v)``.  ``B_p`` is built from the spatial
    part of ``p`` alone, the normal component of ``v`` is dropped on the way
    (a tangent projection), ``|v|`` becomes a Euclidean norm, and the last
    coordinate of the result is recomputed so that it lies exactly on the
    upper sheet.
    """
    p = np.asarray(p, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    ps = p[..., :-1]
    # Diverging descent runs overflow here; their callers check finiteness.
    with np.errstate(over="ignore", invalid="ignore"):
        tp1 = 1.0 + np.sqrt(1.0 + _dot(ps, ps))
        # Spatial part of B_p^{-1} v; its time part is -<p, v> and is dropped.
        u = v[..., :-1] + (_dot(ps, v[..., :-1]) / tp1 - v[..., -1])[..., None] * ps
        nv = np.sqrt(_dot(u, u))
        small = nv < SMALL_STEP
        shc = np.where(small, 1.0, np.sinh(nv) / np.where(small, 1.0, nv))
        ch = np.where(small, 1.0, np.cosh(nv))
        out = shc[..., None] * u + (shc * _dot(ps, u) / tp1 + ch)[..., None] * ps
        return _lift(out)


def distance_gradient(u, v):
    """Ambient gradient of ``distance(., v)`` at ``u``.

    This is ``-(<u, v>^2 - 1)^{-1/2} v``; the factor equals
    ``1 / sinh(d)`` and is evaluated that way from the accurate distance.
    Project with :func:`project_to_tangent` to obtain the Riemannian
    gradient.

    Raises
    ------
    CoincidentPointsError
        If the points are closer than ``SINGULAR_DIST``.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    d = distance(u, v)
    if np.any(d < SINGULAR_DIST):
        raise CoincidentPointsError(
            f"distance gradient is singular for coincident points (d = {np.min(d):.2e})"
        )
    return -v / np.sinh(d)[..., None]


def tangent_basis(p):
    """Orthonormal basis of the tangent space at a single point ``p``.

    The ambient spatial axes are projected onto the tangent space and then
    Gram-Schmidt orthonormalized with respect to the Minkowski form.

    Returns
    -------
    ndarray, shape (n, n + 1)
    """
    p = np.asarray(p, dtype=np.float64)
    n = p.shape[-1] - 1
    basis = []
    for i in range(n):
        e = np.zeros(n + 1)
        e[i] = 1.0
        t = project_to_tangent(p, e)
        for b in basis:
            t = t - minkowski_form(t, b) * b
        # Re-project to remove the normal component reintroduced by rounding.
        t = project_to_tangent(p, t)
        basis.append(t / _norm(t))
    return np.array(basis)


@dataclass(frozen=True)
class StoppingRule:
    """When to stop a descent run; the first satisfied criterion wins.

    ``max_iters`` bounds the number of updates.  ``grad_norm_threshold``
    stops once the Riemannian gradient norm falls below it.  ``target`` and
    ``arrival_radius`` together stop once the iterate is strictly within
    ``arrival_radius`` of ``target``.
    """

    max_iters: int = 1000
    grad_norm_threshold: Optional[float] = None
    target: Optional[np.ndarray] = None
    arrival_radius: Optional[float] = None

    def __post_init__(self):
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if (self.target is None) != (self.arrival_radius is None):
            raise ValueError("target and arrival_radius must be given together")
        if self.arrival_radius is not None and self.arrival_radius <= 0:
            raise ValueError("arrival_radius must be positive")


@dataclass
class DescentTrace:
    """Result of :func:`gradient_descent`.

    ``iterations`` counts completed updates and ``reason`` is one of
    ``"arrived"``, ``"converged"`` or ``"max_iters"``.  ``points`` holds every
    iterate including the start when tracing was requested, else ``None``.
    """

    final: np.ndarray
    iterations: int
    reason: str
    grad_norm: float
    points: Optional[list] = field(default=None, repr=False)


def gradient_descent(
    grad_fn: Callable[[np.ndarray], np.ndarray],
    start,
    alpha: float,
    stop: StoppingRule,
    keep_trace: bool = True,
) -> DescentTrace:
    """Riemannian gradient descent on H^n with exact exponential updates.

    Each iteration takes the ambient gradient from ``grad_fn``, projects it
    onto the tangent space and moves to ``Exp_theta(-alpha * grad)``.  Stopping
    criteria are evaluated on the current iterate before an update is made,
    so a start that already satisfies one returns after zero updates.

    Parameters
    ----------
    grad_fn : callable
        Maps a point of H^n to the ambient (Minkowski) gradient there.
    start : array_like, shape (n + 1,)
    alpha : float
        Constant learning rate, ``> 0``.
    stop : StoppingRule
    keep_trace : bool
        Whether to keep every iterate.

    Raises
    ------
    NonFiniteError
        If the gradient or an iterate becomes non-finite.
    """
    if not alpha > 0:
        raise ValueError(f"learning rate must be positive, got {alpha}")
    theta = validate(start)
    points = [theta] if keep_trace else None
    iterations = 0
    while True:
        if stop.target is not None and distance(theta, stop.target) < stop.arrival_radius:
            reason = "arrived"
            gn = float("nan")
            break
        g = np.asarray(grad_fn(theta), dtype=np.float64)
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"gradient is non-finite at iteration {iterations}: {g}")
        g = project_to_tangent(theta, g)
        gn = float(_norm(g))
        if gn == 0.0 or (
            stop.grad_norm_threshold is not None and gn < stop.grad_norm_threshold
        ):
            reason = "converged"
            break
        if iterations >= stop.max_iters:
            reason = "max_iters"
            break
        theta = exp_map(theta, -alpha * g)
        if not np.all(np.isfinite(theta)):
            raise NonFiniteError(f"iterate became non-finite at iteration {iterations + 1}")
        iterations += 1
        if keep_trace:
            points.append(theta)
    return DescentTrace(theta, iterations, reason, gn, points)
