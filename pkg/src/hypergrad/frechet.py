"""Frechet mean on H^n: objective, gradient, reference solver and the two
competing update schemes.

The exponential scheme moves along geodesics of the hyperboloid.  The
retraction scheme maps the iterate and its Riemannian gradient to the
Poincare ball, takes an additive step there and lifts the result back.

Single-trial functions are thin wrappers around batched engines
(:func:`descend_batch`, :func:`solve_reference_batch`) that run many
independent trials at once.  Every trial in a batch is computed
independently, so its result does not depend on what else is in the batch.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NoConvergenceError, NonFiniteError
from .hyperboloid import distance, exp_map, project_to_tangent, validate
from .minkowski import _norm
from .poincare import from_ball, push_forward, retraction_step, to_ball

METHODS = ("exponential", "retraction")
#: Distance below which d / sinh(d) is replaced by its series 1 - d^2 / 6.
SERIES_DIST = 1e-4

REFERENCE_ALPHA = 0.1
REFERENCE_THRESHOLD = 1e-9
REFERENCE_CAP = 100_000


def as_point_cloud(points):
    """Validate a collection of distinct hyperboloid points, shape (s, n+1)."""
    X = validate(np.atleast_2d(np.asarray(points, dtype=np.float64)))
    if X.ndim != 2:
        raise ValueError(f"point cloud must have shape (s, n+1), got {X.shape}")
    s = X.shape[0]
    for i in range(s):
        for j in range(i + 1, s):
            if distance(X[i], X[j]) == 0.0:
                raise ValueError(f"points {i} and {j} of the cloud coincide")
    return X


def objective(theta, X):
    """Mean squared distance ``(1/s) sum_i d(theta, x_i)^2``.

    ``theta`` has shape ``(..., n+1)`` and ``X`` shape ``(..., s, n+1)``.
    """
    theta = np.asarray(theta, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    d = distance(theta[..., None, :], X)
    s = X.shape[-2]
    acc = d[..., 0] ** 2
    for i in range(1, s):
        acc = acc + d[..., i] ** 2
    return acc / s


def _dist_over_sinh(d):
    small = d < SERIES_DIST
    return np.where(small, 1.0 - d * d / 6.0, d / np.sinh(np.where(small, 1.0, d)))


def objective_gradient(theta, X):
    """Ambient (Minkowski) gradient of :func:`objective`.

    ``(2/s) sum_i -d_i (<theta, x_i>^2 - 1)^{-1/2} x_i`` where the factor
    ``d / sqrt(<theta, x>^2 - 1)`` equals ``d / sinh(d)``; it is evaluated in
    that form, with the series ``1 - d^2/6`` for ``d < 1e-4`` so that the
    coincident-point limit is finite.  Project with
    :func:`~hypergrad.hyperboloid.project_to_tangent` for the Riemannian
    gradient.
    """
    theta = np.asarray(theta, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    f = _dist_over_sinh(distance(theta[..., None, :], X))
    terms = f[..., None] * X
    s = X.shape[-2]
    acc = terms[..., 0, :]
    for i in range(1, s):
        acc = acc + terms[..., i, :]
    return (-2.0 / s) * acc


def riemannian_gradient(theta, X):
    """Gradient of :func:`objective` on the hyperboloid."""
    return project_to_tangent(theta, objective_gradient(theta, X))


def exponential_update(theta, X, alpha):
    """One exact step ``Exp_theta(-alpha * grad)``."""
    return exp_map(theta, -alpha * riemannian_gradient(theta, X))


def retraction_update(theta, X, alpha):
    """One retraction step taken in the Poincare ball.

    The iterate and its Riemannian gradient are pushed to the ball, the
    additive update (with boundary rescue) is applied there and the result
    is lifted back to the hyperboloid.
    """
    g = riemannian_gradient(theta, X)
    psi = retraction_step(to_ball(theta), push_forward(theta, g), alpha)
    return from_ball(psi)


_UPDATES = {"exponential": exponential_update, "retraction": retraction_update}


@dataclass
class BatchOutcome:
    """Per-trial results of :func:`descend_batch`.

    ``steps`` is -1 for trials that did not arrive within the cap (or
    diverged); ``diverged`` marks trials whose iterate became non-finite.
    """

    steps: np.ndarray
    final_distance: np.ndarray
    diverged: np.ndarray
    final: np.ndarray
    traces: Optional[list] = field(default=None, repr=False)


def descend_batch(method, clouds, theta0, alphas, targets, tol=1e-4, cap=1000,
                  keep_trace=False):
    """Run many steps-to-arrival trials of one update scheme at once.

    Parameters
    ----------
    method : {"exponential", "retraction"}
    clouds : ndarray, shape (B, s, n+1)
    theta0, targets : ndarray, shape (B, n+1)
    alphas : ndarray, shape (B,)
    tol : float
        Arrival radius; a trial arrives at the first ``k`` with
        ``d(theta_k, target) < tol``, checked before any update and after
        each one.
    cap : int
        Maximum number of updates per trial.
    keep_trace : bool
        Keep every iterate of every trial.
    """
    if method not in _UPDATES:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    update = _UPDATES[method]
    clouds = np.asarray(clouds, dtype=np.float64)
    theta = np.array(theta0, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    alphas = np.asarray(alphas, dtype=np.float64)
    if np.any(alphas <= 0):
        raise ValueError("learning rates must be positive")
    B = theta.shape[0]

    steps = np.full(B, -1, dtype=np.int64)
    diverged = np.zeros(B, dtype=bool)
    final_distance = distance(theta, targets)
    traces = [[theta[i].copy()] for i in range(B)] if keep_trace else None

    steps[final_distance < tol] = 0
    active = np.flatnonzero(steps < 0)
    k = 0
    while active.size and k < cap:
        k += 1
        T = update(theta[active], clouds[active], alphas[active, None])
        finite = np.all(np.isfinite(T), axis=-1)
        d = distance(T, targets[active])
        theta[active] = T
        final_distance[active] = np.where(finite, d, np.inf)
        if keep_trace:
            for j, i in enumerate(active):
                traces[i].append(T[j].copy())
        diverged[active[~finite]] = True
        arrived = finite & (d < tol)
        steps[active[arrived]] = k
        active = active[finite & ~arrived]

    if keep_trace:
        traces = [np.array(t) for t in traces]
    return BatchOutcome(steps, final_distance, diverged, theta, traces)


@dataclass
class DescentOutcome:
    """One steps-to-arrival measurement.

    ``steps`` is ``None`` when the target was not reached within the cap.
    ``trace_length`` is the number of iterates produced, start included.
    """

    steps: Optional[int]
    trace_length: int
    final_distance_to_target: float
    trace: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def arrived(self):
        return self.steps is not None


def _descend(method, X, theta0, alpha, target, tol, cap, keep_trace):
    X = as_point_cloud(X)
    theta0 = validate(theta0)
    target = validate(target)
    out = descend_batch(method, X[None], theta0[None], np.array([alpha], dtype=float),
                        target[None], tol, cap, keep_trace=True)
    trace = out.traces[0]
    if out.diverged[0]:
        raise NonFiniteError(
            f"{method} descent produced a non-finite iterate after {len(trace) - 1} updates"
        )
    steps = int(out.steps[0])
    return DescentOutcome(
        None if steps < 0 else steps,
        len(trace),
        float(out.final_distance[0]),
        trace if keep_trace else None,
    )


def descend_exponential(X, theta0, alpha, target, tol=1e-4, cap=1000, keep_trace=False):
    """Count exponential-map updates until ``theta`` is within ``tol`` of ``target``."""
    return _descend("exponential", X, theta0, alpha, target, tol, cap, keep_trace)


def descend_retraction(X, theta0, alpha, target, tol=1e-4, cap=1000, keep_trace=False):
    """Count retraction updates until ``theta`` is within ``tol`` of ``target``.

    Arrival is measured with the hyperboloid distance after lifting the
    ball iterate back.
    """
    return _descend("retraction", X, theta0, alpha, target, tol, cap, keep_trace)


@dataclass
class ReferenceBatch:
    theta: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    grad_norm: np.ndarray


def solve_reference_batch(clouds, starts, alpha=REFERENCE_ALPHA,
                          threshold=REFERENCE_THRESHOLD, cap=REFERENCE_CAP):
    """Run exponential descent on each cloud until its gradient vanishes.

    The gradient norm is checked before every update; a trial stops once it
    is below ``threshold`` or after ``cap`` updates.
    """
    clouds = np.asarray(clouds, dtype=np.float64)
    theta = np.array(starts, dtype=np.float64)
    B = theta.shape[0]
    iterations = np.zeros(B, dtype=np.int64)
    converged = np.zeros(B, dtype=bool)
    grad_norm = np.full(B, np.inf)
    active = np.arange(B)
    while active.size:
        g = riemannian_gradient(theta[active], clouds[active])
        gn = _norm(g)
        grad_norm[active] = gn
        done = gn < threshold
        converged[active[done]] = True
        # Non-finite gradients can never meet the threshold; stop those too.
        exhausted = (iterations[active] >= cap) | ~np.isfinite(gn)
        keep = ~done & ~exhausted
        active, g = active[keep], g[keep]
        if not active.size:
            break
        theta[active] = exp_map(theta[active], -alpha * g)
        iterations[active] += 1
    return ReferenceBatch(theta, iterations, converged, grad_norm)


def solve_reference(X, start=None, alpha=REFERENCE_ALPHA,
                    threshold=REFERENCE_THRESHOLD, cap=REFERENCE_CAP):
    """Frechet mean of a point cloud by low-rate exponential descent.

    Starts from ``start`` (default: the first point of the cloud) and stops
    once the Riemannian gradient norm is below ``threshold``.  The objective
    is convex on H^n, so the result is the unique minimizer.

    Raises
    ------
    NoConvergenceError
        If the gradient has not vanished after ``cap`` updates.
    """
    X = as_point_cloud(X)
    start = X[0] if start is None else validate(start)
    out = solve_reference_batch(X[None], start[None], alpha, threshold, cap)
    if not out.converged[0]:
        raise NoConvergenceError(
            f"reference solve did not converge in {out.iterations[0]} updates "
            f"(gradient norm {out.grad_norm[0]:.3e})",
            int(out.iterations[0]),
            float(out.grad_norm[0]),
        )
    return out.theta[0]
