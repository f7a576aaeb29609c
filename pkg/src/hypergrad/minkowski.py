"""Linear algebra of (n+1)-dimensional Minkowski space.

Vectors are numpy arrays whose last axis holds the n+1 coordinates; the
final coordinate is the timelike one.  All functions broadcast over leading
axes, so a batch of vectors is simply an array of shape ``(..., n + 1)``.
"""

import numpy as np

from .errors import DimensionMismatchError, NonFiniteError, NotSpacelikeError

#: Absolute tolerance used to classify a vector as spacelike.
FORM_EPS = 1e-9


def as_vector(x):
    """Return ``x`` as a float64 array of Minkowski vectors.

    Raises
    ------
    DimensionMismatchError
        If the last axis has fewer than two coordinates.
    NonFiniteError
        If any entry is NaN or infinite.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0 or x.shape[-1] < 2:
        raise DimensionMismatchError(
            f"Minkowski vectors need at least 2 coordinates, got shape {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise NonFiniteError("Minkowski vector has non-finite entries")
    return x


def minkowski_form(u, v):
    """Indefinite bilinear form ``sum_i u_i v_i - u_{n+1} v_{n+1}``.

    The spatial terms are accumulated strictly left to right so that the
    result is bit-reproducible irrespective of array layout or batch size.

    Parameters
    ----------
    u, v : array_like, shape (..., n + 1)
        Vectors with the same number of coordinates; leading axes broadcast.

    Returns
    -------
    form : ndarray or float, shape (...)
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape[-1:] != v.shape[-1:]:
        raise DimensionMismatchError(
            f"dimension mismatch: {u.shape[-1:]} vs {v.shape[-1:]}"
        )
    n = u.shape[-1] - 1
    acc = u[..., 0] * v[..., 0]
    for i in range(1, n):
        acc = acc + u[..., i] * v[..., i]
    return acc - u[..., n] * v[..., n]


def ambient_gradient(partials):
    """Turn raw partial derivatives into the Minkowski-space gradient.

    The gradient with respect to the indefinite form is the vector of
    partials with the sign of the last (timelike) entry flipped.  The map is
    a linear involution.
    """
    g = np.array(as_vector(partials), dtype=np.float64, copy=True)
    g[..., -1] = -g[..., -1]
    return g


def spacelike_norm(v, eps=FORM_EPS):
    """Norm ``sqrt(<v, v>)`` of a spacelike (tangent) vector.

    Squares in ``[-eps, 0)`` are treated as round-off and give 0.

    Raises
    ------
    NotSpacelikeError
        If ``<v, v> < -eps`` for any vector in the batch.
    """
    sq = minkowski_form(v, v)
    if np.any(sq < -eps):
        raise NotSpacelikeError(
            f"vector is not spacelike: <v, v> = {np.min(sq):.3e}"
        )
    return np.sqrt(np.maximum(sq, 0.0))


def _norm(v):
    # Unchecked variant for inner loops where v is tangent by construction.
    return np.sqrt(np.maximum(minkowski_form(v, v), 0.0))
