"""The unit sphere S^n, the positively curved twin of the hyperboloid.

Same three operations as :mod:`hypergrad.hyperboloid` with the Euclidean dot
product in place of the Minkowski form, cos/sin in place of cosh/sinh, and
the opposite sign in the tangent projection.  Kept for cross-checking the
hyperboloid code paths.
"""

import numpy as np

SMALL_STEP = 1e-9


def _dot(u, v):
    n = u.shape[-1]
    acc = u[..., 0] * v[..., 0]
    for i in range(1, n):
        acc = acc + u[..., i] * v[..., i]
    return acc


def validate(x, tol=1e-9):
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(np.sqrt(_dot(x, x)) - 1.0) > tol):
        raise ValueError("point is not on the unit sphere")
    return x


def sphere_distance(u, v):
    """Great-circle distance ``arccos(<u, v>)``, in ``[0, pi]``."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    return np.arccos(np.clip(_dot(u, v), -1.0, 1.0))


def sphere_project(p, g):
    """Project ``g`` onto the tangent space at ``p``: ``g - <p, g> p``."""
    p = np.asarray(p, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    return g - _dot(p, g)[..., None] * p


def sphere_exp(p, v):
    """Exponential map ``cos(|v|) p + sin(|v|) v / |v|`` on the sphere."""
    p = np.asarray(p, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nv = np.sqrt(_dot(v, v))[..., None]
    small = nv < SMALL_STEP
    safe = np.where(small, 1.0, nv)
    out = np.where(small, p + v, np.cos(nv) * p + (np.sin(nv) / safe) * v)
    return out / np.sqrt(_dot(out, out))[..., None]
