"""Uniform sampling of hyperbolic discs (n = 2) by inversion sampling.

A uniform point of the disc of radius ``r_max`` about a centre is obtained
by picking a uniformly random tangent direction at the centre and a radius
whose CDF is the fraction of the disc area covered, then following the
geodesic.

Randomness comes from keyed streams: each (seed, key) pair gives its own
independent generator, so the samples of a centre or a collection do not
depend on the order or process in which they are generated.
"""

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedDimensionError
from .hyperboloid import base_point, exp_map, tangent_basis, validate

CENTER_STREAM = 0
CLOUD_STREAM = 1


def keyed_rng(seed, *key):
    """Independent generator for the stream ``key`` under a master seed."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def disc_area(r):
    """Area ``2 pi (cosh r - 1)`` of a hyperbolic disc of radius ``r``."""
    # cosh r - 1 == 2 sinh(r/2)^2, which keeps precision for small r.
    return 4.0 * np.pi * np.sinh(0.5 * np.asarray(r, dtype=np.float64)) ** 2


def radial_cdf(r, r_max):
    """``P(R < r) = (cosh r - 1) / (cosh r_max - 1)`` on ``[0, r_max]``."""
    r = np.clip(np.asarray(r, dtype=np.float64), 0.0, r_max)
    return (np.sinh(0.5 * r) / np.sinh(0.5 * r_max)) ** 2


def radius_from_quantile(p, r_max):
    """Inverse of :func:`radial_cdf`: ``arccosh(1 + p (cosh r_max - 1))``.

    Evaluated as ``2 asinh(sqrt(p) sinh(r_max / 2))``, the same function
    without the loss of precision of ``arccosh`` near 1.
    """
    p = np.asarray(p, dtype=np.float64)
    return 2.0 * np.arcsinh(np.sqrt(p) * np.sinh(0.5 * r_max))


def sample_radius(r_max, rng, size=None):
    """Draw radii distributed like the distance of a uniform disc point."""
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    return radius_from_quantile(rng.random(size), r_max)


def sample_disc_point(center, r_max, rng, size=None):
    """Uniform sample(s) from the disc of radius ``r_max`` about ``center``.

    Each sample draws a quantile and an angle (in that order) from ``rng``.
    The angle is measured in an orthonormal basis of the tangent plane at
    ``center``; by isotropy any such basis gives the same distribution.

    Raises
    ------
    UnsupportedDimensionError
        If ``center`` is not a point of H^2.
    """
    center = validate(center)
    if center.shape != (3,):
        raise UnsupportedDimensionError(
            f"uniform disc sampling is only implemented for n = 2, got a point of shape {center.shape}"
        )
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    shape = () if size is None else (size,)
    u = rng.random(shape + (2,))
    r = radius_from_quantile(u[..., 0], r_max)
    angle = 2.0 * np.pi * u[..., 1]
    e1, e2 = tangent_basis(center)
    w = np.cos(angle)[..., None] * e1 + np.sin(angle)[..., None] * e2
    return exp_map(center, r[..., None] * w)


@dataclass
class ExperimentInputs:
    """Sampled centres, shape (C, 3), and clouds, shape (C, K, s, 3)."""

    centers: np.ndarray
    clouds: np.ndarray
    seed: int
    r_max: float

    def __iter__(self):
        return iter(zip(self.centers, self.clouds))

    def __len__(self):
        return len(self.centers)


def sample_center(c, r_max, seed):
    return sample_disc_point(base_point(2), r_max, keyed_rng(seed, CENTER_STREAM, c))


def sample_cloud(center, c, k, s, r_max, seed):
    return sample_disc_point(center, r_max, keyed_rng(seed, CLOUD_STREAM, c, k), size=s)


def sample_experiment_inputs(r_max=3.0, num_centers=50, collections_per_center=50, s=5, seed=0):
    """Two-level sampling of the experiment inputs.

    ``num_centers`` centres are drawn uniformly from the disc of radius
    ``r_max`` about the base point of H^2; around each, every one of the
    ``collections_per_center`` clouds consists of ``s`` points drawn from the
    disc of the same radius about that centre.
    """
    if min(num_centers, collections_per_center, s) < 1:
        raise ValueError("all counts must be >= 1")
    centers = np.array([sample_center(c, r_max, seed) for c in range(num_centers)])
    clouds = np.array([
        [sample_cloud(centers[c], c, k, s, r_max, seed) for k in range(collections_per_center)]
        for c in range(num_centers)
    ])
    return ExperimentInputs(centers, clouds, int(seed), float(r_max))
