"""Independent oracles and input generators shared by the tests.

Nothing here calls into hypergrad, so the checks built on these helpers do
not share code with the paths they verify.
"""

import numpy as np


def mform(u, v):
    return float(np.dot(u[:-1], v[:-1]) - u[-1] * v[-1])


def hyperboloid_point(v):
    """End point of the radial geodesic from the origin with spatial part v."""
    v = np.asarray(v, dtype=float)
    r = np.linalg.norm(v)
    if r == 0:
        return np.concatenate([np.zeros_like(v), [1.0]])
    return np.concatenate([np.sinh(r) * v / r, [np.cosh(r)]])


def random_points(rng, count, n=2, max_radius=3.0):
    """Points at uniformly random direction and radius in [0, max_radius]."""
    out = []
    for _ in range(count):
        d = rng.normal(size=n)
        d /= np.linalg.norm(d)
        out.append(hyperboloid_point(d * rng.uniform(0.0, max_radius)))
    return np.array(out)


def orthonormal_tangent_frame(p):
    """Tangent frame at p via Minkowski Gram-Schmidt on random vectors."""
    n = len(p) - 1
    rng = np.random.default_rng(1)
    frame = []
    while len(frame) < n:
        g = rng.normal(size=n + 1)
        t = g + mform(p, g) * p
        for b in frame:
            t = t - mform(t, b) * b
        t = t + mform(p, t) * p
        nt = np.sqrt(mform(t, t))
        if nt > 1e-6:
            frame.append(t / nt)
    return np.array(frame)


def geodesic(p, w, t):
    """cosh(t) p + sinh(t) w for unit tangent w; written without the library."""
    return np.cosh(t) * p + np.sinh(t) * w


def fd_tangent_gradient(f, p, h=1e-6):
    """Central differences of f along geodesics in an orthonormal frame at p.

    Returns (frame, derivatives) where derivatives[j] approximates the
    directional derivative of f along frame[j].
    """
    frame = orthonormal_tangent_frame(p)
    der = np.array([(f(geodesic(p, e, h)) - f(geodesic(p, e, -h))) / (2 * h) for e in frame])
    return frame, der


def hyperboloid_dist(u, v):
    """Plain arccosh formula, used as an oracle for well-separated points."""
    return float(np.arccosh(max(-mform(u, v), 1.0)))
