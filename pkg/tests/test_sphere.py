import numpy as np
import pytest

from hypergrad import hyperboloid as H
from hypergrad import sphere as S

from helpers import mform, orthonormal_tangent_frame, random_points


def test_distance_examples():
    e1, e2 = np.eye(3)[:2]
    assert S.sphere_distance(e1, e1) == 0.0
    assert S.sphere_distance(e1, e2) == pytest.approx(np.pi / 2, abs=1e-15)
    assert S.sphere_distance(e1, -e1) == pytest.approx(np.pi, abs=1e-15)


def test_distance_clamps_roundoff():
    u = np.array([1.0, 1e-17, 0.0])
    assert S.sphere_distance(u * (1 + 1e-16), u) == 0.0


def test_project_examples():
    e3 = np.eye(3)[2]
    np.testing.assert_array_equal(S.sphere_project(e3, [1.0, 2.0, 3.0]), [1, 2, 0])
    np.testing.assert_array_equal(S.sphere_project(e3, e3), 0.0)
    t = np.array([0.3, -0.2, 0.0])
    np.testing.assert_array_equal(S.sphere_project(e3, t), t)


def test_exp_examples():
    e1, _, e3 = np.eye(3)
    np.testing.assert_allclose(S.sphere_exp(e3, (np.pi / 2) * e1), e1, atol=1e-15)
    np.testing.assert_array_equal(S.sphere_exp(e3, np.zeros(3)), e3)
    small = S.sphere_exp(e3, 1e-12 * e1)
    assert np.linalg.norm(small) == pytest.approx(1.0, abs=1e-15)


def test_validate():
    S.validate([0.0, 0.6, 0.8])
    with pytest.raises(ValueError):
        S.validate([0.0, 0.0, 2.0])


def _sphere_point(rng, n=2):
    x = rng.normal(size=n + 1)
    return x / np.linalg.norm(x)


def _sphere_frame(p, rng):
    g = rng.normal(size=len(p))
    t = g - np.dot(g, p) * p
    return t / np.linalg.norm(t)


# Shared template: each manifold supplies its inner product, the sign used
# in the tangent projection and the (cos, sin) or (cosh, sinh) pair.
SPHERE = dict(
    inner=lambda u, v: float(np.dot(u, v)),
    sign=-1.0,
    trig=(np.cos, np.sin),
    point=lambda rng: _sphere_point(rng),
    unit_tangent=lambda p, rng: _sphere_frame(p, rng),
    project=S.sphere_project,
    exp=S.sphere_exp,
    dist=S.sphere_distance,
    max_t=3.0,
)
HYPERBOLOID = dict(
    inner=mform,
    sign=+1.0,
    trig=(np.cosh, np.sinh),
    point=lambda rng: random_points(rng, 1)[0],
    unit_tangent=lambda p, rng: orthonormal_tangent_frame(p)[0],
    project=H.project_to_tangent,
    exp=H.exp_map,
    dist=H.distance,
    max_t=5.0,
)


@pytest.fixture(params=[SPHERE, HYPERBOLOID], ids=["sphere", "hyperboloid"])
def manifold(request):
    return request.param


def test_projection_sign(manifold, rng):
    m = manifold
    for _ in range(20):
        p = m["point"](rng)
        g = rng.normal(size=3)
        expected = g + m["sign"] * m["inner"](p, g) * p
        np.testing.assert_allclose(m["project"](p, g), expected, rtol=1e-14, atol=1e-14)
        t = m["project"](p, g)
        assert abs(m["inner"](p, t)) <= 1e-9 * max(1.0, abs(p).max() ** 2)
        np.testing.assert_allclose(m["project"](p, t), t, atol=1e-9)


def test_exp_formula(manifold, rng):
    m = manifold
    c, s = m["trig"]
    for _ in range(20):
        p = m["point"](rng)
        w = m["unit_tangent"](p, rng)
        t = rng.uniform(0.1, m["max_t"])
        np.testing.assert_allclose(m["exp"](p, t * w), c(t) * p + s(t) * w, rtol=1e-10, atol=1e-12)


def test_exp_geodesic_distance(manifold, rng):
    m = manifold
    for _ in range(50):
        p = m["point"](rng)
        w = m["unit_tangent"](p, rng)
        t = rng.uniform(1e-3, m["max_t"])
        q = m["exp"](p, t * w)
        assert m["dist"](p, q) == pytest.approx(t, abs=1e-9)
        # The result stays on the manifold: <q, q> = -sign.
        assert m["inner"](q, q) == pytest.approx(-m["sign"], rel=1e-12 * max(1.0, q[-1] ** 2))


def test_exp_zero(manifold, rng):
    p = manifold["point"](rng)
    np.testing.assert_allclose(manifold["exp"](p, np.zeros(3)), p, rtol=1e-15)
