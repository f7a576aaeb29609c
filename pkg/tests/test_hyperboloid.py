import numpy as np
import pytest

from hypergrad.errors import CoincidentPointsError, NonFiniteError, OffManifoldError, UnrenormalizableError
from hypergrad.frechet import objective_gradient
from hypergrad.hyperboloid import (
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
from hypergrad.minkowski import minkowski_form
from hypergrad.poincare import pb_distance, to_ball

from helpers import (
    fd_tangent_gradient,
    hyperboloid_dist,
    mform,
    orthonormal_tangent_frame,
    random_points,
)

S1, C1 = np.sinh(1.0), np.cosh(1.0)
X1 = np.array([S1, 0.0, C1])


def test_base_point():
    b = base_point(2)
    np.testing.assert_array_equal(b, [0, 0, 1])
    assert minkowski_form(b, b) == -1.0
    assert distance(b, b) == 0.0
    with pytest.raises(ValueError):
        base_point(0)


def test_validate():
    validate([0, 0, 1])
    validate(X1)
    with pytest.raises(OffManifoldError):
        validate([0, 0, -1])
    with pytest.raises(OffManifoldError) as info:
        validate([0.1, 0, 1])
    assert info.value.residual == pytest.approx(0.01)


def test_renormalize():
    np.testing.assert_array_equal(renormalize([0, 0, 2.0]), [0, 0, 1])
    np.testing.assert_allclose(renormalize(X1), X1, atol=1e-15, rtol=0)
    np.testing.assert_allclose(renormalize(1.0001 * X1), X1, atol=1e-12, rtol=0)
    for bad in ([1.0, 0, 0], [0, 0, -1.0]):
        with pytest.raises(UnrenormalizableError):
            renormalize(bad)


def test_distance_examples():
    b = base_point(2)
    assert distance(b, b) == 0.0
    assert distance(b, X1) == pytest.approx(1.0, abs=1e-15)


def test_distance_matches_ball_model(rng):
    U = random_points(rng, 100, max_radius=4)
    V = random_points(rng, 100, max_radius=4)
    np.testing.assert_allclose(distance(U, V), pb_distance(to_ball(U), to_ball(V)), atol=1e-9, rtol=0)


def test_distance_matches_arccosh_formula(rng):
    U = random_points(rng, 200, max_radius=4)
    V = random_points(rng, 200, max_radius=4)
    expected = [hyperboloid_dist(u, v) for u, v in zip(U, V)]
    np.testing.assert_allclose(distance(U, V), expected, rtol=1e-10, atol=2e-7)


def test_distance_accurate_for_close_far_points():
    # arccosh(-<u,v>) has ~1e-6 noise here; the chord form must not.
    p = np.array([np.sinh(6.0), 0.0, np.cosh(6.0)])
    w = tangent_basis(p)[1]
    for t in (1e-3, 1e-5, 1e-7):
        assert distance(p, exp_map(p, t * w)) == pytest.approx(t, rel=1e-6)


def test_distance_symmetric_nonnegative(rng):
    U = random_points(rng, 50)
    V = random_points(rng, 50)
    assert np.all(distance(U, V) >= 0)
    np.testing.assert_array_equal(distance(U, V), distance(V, U))


def test_project_examples():
    b = base_point(2)
    np.testing.assert_array_equal(project_to_tangent(b, [1.0, 2.0, 3.0]), [1, 2, 0])
    np.testing.assert_allclose(project_to_tangent(X1, X1), 0.0, atol=1e-15)


def test_project_properties(rng):
    for p in random_points(rng, 20, n=3):
        g = rng.normal(size=4)
        t = project_to_tangent(p, g)
        assert abs(mform(p, t)) <= 1e-9 * np.cosh(3) ** 2
        np.testing.assert_allclose(project_to_tangent(p, t), t, atol=1e-12 * np.abs(g).max() * 1e3)
        h = orthonormal_tangent_frame(p)[0]
        # Self-adjoint against tangent vectors.
        assert minkowski_form(t, h) == pytest.approx(mform(g, h), abs=1e-9)


def test_exp_examples():
    b = base_point(2)
    np.testing.assert_allclose(exp_map(b, [1.0, 0.0, 0.0]), X1, atol=1e-15)
    np.testing.assert_array_equal(exp_map(X1, np.zeros(3)), X1)


def test_exp_small_step_branch():
    b = base_point(2)
    v = np.array([1e-10, 0.0, 0.0])
    out = exp_map(b, v)
    np.testing.assert_allclose(out, [1e-10, 0.0, 1.0], atol=1e-20)
    assert minkowski_form(out, out) == pytest.approx(-1.0, abs=1e-15)


def test_exp_geodesic_property(rng):
    for p in random_points(rng, 100, n=3):
        w = orthonormal_tangent_frame(p)[0]
        q = exp_map(p, 0.5 * w)
        assert distance(p, q) == pytest.approx(0.5, abs=1e-10)
        assert abs(minkowski_form(q, q) + 1) <= 1e-9 * max(1.0, q[-1] ** 2)


def test_exp_distance_additive(rng):
    p = random_points(rng, 1)[0]
    w = orthonormal_tangent_frame(p)[1]
    for s, t in [(0.3, 0.9), (1.0, 2.5), (2.0, 5.0)]:
        assert distance(p, exp_map(p, (s + t) * w)) == pytest.approx(s + t, abs=1e-9)


def test_exp_closure_long_steps(rng):
    for p in random_points(rng, 30):
        w = orthonormal_tangent_frame(p)[0]
        for t in (0.1, 3.0, 10.0):
            q = exp_map(p, t * w)
            assert abs(minkowski_form(q, q) + 1) / q[-1] ** 2 <= 1e-12
            assert distance(p, q) == pytest.approx(t, abs=1e-9)


def test_distance_gradient_example():
    g = distance_gradient(base_point(2), X1)
    np.testing.assert_allclose(g, -X1 / S1, rtol=1e-15)
    np.testing.assert_allclose(g, [-1.0, 0.0, -1.313035285499331], rtol=1e-12)


def test_distance_gradient_coincident():
    with pytest.raises(CoincidentPointsError):
        distance_gradient(X1, X1)


def test_distance_gradient_matches_finite_differences(rng):
    U = random_points(rng, 100)
    V = random_points(rng, 100)
    for u, v in zip(U, V):
        if distance(u, v) < 0.1:
            continue
        grad = project_to_tangent(u, distance_gradient(u, v))
        frame, fd = fd_tangent_gradient(lambda x: hyperboloid_dist(x, v), u)
        analytic = np.array([mform(grad, e) for e in frame])
        assert np.linalg.norm(fd - analytic) <= 1e-6 * np.linalg.norm(analytic)


def test_distance_gradient_unit_norm(rng):
    U = random_points(rng, 100, max_radius=4)
    V = random_points(rng, 100, max_radius=4)
    for u, v in zip(U, V):
        grad = project_to_tangent(u, distance_gradient(u, v))
        assert np.sqrt(minkowski_form(grad, grad)) == pytest.approx(1.0, abs=1e-8)


def test_tangent_basis_orthonormal(rng):
    for p in random_points(rng, 10, n=3):
        B = tangent_basis(p)
        gram = np.array([[mform(a, b) for b in B] for a in B])
        np.testing.assert_allclose(gram, np.eye(3), atol=1e-10)
        assert np.all(np.abs([mform(p, b) for b in B]) < 1e-9)


# -- gradient descent loop --------------------------------------------------

def test_descent_zero_gradient():
    start = X1
    trace = gradient_descent(lambda x: np.zeros(3), start, 0.5, StoppingRule(max_iters=10))
    assert trace.iterations == 0
    assert trace.reason == "converged"
    np.testing.assert_array_equal(trace.final, start)


def test_descent_single_point_frechet(rng):
    x = random_points(rng, 1)[0]
    start = base_point(2)
    trace = gradient_descent(
        lambda t: objective_gradient(t, x[None]), start, 0.5,
        StoppingRule(max_iters=100, grad_norm_threshold=1e-12),
    )
    assert distance(trace.final, x) < 1e-9


def test_descent_five_points_monotone(rng):
    from hypergrad.frechet import objective

    X = random_points(rng, 5)
    trace = gradient_descent(
        lambda t: objective_gradient(t, X), X[0], 0.1,
        StoppingRule(max_iters=10_000, grad_norm_threshold=1e-9),
    )
    assert trace.reason == "converged"
    assert trace.grad_norm < 1e-9
    values = [objective(p, X) for p in trace.points]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    for p in trace.points:
        assert abs(minkowski_form(p, p) + 1) <= 1e-9 * max(1.0, p[-1] ** 2)


def test_descent_arrival_and_cap():
    target = X1
    rule = StoppingRule(max_iters=3, target=target, arrival_radius=1e-3)
    trace = gradient_descent(lambda t: objective_gradient(t, target[None]), base_point(2), 0.01, rule)
    assert trace.reason == "max_iters" and trace.iterations == 3
    trace = gradient_descent(lambda t: objective_gradient(t, target[None]), target, 0.01, rule)
    assert trace.reason == "arrived" and trace.iterations == 0


def test_descent_rejects_nonfinite_gradient():
    with pytest.raises(NonFiniteError):
        gradient_descent(lambda t: np.full(3, np.nan), base_point(2), 0.1, StoppingRule())


def test_descent_rejects_bad_rate():
    with pytest.raises(ValueError):
        gradient_descent(lambda t: np.zeros(3), base_point(2), 0.0, StoppingRule())


def test_stopping_rule_validation():
    with pytest.raises(ValueError):
        StoppingRule(target=base_point(2))
    with pytest.raises(ValueError):
        StoppingRule(max_iters=-1)
