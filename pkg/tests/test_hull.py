import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize

from safeol.hull import (
    ball_lattice,
    caratheodory_reduce,
    fibonacci_directions,
    project_onto_hull,
    project_simplex,
)


def _slsqp_projection(P, x):
    n = len(P)
    res = minimize(lambda w: np.sum((w @ P - x) ** 2), np.full(n, 1.0 / n), method="SLSQP",
                   bounds=[(0, 1)] * n, constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1}],
                   options={"ftol": 1e-14, "maxiter": 500})
    return res.x @ P


def test_midpoint_of_segment():
    proj = project_onto_hull(np.array([[-1.0], [1.0]]), np.array([0.0]))
    order = np.argsort(proj.indices)
    np.testing.assert_allclose(proj.weights[order], [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(proj.point, [0.0], atol=1e-12)


def test_point_in_pool_is_fixed():
    P = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    proj = project_onto_hull(P, P[1])
    assert list(proj.indices) == [1]
    np.testing.assert_allclose(proj.point, P[1])


def test_outside_point_lands_on_facet():
    P = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    proj = project_onto_hull(P, np.array([1.0, 1.0]))
    np.testing.assert_allclose(proj.point, [0.5, 0.5], atol=1e-9)
    assert proj.converged


def test_matches_generic_solver(rng):
    for _ in range(5):
        P = rng.standard_normal((12, 3))
        x = 2.0 * rng.standard_normal(3)
        proj = project_onto_hull(P, x, tol=1e-12)
        np.testing.assert_allclose(proj.point, _slsqp_projection(P, x), atol=1e-5)
        assert len(proj.indices) <= 4


def test_warm_start_gives_same_answer(rng):
    P = rng.standard_normal((40, 2))
    x = np.array([3.0, -1.0])
    cold = project_onto_hull(P, x)
    warm = project_onto_hull(P, x + 1e-3, init=cold.indices)
    again = project_onto_hull(P, x + 1e-3)
    np.testing.assert_allclose(warm.point, again.point, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4))
def test_projection_is_nonexpansive(seed, d):
    r = np.random.default_rng(seed)
    P = r.standard_normal((15, d))
    x, y = r.standard_normal(d) * 2, r.standard_normal(d) * 2
    px = project_onto_hull(P, x, tol=1e-12).point
    py = project_onto_hull(P, y, tol=1e-12).point
    assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4), st.integers(2, 12))
def test_caratheodory_keeps_point(seed, d, n):
    r = np.random.default_rng(seed)
    P = r.standard_normal((n, d))
    w = r.random(n)
    w /= w.sum()
    idx, v = caratheodory_reduce(P, w)
    assert len(idx) <= d + 1
    assert np.all(v >= 0)
    np.testing.assert_allclose(v.sum(), 1.0)
    np.testing.assert_allclose(v @ P[idx], w @ P, atol=1e-9)


def test_simplex_projection_examples():
    np.testing.assert_allclose(project_simplex([0.2, 0.3, 0.5]), [0.2, 0.3, 0.5])
    np.testing.assert_allclose(project_simplex([2.0, 0.0]), [1.0, 0.0])
    np.testing.assert_allclose(project_simplex([1.0, 1.0]), [0.5, 0.5])


@pytest.mark.parametrize("d,n", [(1, 2), (2, 64), (3, 200), (5, 50)])
def test_directions_are_unit(d, n):
    U = fibonacci_directions(n, d)
    np.testing.assert_allclose(np.linalg.norm(U, axis=1), 1.0)


def test_lattice_stays_in_ball():
    G = ball_lattice(9, 2, 1.0)
    assert np.all(np.linalg.norm(G, axis=1) <= 1.0 + 1e-12)
    assert any(np.allclose(g, 0.0) for g in G)
