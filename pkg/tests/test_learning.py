import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from safeol.errors import EmptyCandidatePool, GradientTooLarge, NoAwakeAction
from safeol.learning import (
    FixedPool,
    GreedyPessimistic,
    LatticePool,
    OgdOracle,
    RayPool,
    SleepingHedge,
    default_pool_size,
)
from safeol.version_spaces import EllipsoidVersionSpace, FiniteVersionSpace


def test_midpoint_decomposition():
    ogd = OgdOracle(1, horizon=4, pool=FixedPool([[-1.0], [1.0]]))
    rec = ogd.recommend()
    order = np.argsort(rec.indices)
    np.testing.assert_allclose(rec.weights[order], [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(rec.anchor, [0.0], atol=1e-12)


def test_anchor_in_pool_is_point_mass():
    P = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    ogd = OgdOracle(2, horizon=9, pool=FixedPool(P))
    rec = ogd.recommend()
    assert list(rec.indices) == [0] and rec.weights[0] == 1.0
    ogd.update(np.zeros(2))
    rec = ogd.recommend()
    assert list(rec.indices) == [0]


def test_zero_gradients_keep_anchor():
    ogd = OgdOracle(2, horizon=100, pool=RayPool(2, 64))
    first = ogd.recommend().anchor
    for _ in range(5):
        ogd.update(np.zeros(2))
        np.testing.assert_allclose(ogd.recommend().anchor, first, atol=1e-12)


def test_interior_step_is_plain_gradient_step():
    ogd = OgdOracle(2, horizon=100, pool=LatticePool(2, 21))
    ogd.recommend()
    g = np.array([0.6, -0.8])
    ogd.update(g)
    rec = ogd.recommend()
    np.testing.assert_allclose(rec.anchor, -ogd.eta * g, atol=1e-8)
    np.testing.assert_allclose(rec.weights @ rec.points, rec.anchor, atol=1e-12)


def test_two_round_recursion_by_hand():
    ogd = OgdOracle(1, horizon=4, pool=FixedPool([[-1.0], [1.0]]))
    eta = 2.0 * 1.0 / (1.0 * np.sqrt(4))
    assert ogd.eta == eta
    x = 0.0
    ogd.recommend()
    for g in (0.3, -0.5, -1.0):
        ogd.update(np.array([g]))
        x = float(np.clip(x - eta * g, -1.0, 1.0))
        np.testing.assert_allclose(ogd.recommend().anchor, [x], atol=1e-12)


def test_gradient_bound_is_enforced():
    ogd = OgdOracle(2, horizon=10, grad_bound=1.0, pool=RayPool(2, 16))
    with pytest.raises(GradientTooLarge):
        ogd.update(np.array([1.0, 1.0]))


def test_empty_pool_is_reported():
    vs = EllipsoidVersionSpace([1.0, 0.0], np.eye(2), 0.0, 0.5, ball=None)
    ogd = OgdOracle(2, horizon=10, pool=FixedPool([[1.0, 0.0], [0.9, 0.1]]))
    with pytest.raises(EmptyCandidatePool):
        ogd.recommend(vs)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_support_never_exceeds_d_plus_one(seed, d):
    r = np.random.default_rng(seed)
    ogd = OgdOracle(d, horizon=50, pool=RayPool(d, 128))
    for _ in range(10):
        rec = ogd.recommend()
        assert len(rec.indices) <= d + 1
        np.testing.assert_allclose(rec.weights.sum(), 1.0)
        assert np.all(rec.weights >= 0)
        g = r.standard_normal(d)
        ogd.update(g / max(1.0, np.linalg.norm(g)))


def test_ray_pool_sits_on_optimistic_boundary():
    vs = EllipsoidVersionSpace([0.9, 0.0], np.eye(2) * 5, 0.2, 0.5)
    P = RayPool(2, 32).points(vs)
    lo, _ = vs.bounds(P)
    assert np.all(lo <= 0.0)
    assert np.all(np.isclose(lo, 0.0, atol=1e-9) | np.isclose(np.linalg.norm(P, axis=1), 1.0))


def test_lattice_pool_filters_by_membership():
    vs = EllipsoidVersionSpace([0.9, 0.0], np.eye(2) * 5, 0.2, 0.5)
    pool = LatticePool(2, 11)
    assert np.all(vs.optimistic(pool.points(vs)))
    assert np.all(vs.pessimistic(pool.points(vs, pessimistic=True)))
    with pytest.raises(ValueError):
        LatticePool(2, 1)


def test_default_pool_sizes_grow_with_dimension():
    assert default_pool_size(2) < default_pool_size(3) < default_pool_size(5)


def test_ogd_regret_on_fixed_ball(rng):
    T = 2000
    ogd = OgdOracle(2, horizon=T, pool=RayPool(2, 256))
    mean = np.array([0.5, -0.3])
    total, G = 0.0, np.zeros(2)
    for _ in range(T):
        a = ogd.recommend().anchor
        g = mean + 0.3 * rng.standard_normal(2)
        g /= max(1.0, np.linalg.norm(g))
        total += g @ a
        G += g
        ogd.update(g)
    regret = total + np.linalg.norm(G)
    assert regret <= 4.0 * np.sqrt(T * np.log(2 / 0.05))


def test_hedge_uniform_then_point_mass():
    h = SleepingHedge(4, horizon=100)
    np.testing.assert_allclose(h.recommend(np.ones(4, bool)), 0.25)
    np.testing.assert_allclose(h.recommend(np.array([False, False, True, False])), [0, 0, 1, 0])
    with pytest.raises(NoAwakeAction):
        h.recommend(np.zeros(4, bool))


def test_hedge_two_rounds_by_hand():
    eta = 0.5
    h = SleepingHedge(3, horizon=10, eta=eta)
    w = np.ones(3)
    rounds = [(np.array([True, True, False]), np.array([0.2, 0.9, 0.4])),
              (np.array([True, True, True]), np.array([0.7, 0.1, 0.3]))]
    for awake, loss in rounds:
        p = h.recommend(awake)
        q = np.where(awake, w, 0.0)
        q = q / q.sum()
        np.testing.assert_allclose(p, q, atol=1e-12)
        charged = np.where(awake, loss, q @ loss)
        w = w * np.exp(-eta * charged)
        h.update(loss)
    np.testing.assert_allclose(h.recommend(np.ones(3, bool)), w / w.sum(), atol=1e-12)


def test_greedy_picks_cheapest_pessimistic_action():
    vs = FiniteVersionSpace([[-0.5, 0.3, -0.2], [-0.4, -0.1, -0.3]], [0.0, 0.0], 1.0)
    g = GreedyPessimistic(K=3)
    g.update(np.array([0.9, 0.0, 0.5]))
    np.testing.assert_array_equal(g.recommend(vs), [0.0, 0.0, 1.0])


def test_greedy_continuous_starts_at_origin():
    g = GreedyPessimistic(d=2, pool=RayPool(2, 16))
    vs = EllipsoidVersionSpace([0.0, 0.0], np.eye(2), 1.0, 0.5)
    np.testing.assert_array_equal(g.recommend(vs).anchor, [0.0, 0.0])
    g.update(np.array([-1.0, 0.0]))
    a = g.recommend(vs).anchor
    assert a[0] > 0 and vs.pessimistic(a)[0]
