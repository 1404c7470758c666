import numpy as np
import pytest

from safeol.environments import (
    FixedLoss,
    GLMConstraint,
    IIDLoss,
    LinearConstraint,
    PolytopicConstraint,
    SwitchingLoss,
    finite_table,
    make_environment,
)


def test_linear_values():
    f = LinearConstraint([1.0, 0.0], 0.5)
    assert f(np.zeros(2)) == -0.5
    assert f(np.array([0.5, 0.0])) == 0.0


def test_glm_value_at_boundary_is_zero():
    assert GLMConstraint([1.0, 0.0], 0.5)(np.array([0.5, 0.0])) == 0.0


def test_noiseless_feedback_is_exact():
    env = make_environment("linear_ball", noise_std=0.0)
    a = np.array([0.3, -0.4])
    assert env.feedback(a, np.random.default_rng(0)) == env.constraint_value(a)


def test_feedback_mean(rng):
    env = make_environment("linear_ball", noise_std=0.1)
    a = np.array([0.3, -0.4])
    z = np.array([env.feedback(a, rng) for _ in range(100_000)])
    assert abs(z.mean() - env.constraint_value(a)) <= 3 * 0.1 / np.sqrt(1e5)


def test_polytopic_feedback_mean_per_row(rng):
    env = make_environment("polytopic_m3", noise_std=0.2)
    a = np.array([0.2, 0.1])
    Z = env.feedback(np.tile(a, (100_000, 1)), rng)
    np.testing.assert_array_less(np.abs(Z.mean(axis=0) - (env.constraint.F @ a - 0.5)), 3 * 0.2 / np.sqrt(1e5))


def test_polytopic_rows_are_unit_and_spread():
    env = make_environment("polytopic_m3")
    F = env.constraint.F
    np.testing.assert_allclose(np.linalg.norm(F, axis=1), 1.0)
    np.testing.assert_allclose(F.sum(axis=0), 0.0, atol=1e-12)


def test_rows_outside_unit_ball_rejected():
    with pytest.raises(ValueError):
        PolytopicConstraint([[2.0, 0.0]], 0.5)
    with pytest.raises(ValueError):
        LinearConstraint([1.0, 1.0], 0.5)


def test_fixed_adversary_repeats():
    adv = FixedLoss([0.1, -0.2])
    np.testing.assert_array_equal(adv.next(0), adv.next(7))


def test_iid_adversary_is_reproducible():
    a = IIDLoss([0.5, 0.5], 0.2, np.random.default_rng(1), finite=True)
    b = IIDLoss([0.5, 0.5], 0.2, np.random.default_rng(1), finite=True)
    x1, x2 = a.next(0), a.next(1)
    assert not np.array_equal(x1, x2)
    np.testing.assert_array_equal(x1, b.next(0))
    np.testing.assert_array_equal(x2, b.next(1))
    assert np.all((x1 >= 0) & (x1 <= 1))


def test_switching_adversary_hurts_uniform_play(rng):
    K, T = 4, 400
    adv = SwitchingLoss(K, finite=True)
    L = np.zeros(K)
    uniform = 0.0
    for t in range(T):
        ell = adv.next(t)
        uniform += ell.mean()
        L += ell
        adv.observe(int(rng.integers(K)))
    assert uniform >= L.min()


def test_finite_table_separated_on_action_zero():
    T = finite_table(10, 5, 0.2)
    gaps = np.abs(np.subtract.outer(T[:, 0], T[:, 0]))
    assert gaps[~np.eye(5, dtype=bool)].min() >= 0.2 - 1e-12
    assert np.all(T[:, :2] <= 0)


def test_presets_have_safe_initial_sets():
    for name in ("linear_ball", "glm_tanh", "polytopic_m3", "stuck_origin"):
        env = make_environment(name, d=3)
        assert env.check_initial_safe_set(2000)
    env = make_environment("finite_k10")
    assert np.all(env.constraint.values[env.safe_actions] <= 0)


def test_unknown_parameters_are_rejected():
    with pytest.raises(ValueError):
        make_environment("linear_ball", colour="red")
    with pytest.raises(ValueError):
        make_environment("nope")
