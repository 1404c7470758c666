"""Synthetic environments: true constraints, loss adversaries and feedback noise.

Everything here is environment-side knowledge.  The learner only sees the
noisy feedback returned by ``Environment.feedback``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .version_spaces import Link

PRESETS = ("linear_ball", "glm_tanh", "polytopic_m3", "finite_k10", "stuck_origin")


def unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


class LinearConstraint:
    kind = "linear"

    def __init__(self, f_star, b):
        self.f_star = np.asarray(f_star, dtype=float)
        self.b = float(b)
        if np.linalg.norm(self.f_star) > 1 + 1e-12:
            raise ValueError("linear constraint vector must lie in the unit ball")

    def __call__(self, a):
        return np.asarray(a, dtype=float) @ self.f_star - self.b

    def halfspaces(self):
        return self.f_star[None, :], np.array([self.b])


class GLMConstraint(LinearConstraint):
    kind = "glm"

    def __init__(self, f_star, b, link=None):
        super().__init__(f_star, b)
        self.link = link or Link()

    def __call__(self, a):
        return self.link(np.asarray(a, dtype=float) @ self.f_star - self.b)


class PolytopicConstraint:
    kind = "polytopic"

    def __init__(self, F, b):
        self.F = np.atleast_2d(np.asarray(F, dtype=float))
        self.b = float(b)
        if np.any(np.linalg.norm(self.F, axis=1) > 1 + 1e-12):
            raise ValueError("every constraint row must lie in the unit ball")

    @property
    def m(self):
        return self.F.shape[0]

    def __call__(self, a):
        return np.asarray(a, dtype=float) @ self.F.T - self.b

    def halfspaces(self):
        return self.F, np.full(self.m, self.b)


class FiniteConstraint:
    kind = "finite"

    def __init__(self, table, star):
        self.table = np.asarray(table, dtype=float)
        self.star = int(star)
        self.values = self.table[self.star]

    def __call__(self, a):
        return self.values[np.asarray(a, dtype=int)]


# -- loss adversaries ---------------------------------------------------------

class FixedLoss:
    def __init__(self, vector):
        self.vector = np.asarray(vector, dtype=float)

    def next(self, t):
        return self.vector

    def observe(self, action):
        pass


class IIDLoss:
    """Fresh bounded draws around a mean.

    Continuous losses are rescaled into the ``bound`` ball; finite losses
    are clipped to ``[0, 1]``.
    """

    def __init__(self, mean, scale, rng, finite=False, bound=1.0):
        self.mean = np.asarray(mean, dtype=float)
        self.scale = float(scale)
        self.rng = rng
        self.finite = finite
        self.bound = float(bound)

    def next(self, t):
        v = self.mean + self.scale * self.rng.standard_normal(self.mean.shape)
        if self.finite:
            return np.clip(v, 0.0, 1.0)
        n = np.linalg.norm(v)
        return v * (self.bound / n) if n > self.bound else v

    def observe(self, action):
        pass


class SwitchingLoss:
    """Heuristic adversary that penalizes the learner's empirical play.

    Finite: loss 1 on the most played action so far (lowest index on
    ties), 0 elsewhere.  Continuous: the loss vector points along the mean
    played action, so continuing in that direction costs the most.
    """

    def __init__(self, size, finite=False, bound=1.0, fallback=None):
        self.finite = finite
        self.bound = float(bound)
        self.counts = np.zeros(size)
        self.total = np.zeros(size)
        self.fallback = unit(np.ones(size)) if fallback is None else np.asarray(fallback, dtype=float)

    def next(self, t):
        if self.finite:
            v = np.zeros_like(self.counts)
            v[int(np.argmax(self.counts))] = 1.0
            return v
        n = np.linalg.norm(self.total)
        return self.bound * (self.total / n if n > 1e-12 else self.fallback)

    def observe(self, action):
        if self.finite:
            self.counts[int(action)] += 1
        else:
            self.total += np.asarray(action, dtype=float)


# -- environment ---------------------------------------------------------------

@dataclass
class Environment:
    """A constraint, an action space, an initial safe set and an adversary.

    Continuous spaces are the ``action_radius`` ball in ``R^d`` with initial
    safe set ``{||a|| <= safe_radius}``; finite spaces are ``range(K)`` with
    the initial safe indices in ``safe_actions``.
    """

    constraint: object
    adversary: object
    noise_std: float = 0.1
    d: int | None = None
    K: int | None = None
    action_radius: float = 1.0
    safe_radius: float = 0.0
    safe_actions: np.ndarray | None = None
    loss_bound: float = 1.0
    name: str = "custom"
    info: dict = field(default_factory=dict)

    @property
    def finite(self):
        return self.K is not None

    @property
    def kind(self):
        return self.constraint.kind

    @property
    def offset(self):
        return getattr(self.constraint, "b", 0.0)

    def constraint_value(self, a):
        return self.constraint(a)

    def worst_value(self, a):
        """Largest constraint row at ``a`` (the value that decides safety)."""
        return float(np.max(self.constraint(a)))

    def feedback(self, a, rng):
        v = self.constraint(a)
        if self.noise_std == 0.0:
            return v
        return v + self.noise_std * rng.standard_normal(np.shape(v))

    def check_initial_safe_set(self, n_probe=10_000, rng=None):
        """Every initial safe action must satisfy ``f(a) <= 0`` for all of ``F_0``.

        Finite classes are checked exactly.  For the ball the statement is
        exact by Cauchy-Schwarz (``||a|| <= b`` and ``||f|| <= 1``), and is
        additionally spot-checked on sampled pairs.
        """
        if self.finite:
            return True
        rng = rng or np.random.default_rng(0)
        d = self.d
        f = rng.standard_normal((n_probe, d))
        f *= (rng.random(n_probe) ** (1 / d) / np.linalg.norm(f, axis=1))[:, None]
        a = rng.standard_normal((n_probe, d))
        a *= (self.safe_radius * rng.random(n_probe) ** (1 / d) / np.linalg.norm(a, axis=1))[:, None]
        return bool(np.all(np.einsum("ij,ij->i", f, a) - self.offset <= 1e-12))


def _loss_adversary(desc, size, finite, rng, default_vector, bound):
    kind = desc.get("kind", "fixed")
    if kind == "fixed":
        return FixedLoss(desc.get("vector", default_vector))
    if kind == "iid":
        return IIDLoss(desc.get("mean", default_vector), desc.get("scale", 0.1), rng, finite, bound)
    if kind == "switching":
        return SwitchingLoss(size, finite, bound)
    raise ValueError(f"unknown loss adversary {kind!r}")


def finite_table(K=10, n_functions=5, delta0=0.2, seed=12345):
    """Random table with the first ``n_functions`` rows separated on action 0.

    Actions 0 and 1 form the initial safe set; row ``i`` takes value
    ``-0.1 - delta0*i`` on action 0, so any two rows differ there by at
    least ``delta0``.
    """
    rng = np.random.default_rng(seed)
    T = rng.uniform(-1.0, 1.0, size=(n_functions, K))
    T[:, 0] = -0.1 - delta0 * np.arange(n_functions)
    T[:, 1] = rng.uniform(-1.0, -0.05, size=n_functions)
    if T[:, 0].min() < -1.0:
        raise ValueError("delta0 too large for the number of functions")
    return T


def make_environment(preset, rng=None, **params):
    """Build a named preset; keyword parameters override its defaults."""
    rng = rng if rng is not None else np.random.default_rng(0)
    p = dict(params)
    loss = dict(p.pop("loss", {}) or {})
    noise = float(p.pop("noise_std", 0.1))
    cseed = int(p.pop("constraint_seed", 12345))
    radius = float(p.pop("action_radius", 1.0))
    if preset in ("linear_ball", "glm_tanh", "polytopic_m3", "stuck_origin"):
        d = int(p.pop("d", 2))
        b = float(p.pop("b", 0.0 if preset == "stuck_origin" else 0.5))
        default_loss = -unit(np.r_[1.0, 1.0, np.zeros(d - 2)]) if d >= 2 else np.array([-1.0])
        adv = _loss_adversary(loss, d, False, rng, default_loss, 1.0)
        if preset == "polytopic_m3":
            F = p.pop("F", None)
            if F is None:
                ang = np.deg2rad([0.0, 120.0, 240.0])
                F = np.zeros((3, d))
                F[:, 0], F[:, 1] = np.cos(ang), np.sin(ang)
            con = PolytopicConstraint(F, b)
        else:
            f_star = p.pop("f_star", None)
            f_star = np.eye(d)[0] if f_star is None else np.asarray(f_star, dtype=float)
            if preset == "glm_tanh":
                con = GLMConstraint(f_star, b, Link.named(p.pop("link", "tanh")))
            else:
                con = LinearConstraint(f_star, b)
        safe_radius = 0.0 if preset == "stuck_origin" else b
        env = Environment(con, adv, noise, d=d, action_radius=radius, safe_radius=safe_radius, name=preset)
    elif preset == "finite_k10":
        K = int(p.pop("K", 10))
        n = int(p.pop("n_functions", 5))
        delta0 = float(p.pop("delta0", 0.2))
        table = p.pop("table", None)
        table = finite_table(K, n, delta0, cseed) if table is None else np.asarray(table, dtype=float)
        star = p.pop("star", None)
        star = int(np.random.default_rng(cseed + 1).integers(len(table))) if star is None else int(star)
        safe = np.asarray(p.pop("safe_actions", [0, 1]), dtype=int)
        mean = np.random.default_rng(cseed + 2).uniform(0.2, 0.8, K)
        loss.setdefault("kind", "iid")
        loss.setdefault("mean", mean)
        adv = _loss_adversary(loss, K, True, rng, mean, 1.0)
        env = Environment(FiniteConstraint(table, star), adv, noise, K=K, safe_actions=safe,
                          name=preset, info={"delta0": delta0})
    else:
        raise ValueError(f"unknown environment preset {preset!r}; choose from {PRESETS}")
    if p:
        raise ValueError(f"unused environment parameters for {preset}: {sorted(p)}")
    return env
