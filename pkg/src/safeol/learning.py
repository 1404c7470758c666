"""Online learning oracles that play distributions over the announced sets.

``OgdOracle`` is projected online gradient descent on the convex hull of a
finite candidate pool inside the optimistic set; the projected anchor is
written as a convex combination of at most ``d + 1`` pool members, which
is the distribution the oracle recommends.  ``SleepingHedge`` handles
finite action sets whose awake actions change every round.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyCandidatePool, GradientTooLarge, NoAwakeAction
from .hull import ball_lattice, caratheodory_reduce, fibonacci_directions, project_onto_hull

_EDGE = 1.0 - 1e-12   # keep boundary points strictly inside against rounding


def default_pool_size(d):
    return {1: 2, 2: 256, 3: 512}.get(d, 1024)


class RayPool:
    """Unit directions pushed out to the boundary of the optimistic set.

    The pool has a fixed size and stable indices, so consecutive
    projections can warm-start from the previous support.
    """

    stable = True

    def __init__(self, d, size=None, radius=1.0, seed=0):
        self.d = int(d)
        self.radius = float(radius)
        self.directions = fibonacci_directions(size or default_pool_size(d), d, seed)
        self.resolution = len(self.directions)

    def points(self, vs=None, pessimistic=False):
        if vs is None:
            rho = np.full(len(self.directions), self.radius)
        else:
            rho = vs.radial_limit(self.directions, pessimistic) * _EDGE
        return self.directions * rho[:, None]


class LatticePool:
    """Regular grid in the action ball, filtered by optimistic membership."""

    stable = False

    def __init__(self, d, resolution=33, radius=1.0):
        if resolution < 2:
            raise ValueError("lattice resolution must be at least 2 per axis")
        self.d = int(d)
        self.resolution = int(resolution)
        self.grid = ball_lattice(self.resolution, self.d, radius)

    def points(self, vs=None, pessimistic=False):
        if vs is None:
            return self.grid
        keep = vs.pessimistic(self.grid) if pessimistic else vs.optimistic(self.grid)
        return self.grid[keep]


class FixedPool:
    """An explicit point set, optionally filtered by the version space."""

    stable = True

    def __init__(self, points):
        self.grid = np.atleast_2d(np.asarray(points, dtype=float))
        self.resolution = len(self.grid)
        self.d = self.grid.shape[1]

    def points(self, vs=None, pessimistic=False):
        if vs is None:
            return self.grid
        keep = vs.pessimistic(self.grid) if pessimistic else vs.optimistic(self.grid)
        return self.grid[keep]


@dataclass
class Recommendation:
    points: np.ndarray       # support actions, one per row
    weights: np.ndarray      # probabilities over the support
    anchor: np.ndarray       # expectation of the distribution
    indices: np.ndarray      # support indices into this round's pool
    converged: bool = True


class OgdOracle:
    """Projected OGD over ``Conv(pool)`` with a Caratheodory recommendation.

    ``recommend`` takes the gradient stored by the previous ``update``, so
    the projection targets the current round's set.
    """

    def __init__(self, d, horizon, action_radius=1.0, grad_bound=1.0, pool=None, tol=1e-9):
        self.d = int(d)
        self.action_radius = float(action_radius)
        self.grad_bound = float(grad_bound)
        self.eta = 2.0 * self.action_radius / (self.grad_bound * np.sqrt(horizon))
        self.pool = pool if pool is not None else RayPool(d, radius=action_radius)
        self.tol = tol
        self.anchor = np.zeros(self.d)
        self.last_gradient = np.zeros(self.d)
        self._support = None
        self.failures = 0

    def recommend(self, vs=None):
        P = self.pool.points(vs)
        if len(P) == 0:
            raise EmptyCandidatePool(self.pool.resolution)
        x = self.anchor - self.eta * self.last_gradient
        init = self._support if self.pool.stable else None
        proj = project_onto_hull(P, x, init=init, tol=self.tol)
        idx, w = proj.indices, proj.weights
        if len(idx) > self.d + 1:
            sub, w = caratheodory_reduce(P[idx], w)
            idx = idx[sub]
        if not proj.converged:
            self.failures += 1
        self.anchor = w @ P[idx]
        self._support = idx
        return Recommendation(P[idx], w, self.anchor.copy(), idx, proj.converged)

    def update(self, gradient):
        g = np.asarray(gradient, dtype=float)
        if np.linalg.norm(g) > self.grad_bound * (1 + 1e-12):
            raise GradientTooLarge(f"gradient norm {np.linalg.norm(g):.6g} exceeds {self.grad_bound}")
        self.last_gradient = g.copy()
        return self


class GreedyPessimistic:
    """Baseline: the pool point of the pessimistic set with least past loss.

    Continuous pools use rays pushed to the pessimistic boundary; finite
    action sets take the lowest-index minimizer over ``P_t``.
    """

    def __init__(self, d=None, pool=None, K=None):
        self.pool = pool
        self.K = K
        self.cum_loss = np.zeros(K if K is not None else d)

    def recommend(self, vs):
        if self.K is not None:
            mask = vs.pessimistic()
            scores = np.where(mask, self.cum_loss, np.inf)
            p = np.zeros(self.K)
            p[int(np.argmin(scores))] = 1.0
            return p
        if not np.any(self.cum_loss):
            a = np.zeros_like(self.cum_loss)
        else:
            P = self.pool.points(vs, pessimistic=True)
            a = P[int(np.argmin(P @ self.cum_loss))]
        return Recommendation(a[None, :], np.ones(1), a.copy(), np.zeros(1, dtype=int))

    def update(self, loss):
        self.cum_loss += np.asarray(loss, dtype=float)
        return self


class SleepingHedge:
    """Exponential weights restricted to the awake actions (specialists rule).

    Asleep actions are charged the played distribution's expected loss, so
    their weight ratio to the played mass is unchanged.
    """

    def __init__(self, K, horizon, eta=None):
        self.K = int(K)
        self.eta = float(eta) if eta is not None else np.sqrt(8.0 * np.log(max(self.K, 2)) / horizon)
        self.log_weights = np.zeros(self.K)
        self._last = None

    def recommend(self, awake):
        awake = np.asarray(awake, dtype=bool)
        if not awake.any():
            raise NoAwakeAction("no awake action this round")
        lw = np.where(awake, self.log_weights, -np.inf)
        w = np.exp(lw - lw.max())
        p = w / w.sum()
        self._last = (awake, p)
        return p

    def update(self, loss, awake=None, p=None):
        loss = np.asarray(loss, dtype=float)
        if awake is None or p is None:
            awake, p = self._last
        expected = float(p @ loss)
        self.log_weights -= self.eta * np.where(awake, loss, expected)
        self.log_weights -= self.log_weights.max()
        return self
