"""Regression oracle plus the version space built from its predictions.

Each estimator keeps the sufficient statistics of

    F_t = {f in F_0 : sum_s (f(a_s) - zhat_s)^2 <= beta}

where ``zhat_s`` is the oracle's forecast at ``a_s`` made *before* the
feedback at round ``s`` was absorbed.  ``update`` returns that forecast.
"""
from __future__ import annotations

import numpy as np

from .errors import ModelMismatch
from .regression import FiniteClassRegressor, GLMRegressor, VAWRegressor
from .version_spaces import EllipsoidVersionSpace, FiniteVersionSpace, GLMVersionSpace, ProductVersionSpace


class LinearEstimator:
    """VAW forecaster and the ellipsoid containing ``F_t`` for ``f . a - b``.

    With ``p_s`` the pre-offset forecast, ``sum_s (f . a_s - p_s)^2 +
    lam*||f||^2`` is a quadratic in ``f`` with Hessian ``V`` (the VAW Gram
    matrix).  On the unit ball the penalty is at most ``lam``, so
    ``{Q(f) <= beta + lam}`` contains ``F_t`` and is nested in ``t``.
    ``rows=m`` tracks ``m`` constraints sharing one Gram matrix.
    """

    def __init__(self, d, beta, offset, lam=1.0, ball=1.0, action_radius=1.0, rows=None):
        self.d = int(d)
        self.beta = float(beta)
        self.offset = float(offset)
        self.lam = float(lam)
        self.ball = float(ball)
        self.action_radius = float(action_radius)
        self.rows = rows
        self.oracle = VAWRegressor(d, lam, outputs=rows)
        shape = (self.d,) if rows is None else (self.d, int(rows))
        self.u = np.zeros(shape)
        self.q = 0.0 if rows is None else np.zeros(int(rows))

    def predict(self, a):
        return self.oracle.predict(a) - self.offset

    def update(self, a, z):
        a = np.asarray(a, dtype=float)
        p = self.oracle.predict(a)
        self.u += np.multiply.outer(a, p)
        self.q = self.q + np.square(p)
        self.oracle.update(a, np.asarray(z) + self.offset)
        return p - self.offset

    def ellipsoid_params(self):
        Vi = self.oracle.gram_inv
        c = Vi @ self.u
        resid = self.q - np.sum(self.u * c, axis=0)
        r = self.beta + self.lam * self.ball ** 2 - resid
        tol = 1e-9 * max(1.0, self.beta)
        if np.any(r < -tol):
            raise ModelMismatch("version space is empty: the constraint is outside the linear class")
        return c, np.maximum(r, 0.0)

    def version_space(self):
        c, r = self.ellipsoid_params()
        G, Gi = self.oracle.gram, self.oracle.gram_inv
        if self.rows is None:
            return EllipsoidVersionSpace(c, G, r, self.offset, self.ball, Gi, self.action_radius)
        return ProductVersionSpace(
            EllipsoidVersionSpace(c[:, i], G, r[i], self.offset, self.ball, Gi, self.action_radius)
            for i in range(int(self.rows))
        )


class GLMEstimator:
    """Nonlinear least squares for ``link(f . a - b)`` with an ellipsoidal set.

    The set is centred at the regularized estimate with Gram matrix ``V``
    and radius ``(beta + lam) / c_lower^2``: a gap of ``s`` in pre-link
    units costs at least ``c_lower * s`` in squared-loss units.
    """

    def __init__(self, d, beta, offset, link, clamp, lam=1.0, ball=1.0, action_radius=1.0, newton_steps=2):
        self.d = int(d)
        self.beta = float(beta)
        self.offset = float(offset)
        self.link = link
        self.clamp = float(clamp)
        self.lam = float(lam)
        self.ball = float(ball)
        self.action_radius = float(action_radius)
        self.c_lower, self.c_upper = link.slope_range(self.clamp)
        self.oracle = GLMRegressor(d, link, offset, lam, newton_steps=newton_steps, clamp=self.clamp)

    def predict(self, a):
        return self.oracle.predict(a)

    def update(self, a, z):
        zhat = self.oracle.predict(a)
        self.oracle.update(a, z)
        return zhat

    def version_space(self):
        radius = (self.beta + self.lam) / self.c_lower ** 2
        inner = EllipsoidVersionSpace(self.oracle.theta, self.oracle.gram, radius, self.offset,
                                      self.ball, self.oracle.gram_inv, self.action_radius)
        return GLMVersionSpace(inner, self.link, self.clamp, (self.c_lower, self.c_upper))


class FiniteEstimator:
    """Least-squares leader over ``F_0`` and survivors by deviation budget.

    ``F_0`` keeps the rows of ``table`` that are non-positive on every
    action of ``safe_actions``.
    """

    def __init__(self, table, beta, safe_actions):
        table = np.asarray(table, dtype=float)
        safe_actions = np.asarray(safe_actions, dtype=int)
        keep = np.all(table[:, safe_actions] <= 0.0, axis=1)
        if not keep.any():
            raise ModelMismatch("no function of the class is safe on the initial safe set")
        self.ids = np.flatnonzero(keep)
        self.table = table[keep]
        self.beta = float(beta)
        self.oracle = FiniteClassRegressor(self.table)
        self.deviations = np.zeros(len(self.table))

    def predict(self, a):
        return self.oracle.predict(a)

    def update(self, a, z):
        zhat = self.oracle.predict(a)
        self.deviations += (self.table[:, int(a)] - zhat) ** 2
        self.oracle.update(a, z)
        return zhat

    def version_space(self):
        return FiniteVersionSpace(self.table, self.deviations, self.beta, ids=self.ids)
