"""Online regression oracles for the unknown constraint.

All oracles follow the same two-call protocol: ``predict(a)`` is pure and
returns the forecast for the constraint at ``a``; ``update(a, z)`` absorbs
the noisy feedback and is the only mutator.
"""
from __future__ import annotations

import numpy as np


class VAWRegressor:
    """Vovk-Azoury-Warmuth forecaster for a linear target ``f . a``.

    Keeps ``gram = lam*I + sum a a^T``, its inverse (Sherman-Morrison) and
    ``moment = sum z a``.  The forecast at ``a`` includes ``a`` itself in the
    Gram matrix before solving, which is what separates VAW from plain
    online ridge regression.

    With ``outputs=m`` the feedback is an m-vector and the m forecasters
    share one Gram matrix (``moment`` becomes ``d x m``).
    """

    def __init__(self, d, lam=1.0, outputs=None):
        if lam <= 0:
            raise ValueError("lam must be positive")
        self.d = int(d)
        self.lam = float(lam)
        self.outputs = outputs
        self.gram = self.lam * np.eye(self.d)
        self.gram_inv = np.eye(self.d) / self.lam
        self.moment = np.zeros(self.d) if outputs is None else np.zeros((self.d, int(outputs)))
        self.count = 0

    def predict(self, a):
        a = np.asarray(a, dtype=float)
        Va = self.gram_inv @ a
        out = Va @ self.moment / (1.0 + a @ Va)
        return float(out) if self.outputs is None else out

    def update(self, a, z):
        a = np.asarray(a, dtype=float)
        z = np.asarray(z, dtype=float) if self.outputs is not None else float(z)
        if not np.all(np.isfinite(z)):
            raise ValueError("feedback must be finite")
        Va = self.gram_inv @ a
        # rebind rather than mutate: version spaces hold references to these
        self.gram_inv = self.gram_inv - np.outer(Va, Va) / (1.0 + a @ Va)
        self.gram = self.gram + np.outer(a, a)
        self.moment += np.multiply.outer(a, z)
        self.count += 1
        return self

    def ridge_estimate(self):
        return self.gram_inv @ self.moment


class FiniteClassRegressor:
    """Least-squares leader over a finite table of candidate functions.

    ``table`` has one row per function and one column per action.  The
    forecast is the value of the function with the smallest cumulative
    squared loss against the observed feedback (lowest row on ties).
    """

    def __init__(self, table):
        self.table = np.asarray(table, dtype=float)
        if self.table.ndim != 2 or self.table.shape[0] == 0:
            raise ValueError("table must be a non-empty (n_functions, K) array")
        self.cum_sq_loss = np.zeros(self.table.shape[0])
        self.count = 0

    def leader(self):
        return int(np.argmin(self.cum_sq_loss))

    def predict(self, a):
        return float(self.table[self.leader(), int(a)])

    def update(self, a, z):
        z = float(z)
        if not np.isfinite(z):
            raise ValueError("feedback must be finite")
        self.cum_sq_loss += (self.table[:, int(a)] - z) ** 2
        self.count += 1
        return self


class GLMRegressor:
    """Regularized nonlinear least squares for ``z = link(f . a - b) + noise``.

    The estimate is refreshed by a few warm-started Gauss-Newton steps on
    the full history after every update; desk-scale horizons keep this cheap.
    """

    def __init__(self, d, link, offset, lam=1.0, newton_steps=2, clamp=None):
        self.d = int(d)
        self.link = link
        self.offset = float(offset)
        self.lam = float(lam)
        self.newton_steps = int(newton_steps)
        self.clamp = clamp
        self.gram = self.lam * np.eye(self.d)
        self.gram_inv = np.eye(self.d) / self.lam
        self.theta = np.zeros(self.d)
        self._A = np.zeros((64, self.d))
        self._z = np.zeros(64)
        self.count = 0

    def _arg(self, u):
        u = u - self.offset
        if self.clamp is not None:
            u = np.clip(u, -self.clamp, self.clamp)
        return u

    def predict(self, a):
        a = np.asarray(a, dtype=float)
        return float(self.link(self._arg(self.theta @ a)))

    def update(self, a, z):
        a = np.asarray(a, dtype=float)
        z = float(z)
        if not np.isfinite(z):
            raise ValueError("feedback must be finite")
        if self.count == len(self._z):
            self._A = np.vstack([self._A, np.zeros_like(self._A)])
            self._z = np.concatenate([self._z, np.zeros_like(self._z)])
        self._A[self.count] = a
        self._z[self.count] = z
        Va = self.gram_inv @ a
        # rebind rather than mutate: version spaces hold references to these
        self.gram_inv = self.gram_inv - np.outer(Va, Va) / (1.0 + a @ Va)
        self.gram = self.gram + np.outer(a, a)
        self.count += 1
        A, zz = self._A[: self.count], self._z[: self.count]
        for _ in range(self.newton_steps):
            u = self._arg(A @ self.theta)
            r = self.link(u) - zz
            J = A * self.link.derivative(u)[:, None]
            H = J.T @ J + self.lam * np.eye(self.d)
            g = J.T @ r + self.lam * self.theta
            self.theta = self.theta - np.linalg.solve(H, g)
        return self
