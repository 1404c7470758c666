"""Version spaces over the constraint class and the queries built on them.

Every version space answers, for a batch of actions ``A`` (rows):

* ``bounds(A)``       -> (f_min, f_max), the extreme constraint values over
                         the surviving functions (conservative for ellipsoids)
* ``width(A)``        -> f_max - f_min
* ``optimistic(A)``   -> f_min <= 0         (membership in O_t)
* ``pessimistic(A)``  -> f_max <= 0         (membership in P_t)

Continuous version spaces additionally expose ``gamma(a)``, the largest
shrink factor putting ``gamma * a`` in the pessimistic set, and
``radial_limit(U)``, the distance to the optimistic (or, on request,
pessimistic) boundary along unit directions.  Both sets are star-shaped
around the origin because the pre-offset bounds are positively homogeneous.
"""
from __future__ import annotations

import enum

import numpy as np

from .errors import ActionNotOptimistic, ModelMismatch

TINY = 1e-12


class Membership(enum.Enum):
    PESSIMISTIC = "pessimistic"
    OPTIMISTIC = "optimistic"
    NEITHER = "neither"


def _rows(A):
    A = np.asarray(A, dtype=float)
    return A[None, :] if A.ndim == 1 else A


def _classify(f_min, f_max, tol):
    if f_max <= tol:
        return Membership.PESSIMISTIC
    if f_min <= tol:
        return Membership.OPTIMISTIC
    return Membership.NEITHER


class Link:
    """Monotone link with ``link(0) = 0``; tanh by default."""

    def __init__(self, fn=np.tanh, derivative=None, name="tanh"):
        self.fn = fn
        self.name = name
        self._derivative = derivative or (lambda u: 1.0 - np.tanh(u) ** 2)

    def __call__(self, u):
        return self.fn(u)

    def derivative(self, u):
        return self._derivative(u)

    def slope_range(self, half_width, n=10_000):
        """Min and max of the derivative on ``[-half_width, half_width]`` (grid)."""
        u = np.linspace(-half_width, half_width, n)
        dv = self.derivative(u)
        return float(dv.min()), float(dv.max())

    @classmethod
    def named(cls, name):
        if name == "tanh":
            return cls()
        if name == "identity":
            return cls(lambda u: np.asarray(u, dtype=float), lambda u: np.ones_like(np.asarray(u, dtype=float)), "identity")
        raise ValueError(f"unknown link {name!r}")


class EllipsoidVersionSpace:
    """``{f : ||f - center||_V^2 <= radius}`` intersected with ``||f|| <= ball``.

    The pre-offset extremes of ``f . a`` are the closed-form ellipsoid
    support values, additionally clipped by the ball bound ``ball*||a||``.
    Both are valid outer bounds on the true intersection, so ``f_min`` is
    never above and ``f_max`` never below the exact values.
    """

    def __init__(self, center, gram, radius, offset, ball=1.0, gram_inv=None, action_radius=1.0):
        self.center = np.asarray(center, dtype=float)
        self.gram = np.asarray(gram, dtype=float)
        self.gram_inv = np.linalg.inv(self.gram) if gram_inv is None else np.asarray(gram_inv, dtype=float)
        self.radius = float(radius)
        if self.radius < 0:
            raise ModelMismatch("ellipsoidal version space is empty")
        self.offset = float(offset)
        self.ball = float(ball) if ball is not None else np.inf
        self.action_radius = float(action_radius)
        self.d = self.center.shape[0]
        self._sqrt_r = np.sqrt(self.radius)

    def prelink_bounds(self, A):
        A = _rows(A)
        mid = A @ self.center
        quad = ((A @ self.gram_inv) * A).sum(axis=1)
        spread = self._sqrt_r * np.sqrt(np.maximum(quad, 0.0))
        lo, hi = mid - spread, mid + spread
        if self.ball < np.inf:
            n = self.ball * np.sqrt((A * A).sum(axis=1))
            np.maximum(lo, -n, out=lo)
            np.minimum(hi, n, out=hi)
            np.minimum(lo, hi, out=lo)
        return lo, hi

    def bounds(self, A):
        lo, hi = self.prelink_bounds(A)
        return lo - self.offset, hi - self.offset

    def width(self, A):
        lo, hi = self.prelink_bounds(A)
        return hi - lo

    def optimistic(self, A, tol=0.0):
        return self.prelink_bounds(A)[0] - self.offset <= tol

    def pessimistic(self, A, tol=0.0):
        return self.prelink_bounds(A)[1] - self.offset <= tol

    def membership(self, a, tol=0.0):
        lo, hi = self.bounds(a)
        return _classify(lo[0], hi[0], tol)

    def f_min(self, a):
        return float(self.bounds(a)[0][0])

    def f_max(self, a):
        return float(self.bounds(a)[1][0])

    def gamma(self, a, tol=1e-9):
        lo, hi = self.prelink_bounds(a)
        return _gamma_from_prelink(float(lo[0]), float(hi[0]), self.offset, tol)

    def radial_limit(self, U, pessimistic=False):
        lo, hi = self.prelink_bounds(U)
        return _radial_from_prelink(hi if pessimistic else lo, self.offset, self.action_radius)

    def contains(self, f):
        f = np.asarray(f, dtype=float)
        dev = f - self.center
        inside = float(dev @ self.gram @ dev) <= self.radius * (1 + 1e-12)
        return inside and float(np.linalg.norm(f)) <= self.ball * (1 + 1e-12)


def _gamma_from_prelink(lo, hi, offset, tol):
    if lo - offset > tol:
        raise ActionNotOptimistic(f"action is outside the optimistic set (f_min={lo - offset:.3g})")
    if hi - offset <= 0.0:
        return 1.0
    return float(min(1.0, offset / max(hi, TINY)))


def _radial_from_prelink(lo, offset, action_radius):
    # lo <= offset/action_radius means the whole ray segment is inside
    cap = offset / action_radius
    rho = np.full(lo.shape, float(action_radius))
    far = lo > cap
    rho[far] = offset / lo[far]
    return rho


class GLMVersionSpace:
    """Generalized-linear wrapper: ``f(a) = link(f . a - b)`` over an ellipsoid.

    The link argument is clamped to ``[-clamp, clamp]``; ``c_lower`` and
    ``c_upper`` are the link-slope extremes on that range.
    """

    def __init__(self, inner, link, clamp, slopes=None):
        self.inner = inner
        self.link = link
        self.clamp = float(clamp)
        self.c_lower, self.c_upper = link.slope_range(self.clamp) if slopes is None else slopes
        if self.c_lower <= 0:
            raise ValueError("link slope must be bounded away from zero on the clamped range")
        self.ratio = self.c_upper / self.c_lower
        self.offset = inner.offset
        self.action_radius = inner.action_radius

    def prelink_bounds(self, A):
        return self.inner.prelink_bounds(A)

    def _arg(self, u):
        return np.clip(u - self.offset, -self.clamp, self.clamp)

    def bounds(self, A):
        lo, hi = self.inner.prelink_bounds(A)
        return self.link(self._arg(lo)), self.link(self._arg(hi))

    def width(self, A):
        lo, hi = self.bounds(A)
        return hi - lo

    def optimistic(self, A, tol=0.0):
        return self.inner.optimistic(A, tol)

    def pessimistic(self, A, tol=0.0):
        return self.inner.pessimistic(A, tol)

    def membership(self, a, tol=0.0):
        return self.inner.membership(a, tol)

    def f_min(self, a):
        return float(self.bounds(a)[0][0])

    def f_max(self, a):
        return float(self.bounds(a)[1][0])

    def gamma(self, a, tol=1e-9):
        return self.inner.gamma(a, tol)

    def radial_limit(self, U, pessimistic=False):
        return self.inner.radial_limit(U, pessimistic)


class ProductVersionSpace:
    """``m`` ellipsoids, one per constraint row, sharing offset and dimension.

    ``bounds`` returns ``(n, m)`` arrays; the width is the row-wise maximum
    and both sets are intersections over rows.
    """

    def __init__(self, components):
        self.components = list(components)
        if not self.components:
            raise ValueError("need at least one component")
        d = {c.d for c in self.components}
        if len(d) != 1:
            raise ValueError("components must share the action dimension")
        self.d = d.pop()
        self.offset = self.components[0].offset
        self.action_radius = self.components[0].action_radius

    def prelink_bounds(self, A):
        pairs = [c.prelink_bounds(A) for c in self.components]
        return np.column_stack([p[0] for p in pairs]), np.column_stack([p[1] for p in pairs])

    def bounds(self, A):
        lo, hi = self.prelink_bounds(A)
        return lo - self.offset, hi - self.offset

    def width(self, A):
        lo, hi = self.prelink_bounds(A)
        return (hi - lo).max(axis=1)

    def optimistic(self, A, tol=0.0):
        return np.all(self.prelink_bounds(A)[0] - self.offset <= tol, axis=1)

    def pessimistic(self, A, tol=0.0):
        return np.all(self.prelink_bounds(A)[1] - self.offset <= tol, axis=1)

    def membership(self, a, tol=0.0):
        lo, hi = self.bounds(a)
        return _classify(lo[0].max(), hi[0].max(), tol)

    def f_min(self, a):
        return self.bounds(a)[0][0]

    def f_max(self, a):
        return self.bounds(a)[1][0]

    def gamma(self, a, tol=1e-9):
        lo, hi = self.prelink_bounds(a)
        return min(_gamma_from_prelink(float(l), float(h), self.offset, tol) for l, h in zip(lo[0], hi[0]))

    def radial_limit(self, U, pessimistic=False):
        return np.min(np.column_stack([c.radial_limit(U, pessimistic) for c in self.components]), axis=1)


class FiniteVersionSpace:
    """Survivors of a finite table whose squared deviation is within budget.

    ``table`` rows are functions of the initial class, columns actions.
    ``deviations[i]`` is the accumulated ``sum_s (f_i(a_s) - zhat_s)^2``.
    """

    def __init__(self, table, deviations, radius, ids=None):
        self.table = np.asarray(table, dtype=float)
        self.deviations = np.asarray(deviations, dtype=float)
        self.radius = float(radius)
        self.ids = np.arange(len(self.table)) if ids is None else np.asarray(ids)
        mask = self.deviations <= self.radius
        if not mask.any():
            raise ModelMismatch("finite version space is empty")
        self.survivors = self.ids[mask]
        self._values = self.table[mask]
        self.K = self.table.shape[1]
        self._lo = self._values.min(axis=0)
        self._hi = self._values.max(axis=0)

    @property
    def size(self):
        return len(self.survivors)

    def bounds(self, A=None):
        if A is None:
            return self._lo.copy(), self._hi.copy()
        A = np.asarray(A, dtype=int)
        return self._lo[A], self._hi[A]

    def width(self, A=None):
        lo, hi = self.bounds(A)
        return hi - lo

    def optimistic(self, A=None, tol=0.0):
        return self.bounds(A)[0] <= tol

    def pessimistic(self, A=None, tol=0.0):
        return self.bounds(A)[1] <= tol

    def membership(self, a, tol=0.0):
        return _classify(self._lo[int(a)], self._hi[int(a)], tol)

    def f_min(self, a):
        return float(self._lo[int(a)])

    def f_max(self, a):
        return float(self._hi[int(a)])

    def values(self):
        return self._values
