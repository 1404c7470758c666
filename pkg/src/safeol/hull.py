"""Convex-hull geometry on finite point sets.

Projection onto ``Conv(points)`` is solved with Wolfe's minimum-norm-point
active-set method applied to ``points - x``.  The active set ("corral") is
kept affinely independent, so the returned weights already describe a
Caratheodory representation with at most ``d + 1`` support points.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_WEIGHT_EPS = 1e-14


@dataclass
class HullProjection:
    point: np.ndarray        # projection of x onto the hull
    indices: np.ndarray      # support indices into the point array
    weights: np.ndarray      # convex weights over the support
    iterations: int
    converged: bool
    gap: float               # Wolfe duality gap at termination


def _affine_minimizer(QS):
    # minimize ||alpha @ QS|| subject to sum(alpha) = 1
    k = QS.shape[0]
    if k == 1:
        return np.ones(1)
    A = np.empty((k + 1, k + 1))
    A[:k, :k] = QS @ QS.T
    A[:k, k] = 1.0
    A[k, :k] = 1.0
    A[k, k] = 0.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(A, rhs, rcond=None)[0]
    return sol[:k]


def project_onto_hull(points, x, init=None, tol=1e-9, max_iter=10_000):
    """Euclidean projection of ``x`` onto the convex hull of ``points`` (rows).

    ``init`` is an optional list of indices used to warm-start the corral.
    ``tol`` is relative to the squared diameter of ``points - x``.
    """
    P = np.asarray(points, dtype=float)
    x = np.asarray(x, dtype=float)
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValueError("points must be a non-empty (n, d) array")
    Q = P - x
    sq = np.einsum("ij,ij->i", Q, Q)
    scale = max(float(sq.max()), 1e-300)

    S = []
    if init is not None:
        S = [int(i) for i in dict.fromkeys(init) if 0 <= int(i) < len(P)]
        if len(S) > P.shape[1] + 1:
            S = S[: P.shape[1] + 1]
    if S:
        lam = _affine_minimizer(Q[S])
        if not np.all(np.isfinite(lam)) or np.any(lam <= _WEIGHT_EPS):
            S = []
    if not S:
        S = [int(np.argmin(sq))]
        lam = np.ones(1)

    y = lam @ Q[S]
    gap = np.inf
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        g = Q @ y
        j = int(np.argmin(g))
        yy = float(y @ y)
        gap = yy - float(g[j])
        if gap <= tol * scale or yy <= (tol * tol) * scale:
            converged = True
            break
        if j in S:
            # no progress possible in floating point
            converged = gap <= 1e3 * tol * scale
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            alpha = _affine_minimizer(Q[S])
            if np.all(alpha > _WEIGHT_EPS):
                lam = alpha
                break
            neg = alpha <= _WEIGHT_EPS
            denom = lam[neg] - alpha[neg]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(denom > 0, lam[neg] / denom, np.inf)
            theta = float(min(1.0, ratios.min())) if ratios.size else 1.0
            lam = (1.0 - theta) * lam + theta * alpha
            keep = lam > _WEIGHT_EPS
            if keep.all():
                # guard against a stalled step: drop the smallest weight
                keep[int(np.argmin(lam))] = False
            S = [s for s, k in zip(S, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
            if len(S) == 1:
                lam = np.ones(1)
                break
        y = lam @ Q[S]

    idx = np.asarray(S, dtype=int)
    w = np.asarray(lam, dtype=float)
    w = w / w.sum()
    point = w @ P[idx]
    return HullProjection(point=point, indices=idx, weights=w, iterations=it,
                          converged=converged, gap=float(gap))


def caratheodory_reduce(points, weights, tol=1e-12):
    """Rewrite a convex combination with at most ``d + 1`` support points.

    Pivots along the kernel of the affine-dependence matrix ``[P^T; 1^T]``
    until the support is affinely independent.  The represented point is
    unchanged up to rounding.  Returns ``(kept_indices, new_weights)``.
    """
    P = np.asarray(points, dtype=float)
    w = np.asarray(weights, dtype=float).copy()
    idx = np.flatnonzero(w > tol)
    w = w[idx]
    d = P.shape[1]
    while len(idx) > d + 1 or (len(idx) > 1 and _affinely_dependent(P[idx])):
        M = np.vstack([P[idx].T, np.ones(len(idx))])
        _, _, vt = np.linalg.svd(M)
        c = vt[-1]
        if not np.any(c > tol):
            c = -c
        pos = c > tol
        ratios = w[pos] / c[pos]
        theta = ratios.min()
        w = w - theta * c
        w[np.flatnonzero(pos)[np.argmin(ratios)]] = 0.0
        keep = w > tol
        idx, w = idx[keep], w[keep]
    w = w / w.sum()
    return idx, w


def _affinely_dependent(P, rtol=1e-10):
    if len(P) <= 1:
        return False
    D = P[1:] - P[0]
    s = np.linalg.svd(D, compute_uv=False)
    return s.min() <= rtol * max(1.0, s.max()) if len(P) - 1 <= P.shape[1] else True


def project_simplex(v):
    """Euclidean projection of ``v`` onto the probability simplex (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, len(v) + 1)
    rho = np.flatnonzero(u - css / k > 0)[-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


def fibonacci_directions(n, d, seed=0):
    """Quasi-uniform unit directions in R^d (circle, Fibonacci sphere, or Gaussian)."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        th = 2.0 * np.pi * np.arange(n) / n
        return np.column_stack([np.cos(th), np.sin(th)])
    if d == 3:
        i = np.arange(n) + 0.5
        z = 1.0 - 2.0 * i / n
        r = np.sqrt(1.0 - z * z)
        phi = np.pi * (3.0 - np.sqrt(5.0)) * i
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((n, d))
    return U / np.linalg.norm(U, axis=1, keepdims=True)


def ball_lattice(resolution, d, radius):
    """Regular grid with ``resolution`` points per axis, restricted to the ball."""
    ax = np.linspace(-radius, radius, resolution)
    G = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1).reshape(-1, d)
    return G[np.einsum("ij,ij->i", G, G) <= radius * radius * (1 + 1e-12)]
