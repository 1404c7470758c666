"""Maps from a recommendation over the optimistic set to play in the pessimistic set."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyPessimisticSet


@dataclass
class MappingOutcome:
    pre_map_action: np.ndarray
    post_map_action: np.ndarray
    gamma: float
    mapping_id: str


def scaling_map(a_tilde, vs):
    """Shrink ``a_tilde`` toward the origin until it is pessimistically safe."""
    a_tilde = np.asarray(a_tilde, dtype=float)
    g = vs.gamma(a_tilde)
    return MappingOutcome(a_tilde, g * a_tilde, g, "scaling")


def identity_map(a_tilde):
    a_tilde = np.asarray(a_tilde, dtype=float)
    return MappingOutcome(a_tilde, a_tilde.copy(), 1.0, "identity")


def _pessimistic_mask(vs):
    mask = vs.pessimistic()
    if not mask.any():
        raise EmptyPessimisticSet("pessimistic set is empty; the initial safe set must always belong to it")
    return mask


def explore_exploit_map(p_tilde, vs):
    """Explore the widest pessimistic action while several functions survive.

    Returns ``(p, gamma)`` with ``gamma = 1`` on exploration rounds.  Once
    one function remains, the mass of ``p_tilde`` outside ``P_t`` is spread
    uniformly over ``P_t``.
    """
    p_tilde = np.asarray(p_tilde, dtype=float)
    mask = _pessimistic_mask(vs)
    if vs.size > 1:
        w = np.where(mask, vs.width(), -np.inf)
        p = np.zeros_like(p_tilde)
        p[int(np.argmax(w))] = 1.0
        return p, 1.0
    outside = float(p_tilde[~mask].sum())
    p = np.where(mask, p_tilde + outside / mask.sum(), 0.0)
    return p, 0.0


def _fill(kappa, p_tilde, mask, w):
    # each action offers mass p_tilde[a] at cost -kappa*w[a], then any mass at 1 - kappa*w[a]
    idx = np.flatnonzero(mask)
    costs = np.concatenate([-kappa * w[idx], 1.0 - kappa * w[idx]])
    caps = np.concatenate([p_tilde[idx], np.full(len(idx), np.inf)])
    owner = np.concatenate([idx, idx])
    order = np.lexsort((owner, costs))
    p = np.zeros_like(p_tilde)
    left, value = 1.0, 0.0
    for j in order:
        if left <= 0.0:
            break
        take = min(left, caps[j])
        if take <= 0.0:
            continue
        p[owner[j]] += take
        value += take * costs[j]
        left -= take
    return p, value


def saddle_map_finite(kappa, p_tilde, vs):
    """Exact worst-case-optimal map for finite actions.

    Minimizes ``sum_a max(p[a] - p_tilde[a], 0) - kappa * sum_a p[a]*|g(a) - g'(a)|``
    over ``p`` on the pessimistic simplex and over surviving pairs ``(g, g')``.
    For a fixed pair the objective is separable and piecewise linear in
    ``p``, so filling unit mass cheapest-first is optimal.  Returns
    ``(p, objective)``.
    """
    p_tilde = np.asarray(p_tilde, dtype=float)
    mask = _pessimistic_mask(vs)
    G = vs.values()
    best = None
    n = len(G)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)] or [(0, 0)]
    for i, j in pairs:
        p, val = _fill(float(kappa), p_tilde, mask, np.abs(G[i] - G[j]))
        if best is None or val < best[1] - 1e-15:
            best = (p, val)
    return best


class Exp3Selector:
    """EXP3 over a finite set of arms with losses in ``[0, 1]``."""

    def __init__(self, n_arms, horizon, rng):
        self.n = int(n_arms)
        self.rng = rng
        k = self.n
        self.gamma = min(1.0, np.sqrt(k * np.log(k) / horizon)) if k > 1 else 0.0
        self.log_weights = np.zeros(self.n)
        self.probs = np.full(self.n, 1.0 / self.n)
        self.counts = np.zeros(self.n, dtype=int)

    def distribution(self):
        w = np.exp(self.log_weights - self.log_weights.max())
        return (1.0 - self.gamma) * w / w.sum() + self.gamma / self.n

    def select(self):
        self.probs = self.distribution()
        arm = int(np.searchsorted(np.cumsum(self.probs), self.rng.random() * self.probs.sum(), side="right"))
        arm = min(arm, self.n - 1)
        self.counts[arm] += 1
        return arm

    def update(self, arm, loss):
        if self.n > 1:
            self.log_weights[arm] -= self.gamma / self.n * float(loss) / self.probs[arm]
        return self


def kappa_grid(horizon):
    """Candidate multipliers ``2^i`` for ``i = 0 .. floor(log2 sqrt(T))``."""
    top = int(np.floor(np.log2(np.sqrt(max(horizon, 1)))))
    return [2.0 ** i for i in range(top + 1)]
