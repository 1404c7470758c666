"""Round-by-round simulation of safe online learning under an unknown constraint.

Each round:

1. build the version space from the regression history (fixed radius);
2. the learning oracle recommends a distribution over the optimistic set;
3. the mapping moves it into the pessimistic set (skipped by the
   long-term variant, which plays the recommendation directly);
4. an action is sampled and played, the noisy constraint feedback and the
   loss are revealed, and both oracles are updated.

Randomness comes from three independent streams spawned from the seed:
action sampling, feedback noise, and the loss adversary.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from . import analysis
from .config import ExperimentConfig
from .environments import make_environment
from .errors import ConfigError, EmptyPessimisticSet, NoSafeAction
from .estimators import FiniteEstimator, GLMEstimator, LinearEstimator
from .learning import GreedyPessimistic, LatticePool, OgdOracle, RayPool, SleepingHedge
from .mappings import Exp3Selector, explore_exploit_map, identity_map, kappa_grid, saddle_map_finite, scaling_map
from .records import RegretLedger, RoundRecord


@dataclass
class RunResult:
    records: list
    ledger: RegretLedger
    env: object = None
    constants: dict = field(default_factory=dict)


# -- hindsight optimum ------------------------------------------------------------------

def _project_ball_halfspaces(x, G, h, radius, iters=500, tol=1e-15):
    """Dykstra projection onto ``{||a|| <= radius} ∩ {G a <= h}``."""
    sets = [("ball", None, None)] + [("half", G[i], h[i]) for i in range(len(h))]
    y = np.array(x, dtype=float)
    incr = [np.zeros_like(y) for _ in sets]
    for _ in range(iters):
        prev = y.copy()
        for k, (kind, g, hv) in enumerate(sets):
            z = y + incr[k]
            if kind == "ball":
                n = np.linalg.norm(z)
                p = z if n <= radius else z * (radius / n)
            else:
                viol = g @ z - hv
                p = z - (viol / (g @ g)) * g if viol > 0 else z
            incr[k] = z - p
            y = p
        if np.sum((y - prev) ** 2) <= tol:
            break
    return y


def _kkt_residual(L, a, G, h, radius, act_tol=1e-7):
    # stationarity L + mu0*a/||a|| + sum mu_i g_i = 0 with mu >= 0 on active constraints
    cols = []
    n = np.linalg.norm(a)
    if n >= radius * (1 - act_tol):
        cols.append(a / max(n, 1e-300))
    for g, hv in zip(G, h):
        if g @ a >= hv - act_tol * max(1.0, abs(hv)):
            cols.append(g)
    scale = max(np.linalg.norm(L), 1e-300)
    if not cols:
        return float(np.linalg.norm(L) / scale)
    M = np.column_stack(cols)
    _, res = nnls(M, -L)
    return float(res / scale)


def hindsight_best_safe(loss_history, constraint, action_space):
    """Best fixed safe action in hindsight and its cumulative loss.

    ``action_space`` is ``("finite", K)`` or ``("ball", d, radius)``.  Finite
    spaces are scanned exhaustively (lowest index on ties).  Ball spaces
    with linear losses minimize ``L . a`` over the ball intersected with
    the constraint halfspaces by projected gradient (Dykstra projection),
    followed by a KKT check.  Returns ``(action, value, kkt_residual)``.
    """
    losses = np.asarray(loss_history, dtype=float)
    if action_space[0] == "finite":
        K = int(action_space[1])
        safe = np.asarray(constraint(np.arange(K))) <= 0.0
        if np.ndim(safe) > 1:
            safe = safe.all(axis=-1)
        if not safe.any():
            raise NoSafeAction("no action satisfies the constraint")
        totals = losses.reshape(-1, K).sum(axis=0)
        k = int(np.argmin(np.where(safe, totals, np.inf)))
        return k, float(totals[k]), 0.0
    _, d, radius = action_space
    L = losses.reshape(-1, d).sum(axis=0)
    G, h = constraint.halfspaces()
    if np.any(h < -1e-15) and np.all(np.linalg.norm(G, axis=1) * radius < -h):
        raise NoSafeAction("no action satisfies the constraint")
    nL = np.linalg.norm(L)
    if nL == 0.0:
        return np.zeros(d), 0.0, 0.0
    step = radius / nL
    a = np.zeros(d)
    for _ in range(5000):
        nxt = _project_ball_halfspaces(a - step * L, G, h, radius)
        if np.sum((nxt - a) ** 2) <= 1e-28:
            a = nxt
            break
        a = nxt
    return a, float(L @ a), _kkt_residual(L, a, G, h, radius)


# -- construction from a config ---------------------------------------------------

def _streams(seed):
    ss = np.random.SeedSequence(int(seed))
    return [np.random.default_rng(s) for s in ss.spawn(3)]


def build(cfg: ExperimentConfig):
    """Environment, estimator, learner and mapping id for a config."""
    rng_sample, rng_noise, rng_adv = _streams(cfg.seed)
    env_params = {k: v for k, v in cfg.environment.items() if k != "preset"}
    env = make_environment(cfg.preset, rng=rng_adv, **env_params)
    T, delta, lam, c_cal = cfg.horizon, cfg.delta, cfg.oracle["lam"], cfg.oracle["c_cal"]
    kind = env.kind
    learner_kind = cfg.learner["kind"]
    if kind == "finite":
        beta = analysis.radius_finite(len(env.constraint.table), delta, c_cal)
        est = FiniteEstimator(env.constraint.table, beta, env.safe_actions)
        if learner_kind in ("auto", "hedge"):
            learner = SleepingHedge(env.K, T)
        elif learner_kind == "greedy":
            learner = GreedyPessimistic(K=env.K)
        else:
            raise ConfigError("finite action spaces use the hedge or greedy learner")
        mapping = cfg.mapping
        if mapping == "auto":
            mapping = "identity" if cfg.variant == "long_term" or learner_kind == "greedy" else "explore_exploit"
    else:
        d, R = env.d, env.action_radius
        beta = analysis.radius_linear(T, d, delta, R, c_cal)
        if kind == "glm":
            est = GLMEstimator(d, beta, env.offset, env.constraint.link, 1.0 + R, lam, 1.0, R)
        else:
            rows = env.constraint.m if kind == "polytopic" else None
            est = LinearEstimator(d, beta, env.offset, lam, 1.0, R, rows)
        if cfg.learner["pool"] == "rays":
            pool = RayPool(d, cfg.learner["pool_size"], R)
        else:
            pool = LatticePool(d, cfg.learner["lattice_resolution"], R)
        if learner_kind in ("auto", "ogd"):
            learner = OgdOracle(d, T, R, env.loss_bound, pool)
        elif learner_kind == "greedy":
            learner = GreedyPessimistic(d=d, pool=pool if cfg.learner["pool"] == "rays" else RayPool(d, None, R))
        else:
            raise ConfigError("continuous action spaces use the ogd or greedy learner")
        mapping = cfg.mapping
        if mapping == "auto":
            mapping = "identity" if cfg.variant == "long_term" else "scaling"
    if cfg.variant == "long_term" and mapping != "identity":
        raise ConfigError("the long-term variant plays the recommendation directly (mapping identity)")
    return env, est, learner, mapping, beta, (rng_sample, rng_noise, rng_adv)


def setting_constants(env, cfg, beta):
    """Constants entering the regret certificate for this environment."""
    T, delta = cfg.horizon, cfg.delta
    c = {"beta": beta, "delta": delta, "T": T}
    if env.finite:
        d0 = env.info.get("delta0")
        c.update(kappa_star=analysis.kappa_star("finite", delta0=d0) if d0 else math.inf,
                 reg_ol=analysis.hedge_regret_bound(T, env.K, delta), loss_range=1.0)
        return c
    R, Dl = env.action_radius, env.loss_bound
    b = env.offset
    if b <= 0:
        ks = math.inf
    elif env.kind == "glm":
        lo, hi = env.constraint.link.slope_range(1.0 + R)
        ks = analysis.kappa_star("glm", b=b, loss_lipschitz=Dl, action_radius=R, ratio=hi / lo, c_lower=lo)
    else:
        ks = analysis.kappa_star(env.kind, b=b, loss_lipschitz=Dl, action_radius=R)
    reg_ol = analysis.ogd_regret_bound(T, delta, Dl, R) + analysis.hoeffding_term(T, delta, Dl, R)
    c.update(kappa_star=ks, reg_ol=reg_ol, loss_range=2.0 * Dl * R, d=env.d)
    return c


# -- the loop ------------------------------------------------------------------------

def _sample(rng, weights):
    u = rng.random()
    k = int(np.searchsorted(np.cumsum(weights), u * float(np.sum(weights)), side="right"))
    return min(k, len(weights) - 1)


def simulate(cfg: ExperimentConfig, callback=None, keep_trace=True):
    """Run one experiment; ``callback(t, vs, env, covered)`` sees every version space."""
    start = time.perf_counter()
    env, est, learner, mapping, beta, (rng_s, rng_n, _) = build(cfg)
    T = cfg.horizon
    ledger = RegretLedger(seed=int(cfg.seed), beta=beta)
    records = []
    losses = []
    dev = 0.0
    exp3 = None
    arms = None
    if mapping == "exp3":
        arms = kappa_grid(T)
        exp3 = Exp3Selector(len(arms), T, rng_s)
    star = getattr(env.constraint, "f_star", None)
    for t in range(T):
        vs = est.version_space()
        if env.kind == "glm":
            covered = vs.inner.contains(star)
        else:
            covered = bool(np.all(np.asarray(dev) <= beta))
        if not covered and ledger.covered:
            ledger.covered, ledger.first_miss = False, t
        if callback is not None:
            callback(t, vs, env, covered)
        ell = np.array(env.adversary.next(t), dtype=float)
        if env.finite:
            rec, arm = _finite_round(t, vs, env, learner, mapping, cfg, ell, rng_s, exp3, arms)
        else:
            rec, arm = _continuous_round(t, vs, learner, mapping, ell, rng_s)
        a = rec.action
        fval = env.constraint_value(a)
        z = env.feedback(a, rng_n)
        zhat = est.update(a, z)
        dev = dev + np.square(np.asarray(fval) - np.asarray(zhat))
        learner.update(ell)
        env.adversary.observe(a)
        if exp3 is not None:
            exp3.update(arm, float(np.clip(rec.loss, 0.0, 1.0)))
        worst = float(np.max(fval))
        rec.prediction = zhat
        rec.constraint_value = worst
        rec.violated = worst > 0.0
        rec.in_version_space = covered
        rec.feedback = z
        ledger.add_round(rec.loss, worst, rec.width_at_action, rec.loss_gap, rec.expected_width)
        if rec.mapping_id == "scaling" and env.offset > 0:
            slack = rec.gamma - env.offset / (env.offset + rec.width_pre_map)
            ledger.min_gamma_slack = min(ledger.min_gamma_slack, slack)
        losses.append(ell)
        records.append(rec)
    _finalize(records, ledger, env, losses)
    ledger.runtime_ms = (time.perf_counter() - start) * 1e3
    for r in records:
        r.action = r.action.tolist() if isinstance(r.action, np.ndarray) else int(r.action)
        if isinstance(r.pre_map_action, np.ndarray):
            r.pre_map_action = r.pre_map_action.tolist()
        for key in ("prediction", "feedback"):
            v = getattr(r, key)
            setattr(r, key, v.tolist() if isinstance(v, np.ndarray) and v.ndim else float(v))
    ledger.loss_scale = 1.0 if env.finite else 2.0 * env.loss_bound * env.action_radius
    consts = setting_constants(env, cfg, beta)
    return RunResult(records if keep_trace else [], ledger, env, consts)


def _continuous_round(t, vs, learner, mapping, ell, rng):
    rec = learner.recommend(vs)
    k = _sample(rng, rec.weights)
    a_tilde = rec.points[k]
    out = scaling_map(a_tilde, vs) if mapping == "scaling" else identity_map(a_tilde)
    a = out.post_map_action
    w_pre, w = (float(x) for x in vs.width(np.vstack([a_tilde, a])))
    loss = float(ell @ a)
    gap = loss - float(ell @ a_tilde)
    r = RoundRecord(t=t, action=a, pre_map_action=a_tilde, gamma=out.gamma, width_at_action=w,
                    width_pre_map=w_pre, loss=loss, loss_gap=gap, expected_width=w, mapping_id=out.mapping_id)
    return r, None


def _finite_round(t, vs, env, learner, mapping, cfg, ell, rng, exp3, arms):
    K = env.K
    widths = vs.width()
    arm = None
    if isinstance(learner, GreedyPessimistic):
        p_tilde = learner.recommend(vs)
        p, gamma, mid = p_tilde, 1.0, "identity"
    else:
        awake = vs.optimistic()
        p_tilde = learner.recommend(awake)
        if mapping == "identity":
            p, gamma, mid = p_tilde, 1.0, "identity"
        elif mapping == "explore_exploit":
            p, gamma = explore_exploit_map(p_tilde, vs)
            mid = "explore_exploit"
        elif mapping == "saddle":
            p, _ = saddle_map_finite(cfg.kappa, p_tilde, vs)
            gamma, mid = 1.0, f"saddle_k{cfg.kappa:g}"
        elif mapping == "exp3":
            arm = exp3.select()
            p, _ = saddle_map_finite(arms[arm], p_tilde, vs)
            gamma, mid = 1.0, f"exp3_k{arms[arm]:g}"
        else:
            raise ConfigError(f"mapping {mapping!r} is not available for finite actions")
    if mapping != "identity" and not np.all(vs.pessimistic()[p > 0]):
        raise EmptyPessimisticSet("mapping placed mass outside the pessimistic set")
    a = _sample(rng, p)
    support = np.flatnonzero(p_tilde > 0)
    r = RoundRecord(t=t, action=a, support=support.tolist(), probabilities=p_tilde[support].tolist(),
                    gamma=float(gamma), width_at_action=float(widths[a]), width_pre_map=float(p_tilde @ widths),
                    loss=float(ell[a]), loss_gap=float(ell @ (p - p_tilde)), expected_width=float(p @ widths),
                    mapping_id=mid)
    return r, arm


def _finalize(records, ledger, env, losses):
    if env.finite:
        space = ("finite", env.K)
    else:
        space = ("ball", env.d, env.action_radius)
    a_star, value, kkt = hindsight_best_safe(np.array(losses), env.constraint, space)
    ledger.finalize(value, a_star.tolist() if isinstance(a_star, np.ndarray) else a_star, kkt)
    cum = 0.0
    for rec, ell in zip(records, losses):
        opt = float(ell[a_star]) if env.finite else float(ell @ a_star)
        cum += rec.loss - opt
        rec.cumulative_regret_proxy = cum


def run_safe_learning(cfg: ExperimentConfig):
    """Safe variant: every action comes from the pessimistic set."""
    if cfg.variant != "safe":
        cfg = cfg.replace(variant="safe")
    res = simulate(cfg)
    return res.records, res.ledger


def run_long_term(cfg: ExperimentConfig):
    """Long-term variant: play the optimistic recommendation directly."""
    cfg = cfg.replace(variant="long_term", mapping="identity")
    res = simulate(cfg)
    return res.records, res.ledger
