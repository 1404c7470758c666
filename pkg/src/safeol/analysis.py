"""Checkers for the quantitative guarantees, evaluated on logged traces.

All checkers are pure functions of their inputs.  Bound functions return
numbers; ``check_*`` functions return a report and, with ``strict=True``,
raise ``BoundViolated`` listing the offending rows.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundViolated, MissingHindsight, SearchBudgetExceeded

GRID = [2.0 ** -i for i in range(11)]          # 2^0 .. 2^-10
ALPHA_GRID = [2.0] + GRID                       # 2 covers the full width range


# -- radii and oracle guarantees -------------------------------------------------

def radius_linear(T, d, delta, action_radius=1.0, c_cal=1.0):
    """``c_cal * (d ln(1 + T D_a^2 / d) + ln(1/delta))``."""
    return c_cal * (d * math.log(1.0 + T * action_radius ** 2 / d) + math.log(1.0 / delta))


def radius_finite(n_functions, delta, c_cal=1.0):
    """``c_cal * (ln|F| + ln(1/delta))``."""
    return c_cal * (math.log(max(n_functions, 1)) + math.log(1.0 / delta))


def ogd_regret_bound(T, delta, grad_bound=1.0, action_radius=1.0):
    return 4.0 * grad_bound * action_radius * math.sqrt(T * math.log(2.0 / delta))


def hoeffding_term(T, delta, grad_bound=1.0, action_radius=1.0):
    return math.sqrt(2.0 * T * grad_bound ** 2 * action_radius ** 2 * math.log(2.0 / delta))


def hedge_regret_bound(T, K, delta):
    return math.sqrt(T * math.log(max(K, 2)) / 2.0) + math.sqrt(T * math.log(1.0 / delta) / 2.0)


def kappa_star(setting, *, b=None, loss_lipschitz=1.0, action_radius=1.0, delta0=None, ratio=None, c_lower=None):
    """Upper bound on the loss-inflation-to-width ratio of the mapping in use."""
    if setting == "finite":
        return 1.0 / delta0
    if setting in ("linear", "polytopic"):
        return loss_lipschitz * action_radius / b
    if setting == "glm":
        return ratio * loss_lipschitz * action_radius / (b * c_lower)
    raise ValueError(f"unknown setting {setting!r}")


# -- eluder dimension ------------------------------------------------------------

def linear_eluder(alpha, d, c_eluder=4.0):
    """``max(d, c_eluder * d * ln(1/alpha))``, and 0 once ``alpha >= 2``.

    Widths of functions with values in ``[-1, 1]`` never exceed 2, so no
    action is ``alpha``-independent for ``alpha >= 2``.
    """
    if alpha >= 2.0:
        return 0.0
    return max(float(d), c_eluder * d * math.log(1.0 / alpha))


def _intersect(A, B):
    out = []
    i = j = 0
    while i < len(A) and j < len(B):
        lo = max(A[i][0], B[j][0])
        hi = min(A[i][1], B[j][1])
        if lo < hi:
            out.append((lo, hi))
        if A[i][1] < B[j][1]:
            i += 1
        else:
            j += 1
    return out


def _union(intervals):
    intervals = sorted(iv for iv in intervals if iv[0] < iv[1])
    out = []
    for lo, hi in intervals:
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


@dataclass
class EluderProfile:
    """Best supremum of admissible scales for each sequence length.

    ``sup_by_length[L]`` is the largest ``eps'`` bound (exclusive) reached by
    any length-``L`` sequence; ``E(eps) = max{L : sup_by_length[L] > eps}``.
    """

    sup_by_length: list
    nodes: int

    def __call__(self, eps):
        L = 0
        for k, s in enumerate(self.sup_by_length):
            if s > eps:
                L = k
        return L


def _eluder_search(table, actions, floor, budget):
    F = np.asarray(table, dtype=float)
    n = F.shape[0]
    acts = list(range(F.shape[1])) if actions is None else [int(a) for a in actions]
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    K = len(acts)
    best = [math.inf] + [-math.inf] * K
    if not pairs:
        return EluderProfile([math.inf] + [-math.inf] * K, 0)
    D = np.array([F[i, acts] - F[j, acts] for i, j in pairs])   # (pairs, K)
    nodes = 0

    def dfs(depth, used, s2, feasible):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(max(k for k, s in enumerate(best) if s > floor), nodes)
        top = feasible[-1][1]
        if top > best[depth]:
            best[depth] = top
        if depth == K:
            return
        s = np.sqrt(s2)
        for k in range(K):
            if used >> k & 1:
                continue
            col = D[:, k]
            ok = col > s
            if not ok.any():
                continue
            cand = _union(zip(s[ok], col[ok]))
            nxt = _intersect(feasible, cand)
            if not nxt:
                continue
            sup = nxt[-1][1]
            # a child can only lower the supremum; skip if it cannot improve any deeper length
            if all(best[L] >= sup for L in range(depth + 1, K + 1)):
                continue
            dfs(depth + 1, used | (1 << k), s2 + col ** 2, nxt)

    dfs(0, 0, np.zeros(len(pairs)), [(floor, math.inf)])
    return EluderProfile(best, nodes)


def eluder_profile_finite(table, actions=None, budget=2_000_000):
    """Exact eluder profile of a finite class by depth-first search.

    Action ``a`` is ``eps'``-independent of a prefix ``S`` iff some ordered
    pair ``(f, f')`` has ``sqrt(sum_S (f - f')^2) <= eps' < f(a) - f'(a)``,
    so the admissible ``eps'`` of a sequence is an intersection of unions
    of half-open intervals.  Repeating an action is never independent, so
    only repetition-free sequences are searched.
    """
    return _eluder_search(table, actions, 0.0, budget)


def eluder_dimension_finite(table, eps, actions=None, budget=2_000_000):
    """Length of the longest sequence that is ``eps'``-independent for some ``eps' > eps``."""
    prof = _eluder_search(table, actions, float(eps), budget)
    return prof(eps)


# -- bound checkers ------------------------------------------------------------------

def width_sum_bound(T, beta, eluder, grid=ALPHA_GRID, constant=20.0):
    """``min over alpha of alpha*T + constant*beta*E(alpha)/alpha`` and the minimizer."""
    vals = [(a * T + constant * beta * eluder(a) / a, a) for a in grid]
    return min(vals)


@dataclass
class BoundReport:
    passed: bool
    rows: list = field(default_factory=list)
    value: float = math.nan
    bound: float = math.nan
    argmin: float = math.nan


def check_width_sum_bound(widths, beta, eluder, grid=ALPHA_GRID, strict=False):
    widths = np.asarray(widths, dtype=float)
    T = len(widths)
    total = float(widths.sum())
    bound, alpha = width_sum_bound(T, beta, eluder, grid)
    rep = BoundReport(total <= bound, [(alpha, total, bound)], total, bound, alpha)
    if strict and not rep.passed:
        raise BoundViolated(f"width sum {total:.6g} exceeds {bound:.6g}", rep.rows)
    return rep


def check_violation_count_bound(widths, beta, eluder, grid=GRID, strict=False):
    """Rounds with width above each ``eps`` against ``(c*beta/eps^2 + 1)*E(eps)``.

    Each row is ``(eps, count, bound_c4, bound_c20, ok_c4, ok_c20)``.  The
    pass flag and ``strict`` use the constant 4.
    """
    widths = np.asarray(widths, dtype=float)
    rows = []
    for eps in grid:
        count = int(np.sum(widths > eps))
        E = eluder(eps)
        b4 = (4.0 * beta / eps ** 2 + 1.0) * E
        b20 = (20.0 * beta / eps ** 2 + 1.0) * E
        rows.append((eps, count, b4, b20, count <= b4, count <= b20))
    rep = BoundReport(all(r[4] for r in rows), rows)
    if strict and not rep.passed:
        bad = [r for r in rows if not r[4]]
        raise BoundViolated(f"width exceeded eps too often at eps={[r[0] for r in bad]}", bad)
    return rep


def check_long_term(constraint_values, widths, in_version_space, beta, eluder, grid=ALPHA_GRID):
    """Total violation against the width-sum bound, and the per-round width domination."""
    cv = np.asarray(constraint_values, dtype=float)
    w = np.asarray(widths, dtype=float)
    cov = np.asarray(in_version_space, dtype=bool)
    bound, alpha = width_sum_bound(len(cv), beta, eluder, grid)
    total = float(np.maximum(cv, 0.0).sum())
    bad_rounds = np.flatnonzero(cov & (cv > w + 1e-9)).tolist()
    rep = BoundReport(total <= bound and not bad_rounds, bad_rounds, total, bound, alpha)
    return rep


@dataclass
class RegretCertificate:
    regret: float
    bound: float
    passed: bool
    kappa_star: float
    exploration: float
    alpha: float
    reg_ol: float
    deviation: float
    eluder_sensitivity: dict = field(default_factory=dict)


def certify_regret(ledger, kappa, beta, eluder, reg_ol, delta, loss_range=1.0, grid=ALPHA_GRID,
                   eluder_family=None):
    """Realized regret against ``kappa*min_alpha{...} + Reg_OL + range*sqrt(2T ln(1/delta))``.

    ``eluder_family`` maps a label to an alternative eluder function; the
    certificate then lists the bound under each (constant sensitivity).
    """
    if not getattr(ledger, "finalized", False) and not (isinstance(ledger, dict) and ledger.get("finalized")):
        raise MissingHindsight("ledger has no hindsight optimum; finalize the run first")
    regret = ledger["regret"] if isinstance(ledger, dict) else ledger.regret
    T = ledger["T"] if isinstance(ledger, dict) else ledger.T
    explore, alpha = width_sum_bound(T, beta, eluder, grid)
    dev = loss_range * math.sqrt(2.0 * T * math.log(1.0 / delta))
    bound = kappa * explore + reg_ol + dev
    sens = {}
    for label, fn in (eluder_family or {}).items():
        e, _ = width_sum_bound(T, beta, fn, grid)
        sens[label] = kappa * e + reg_ol + dev
    return RegretCertificate(regret, bound, regret <= bound, kappa, explore, alpha, reg_ol, dev, sens)


def loglog_slope(xs, ys):
    """Least-squares slope of ``log y`` against ``log x``."""
    x = np.log(np.asarray(xs, dtype=float))
    y = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


# -- reporting -------------------------------------------------------------------------

def report(run_dir, out_dir=None):
    """Aggregate per-seed summaries and write two-column curve files.

    Reads every ``summary.csv`` and ``trace_seed*.jsonl`` under ``run_dir``
    and writes ``aggregate.csv`` (per-column mean and std over rows),
    ``rows.csv`` (all rows) and per-seed curves ``curve_regret_seed*.csv``,
    ``curve_width_seed*.csv`` and ``curve_violations_seed*.csv``.
    Returns the list of rows read.
    """
    from .records import SUMMARY_HEADER, read_summary, read_trace, write_summary

    out_dir = out_dir or run_dir
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    traces = []
    for root, _, files in sorted(os.walk(run_dir)):
        for name in sorted(files):
            path = os.path.join(root, name)
            if name == "summary.csv":
                rows.extend(read_summary(path))
            elif name.startswith("trace_seed") and name.endswith(".jsonl"):
                traces.append(path)
    numeric = [[float(r[k]) for k in SUMMARY_HEADER] for r in rows]
    write_summary(os.path.join(out_dir, "rows.csv"), numeric)
    agg_header = ["n"] + [f"{k}_{s}" for k in SUMMARY_HEADER for s in ("mean", "std")]
    arr = np.asarray(numeric, dtype=float).reshape(-1, len(SUMMARY_HEADER))
    agg_rows = []
    if len(arr):
        vals = [len(arr)]
        for j in range(arr.shape[1]):
            vals += [float(arr[:, j].mean()), float(arr[:, j].std(ddof=1)) if len(arr) > 1 else 0.0]
        agg_rows.append(vals)
    write_summary(os.path.join(out_dir, "aggregate.csv"), agg_rows, agg_header)
    for path in traces:
        tag = os.path.basename(path)[len("trace_"):-len(".jsonl")]
        recs = read_trace(path)
        t = [r["t"] for r in recs]
        curves = {
            "regret": [r["cumulative_regret_proxy"] for r in recs],
            "width": [r["width_at_action"] for r in recs],
            "violations": np.cumsum([bool(r["violated"]) for r in recs]).tolist(),
        }
        for key, ys in curves.items():
            write_summary(os.path.join(out_dir, f"curve_{key}_{tag}.csv"), list(zip(t, ys)), ["t", key])
    return rows
