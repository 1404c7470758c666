"""Sweep the radius scale c_cal and watch regret scaling and coverage.

For each c_cal we record the log-log slope of mean regret against T and
the largest ratio of realized squared deviation sum_t (f*(a_t) - zhat_t)^2
to the radius beta.  A ratio above 1 means the true constraint left the
version space in that run.  The shipped default (0.2) came out of this sweep.

    python demos/calibrate_radius.py [seeds]
"""
import sys

import numpy as np

from safeol import ExperimentConfig, simulate
from safeol.analysis import loglog_slope

seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 4
Ts = [1000, 3000, 10_000]


def deviation_ratio(cfg):
    dev = {"sum": 0.0}
    res = simulate(cfg, keep_trace=True)
    for r in res.records:
        dev["sum"] += (r.constraint_value - r.prediction) ** 2
    return res.ledger.regret, dev["sum"] / res.ledger.beta


for c_cal in (1.0, 0.3, 0.2, 0.1):
    means, worst = [], 0.0
    for T in Ts:
        regrets = []
        for s in range(seeds):
            cfg = ExperimentConfig(horizon=T, seed=s, oracle={"c_cal": c_cal})
            reg, ratio = deviation_ratio(cfg)
            regrets.append(reg)
            worst = max(worst, ratio)
        means.append(np.mean(regrets))
    print(f"c_cal={c_cal:4.2f}  slope {loglog_slope(Ts, means):.3f}  "
          f"mean regret {np.round(means, 1)}  max dev/beta {worst:.2f}")
