"""Safe play against a linear constraint the learner has never seen.

The true constraint is a.x <= 0.5 with x = e1; the loss pulls toward
(1, 1)/sqrt(2), across the boundary.  We run the safe learner and the
pessimistic-greedy baseline on the same seed and compare.

    python demos/quickstart.py [T] [seed]
"""
import sys

import numpy as np

from safeol import ExperimentConfig, simulate

T = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 7

cfg = ExperimentConfig(horizon=T, seed=seed, environment={"preset": "linear_ball", "d": 2})
safe = simulate(cfg)
greedy = simulate(cfg.replace(learner={"kind": "greedy"}))

print(f"T={T}, seed={seed}, radius beta={safe.ledger.beta:.3f}")
for name, res in (("safe OGD + scaling", safe), ("pessimistic greedy", greedy)):
    led = res.ledger
    print(f"  {name:20s} regret {led.regret:8.2f}   violations {led.violations}   "
          f"width sum {led.width_sum:7.1f}")
print("hindsight safe optimum:", np.round(safe.ledger.hindsight_action, 4))

# how the played action approaches the boundary a_1 = 0.5
for t in (0, T // 100, T // 10, T - 1):
    r = safe.records[t]
    print(f"  round {t:5d}: action {np.round(r.action, 3)}  gamma {r.gamma:.3f}  width {r.width_at_action:.3f}")
