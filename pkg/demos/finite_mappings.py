"""Three ways to move a Hedge recommendation into the pessimistic set.

The finite preset has 10 actions and 5 candidate constraint functions,
separated by at least 0.2 on a known-safe action.  explore_exploit spends
rounds on the widest safe action until one function survives; the saddle
map trades displaced mass against width for a fixed kappa; exp3 picks
kappa online from a doubling grid.

    python demos/finite_mappings.py [T]
"""
import sys

from safeol import ExperimentConfig, simulate

T = int(sys.argv[1]) if len(sys.argv) > 1 else 3000
base = ExperimentConfig(horizon=T, environment={"preset": "finite_k10"})

for label, cfg in [
    ("explore_exploit", base),
    ("saddle, kappa=1", base.replace(mapping="saddle", kappa=1.0)),
    ("saddle, kappa=8", base.replace(mapping="saddle", kappa=8.0)),
    ("exp3 over kappa", base.replace(mapping="exp3")),
    ("greedy baseline", base.replace(learner={"kind": "greedy"})),
]:
    res = simulate(cfg)
    first = next((r.t for r in res.records if r.width_at_action == 0.0 and r.t > 0), None)
    print(f"{label:16s} regret {res.ledger.regret:7.2f}  violations {res.ledger.violations}  "
          f"first zero-width play at round {first}")
