"""Per-round safety versus a long-run budget on the same instance.

The long-term variant plays the optimistic recommendation directly, so it
may step over the boundary.  Its total violation is bounded by the width
sum, which the script prints next to the bound.

    python demos/long_term_vs_safe.py [T]
"""
import sys

from safeol import ExperimentConfig, simulate
from safeol.analysis import check_long_term, linear_eluder

T = int(sys.argv[1]) if len(sys.argv) > 1 else 5000
cfg = ExperimentConfig(horizon=T, seed=3)

safe = simulate(cfg)
loose = simulate(cfg.replace(variant="long_term", mapping="identity"))

rep = check_long_term([r.constraint_value for r in loose.records],
                      [r.width_at_action for r in loose.records],
                      [r.in_version_space for r in loose.records],
                      loose.ledger.beta, lambda a: linear_eluder(a, 2))
print(f"safe:      regret {safe.ledger.regret:8.2f}  violations {safe.ledger.violations}")
print(f"long-term: regret {loose.ledger.regret:8.2f}  violations {loose.ledger.violations}  "
      f"total violation {rep.value:.2f} (bound {rep.bound:.1f}, alpha={rep.argmin:g})")
