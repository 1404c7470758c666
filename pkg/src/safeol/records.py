"""Per-round trace records, the regret ledger and their on-disk formats.

Traces are JSON lines with snake_case keys; every real is written with
17 significant digits so a trace reloads bit-exactly.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

SUMMARY_HEADER = ["seed", "T", "regret", "violations", "violation_mag_sum", "width_sum", "runtime_ms"]
EPS_GRID = [2.0 ** -i for i in range(11)]


@dataclass(slots=True)
class RoundRecord:
    t: int
    action: object                    # list of floats, or an int index
    pre_map_action: object = None     # continuous: sampled recommendation
    support: object = None            # finite: indices of the recommendation
    probabilities: object = None      # finite: recommendation weights on ``support``
    gamma: float = 1.0
    width_at_action: float = 0.0
    width_pre_map: float = 0.0
    prediction: object = 0.0
    constraint_value: float = 0.0
    violated: bool = False
    cumulative_regret_proxy: float = 0.0
    loss: float = 0.0
    loss_gap: float = 0.0
    expected_width: float = 0.0
    mapping_id: str = "identity"
    in_version_space: bool = True
    feedback: object = 0.0

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class RegretLedger:
    T: int = 0
    seed: int = 0
    learner_cum_loss: float = 0.0
    hindsight_safe_opt_loss: float = math.nan
    regret: float = math.nan
    violations: int = 0
    violation_magnitude_sum: float = 0.0
    constraint_sum: float = 0.0
    width_sum: float = 0.0
    width_exceed_counts: dict = field(default_factory=lambda: {e: 0 for e in EPS_GRID})
    beta: float = 0.0
    loss_scale: float = 1.0
    covered: bool = True
    first_miss: int | None = None
    max_kappa_ratio: float = 0.0
    min_gamma_slack: float = math.inf
    hindsight_action: object = None
    kkt_residual: float = 0.0
    runtime_ms: float = 0.0
    finalized: bool = False

    def add_round(self, loss, constraint_value, width, gap=None, expected_width=None):
        self.T += 1
        self.learner_cum_loss += float(loss)
        cv = float(constraint_value)
        self.constraint_sum += cv
        if cv > 0.0:
            self.violations += 1
            self.violation_magnitude_sum += cv
        self.width_sum += float(width)
        for e in self.width_exceed_counts:
            if width > e:
                self.width_exceed_counts[e] += 1
        if gap is not None and expected_width is not None:
            r = kappa_ratio(gap, expected_width)
            self.max_kappa_ratio = max(self.max_kappa_ratio, r)

    def finalize(self, hindsight_loss, action=None, kkt_residual=0.0):
        self.hindsight_safe_opt_loss = float(hindsight_loss)
        self.regret = self.learner_cum_loss - self.hindsight_safe_opt_loss
        self.hindsight_action = action
        self.kkt_residual = float(kkt_residual)
        self.finalized = True
        return self

    def to_dict(self):
        d = asdict(self)
        d["width_exceed_counts"] = {repr(k): v for k, v in self.width_exceed_counts.items()}
        return d

    def summary_row(self):
        return [self.seed, self.T, self.regret, self.violations, self.violation_magnitude_sum,
                self.width_sum, self.runtime_ms]


def kappa_ratio(gap, expected_width, tiny=1e-15):
    """Loss inflation per unit of expected width; 0 when nothing is lost."""
    if gap <= tiny:
        return 0.0
    if expected_width <= tiny:
        return math.inf
    return gap / expected_width


# -- serialization -------------------------------------------------------------

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, np.ndarray):
        return _fmt(x.tolist())
    if isinstance(x, (list, tuple)):
        return "[" + ",".join(_fmt(v) for v in x) + "]"
    if isinstance(x, dict):
        return "{" + ",".join(json.dumps(str(k)) + ":" + _fmt(v) for k, v in x.items()) + "}"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj):
    """JSON text with reals at 17 significant digits (non-finite as null)."""
    return _fmt(obj)


def write_trace(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(dumps(r.to_dict()))
            fh.write("\n")


def read_trace(path):
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def write_ledger(path, ledger):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(ledger.to_dict()))
        fh.write("\n")


def read_ledger(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_summary(path, rows, header=SUMMARY_HEADER):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])


def read_summary(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
