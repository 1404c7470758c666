import csv
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from safeol import analysis
from safeol.analysis import (
    certify_regret,
    check_long_term,
    check_violation_count_bound,
    check_width_sum_bound,
    eluder_dimension_finite,
    eluder_profile_finite,
    kappa_star,
    linear_eluder,
    loglog_slope,
    report,
    width_sum_bound,
)
from safeol.cli import run_seeds
from safeol.config import ExperimentConfig
from safeol.errors import BoundViolated, MissingHindsight
from safeol.records import RegretLedger, SUMMARY_HEADER, read_ledger, read_summary

# three functions, three actions, every action independent at scale 1
THREE_CHAIN = np.array([[0.9, 1.0, 0.0], [-0.9, -0.5, 1.0], [0.0, -0.5, -0.5]])


def _naive_eluder(table, eps):
    F = np.asarray(table, dtype=float)
    n, K = F.shape
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    best = 0
    for L in range(1, K + 1):
        for seq in itertools.permutations(range(K), L):
            cands = {eps * (1 + 1e-9) + 1e-12}
            for i, j in pairs:
                for k in range(L + 1):
                    cands.add(math.sqrt(sum((F[i, s] - F[j, s]) ** 2 for s in seq[:k])))
            for e in sorted(c for c in cands if c > eps):
                ok = all(any(math.sqrt(sum((F[i, s] - F[j, s]) ** 2 for s in seq[:k])) <= e < F[i, seq[k]] - F[j, seq[k]]
                             for i, j in pairs) for k in range(L))
                if ok:
                    best = max(best, L)
                    break
    return best


def test_single_function_has_no_independent_action():
    assert eluder_dimension_finite([[0.1, -0.3, 0.5]], 0.0) == 0


def test_indicator_pair():
    table = [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
    assert eluder_dimension_finite(table, 0.1) == 1


def test_three_functions_reach_length_three():
    # exceeds |F| - 1 = 2; see the decisions ledger
    assert eluder_dimension_finite(THREE_CHAIN, 0.5) == 3
    assert _naive_eluder(THREE_CHAIN, 0.5) == 3


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 4), st.integers(1, 4), st.floats(0.0, 1.5))
def test_matches_naive_search_and_pair_bound(seed, n, K, eps):
    table = np.round(np.random.default_rng(seed).uniform(-1, 1, (n, K)), 2)
    E = eluder_dimension_finite(table, eps)
    assert E == _naive_eluder(table, eps)
    assert E <= n * (n - 1) // 2


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_profile_is_nonincreasing_in_scale(seed):
    table = np.random.default_rng(seed).uniform(-1, 1, (4, 5))
    prof = eluder_profile_finite(table)
    values = [prof(e) for e in np.linspace(0, 2.5, 60)]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert values[-1] == 0


def test_linear_eluder_form():
    assert linear_eluder(2.0, 3) == 0.0
    assert linear_eluder(1.0, 3) == 3.0
    assert linear_eluder(2 ** -5, 2, 4.0) == pytest.approx(4 * 2 * 5 * math.log(2))


def test_kappa_star_values():
    assert kappa_star("finite", delta0=0.2) == pytest.approx(5.0)
    assert kappa_star("linear", b=0.5) == 2.0
    assert kappa_star("polytopic", b=0.25, action_radius=2.0) == 8.0
    assert kappa_star("glm", b=0.5, ratio=2.0, c_lower=0.5) == 8.0


def test_large_scale_means_no_counts():
    widths = np.full(50, 0.3)
    rep = check_violation_count_bound(widths, 1.0, lambda e: 1.0, grid=[0.5])
    assert rep.passed and rep.rows[0][1] == 0


def test_single_round_width_sum():
    rep = check_width_sum_bound([1.7], 1.0, lambda a: linear_eluder(a, 2))
    assert rep.passed and rep.argmin == 2.0


def test_strict_checker_raises():
    with pytest.raises(BoundViolated):
        check_violation_count_bound(np.ones(100), 0.01, lambda e: 1.0, grid=[0.5], strict=True)


def _run(preset, T, seed=0, **env):
    from safeol.engine import simulate
    cfg = ExperimentConfig(horizon=T, seed=seed, environment={"preset": preset, **env})
    return simulate(cfg)


def test_noiseless_linear_run_within_bounds():
    res = _run("linear_ball", 600, noise_std=0.0)
    widths = [r.width_at_action for r in res.records]
    beta = res.ledger.beta
    assert check_violation_count_bound(widths, beta, lambda e: linear_eluder(e, 2)).passed
    assert check_width_sum_bound(widths, beta, lambda a: linear_eluder(a, 2)).passed


def test_finite_run_with_exact_eluder():
    res = _run("finite_k10", 600)
    prof = eluder_profile_finite(res.env.constraint.table)
    widths = [r.width_at_action for r in res.records]
    assert check_violation_count_bound(widths, res.ledger.beta, prof).passed
    assert check_width_sum_bound(widths, res.ledger.beta, prof).passed


def test_long_term_checker_flags_bad_rounds():
    rep = check_long_term([0.1, 0.5, -0.2], [0.2, 0.3, 0.1], [True, True, True], 1.0, lambda a: 1.0)
    assert rep.rows == [1] and not rep.passed


def test_certificate_zero_loss():
    led = RegretLedger(T=100).finalize(0.0)
    cert = certify_regret(led, 2.0, 1.0, lambda a: linear_eluder(a, 2), 10.0, 0.05)
    assert cert.regret == 0.0 and cert.passed
    expected = 2.0 * width_sum_bound(100, 1.0, lambda a: linear_eluder(a, 2))[0] + 10.0 + math.sqrt(200 * math.log(20))
    assert cert.bound == pytest.approx(expected)


def test_certificate_requires_hindsight():
    with pytest.raises(MissingHindsight):
        certify_regret(RegretLedger(T=10), 1.0, 1.0, lambda a: 1.0, 0.0, 0.05)


def test_certificate_reports_eluder_sensitivity():
    led = RegretLedger(T=100).finalize(0.0)
    fam = {f"c={c}": (lambda a, c=c: linear_eluder(a, 2, c)) for c in (1.0, 4.0, 16.0)}
    cert = certify_regret(led, 2.0, 1.0, fam["c=4.0"], 10.0, 0.05, eluder_family=fam)
    assert cert.eluder_sensitivity["c=1.0"] <= cert.bound <= cert.eluder_sensitivity["c=16.0"]


def test_loglog_slope_of_power_law():
    T = np.array([1e3, 3e3, 1e4])
    assert loglog_slope(T, 5 * T ** 0.5) == pytest.approx(0.5)


def test_report_on_empty_directory(tmp_path):
    assert report(str(tmp_path)) == []
    with open(tmp_path / "aggregate.csv") as fh:
        assert next(csv.reader(fh))[0] == "n"
    with open(tmp_path / "rows.csv") as fh:
        assert next(csv.reader(fh)) == SUMMARY_HEADER


def test_report_single_run_matches_ledger(tmp_path):
    cfg = ExperimentConfig(horizon=50, seed=4, output={"dir": str(tmp_path)})
    run_seeds(cfg, 1)
    rows = report(str(tmp_path))
    led = read_ledger(tmp_path / "ledger_seed4.json")
    assert len(rows) == 1
    assert float(rows[0]["regret"]) == led["regret"]
    assert int(rows[0]["violations"]) == led["violations"]
    curve = read_summary(tmp_path / "curve_regret_seed4.csv")
    assert float(curve[-1]["regret"]) == pytest.approx(led["regret"], abs=1e-9)


def test_report_aggregates_match_recomputation(tmp_path):
    cfg = ExperimentConfig(horizon=20, seed=100, environment={"preset": "finite_k10"},
                           output={"dir": str(tmp_path), "trace": False})
    run_seeds(cfg, 50)
    report(str(tmp_path), str(tmp_path / "out"))
    rows = read_summary(tmp_path / "out" / "rows.csv")
    agg = read_summary(tmp_path / "out" / "aggregate.csv")[0]
    assert int(agg["n"]) == 50
    for key in SUMMARY_HEADER:
        col = np.array([float(r[key]) for r in rows])
        assert float(agg[f"{key}_mean"]) == pytest.approx(col.mean(), rel=1e-12, abs=1e-12)
        assert float(agg[f"{key}_std"]) == pytest.approx(col.std(ddof=1), rel=1e-12, abs=1e-12)


def test_checkers_are_pure():
    widths = np.random.default_rng(3).uniform(0, 1, 200)
    a = check_violation_count_bound(widths, 1.0, lambda e: 2.0)
    b = check_violation_count_bound(widths, 1.0, lambda e: 2.0)
    assert a == b
