"""Command line entry point: ``run``, ``sweep`` and ``report``.

``run`` executes one seed and writes ``trace_seed{k}.jsonl``,
``ledger_seed{k}.json`` and ``summary.csv`` under ``output.dir``.
``sweep`` repeats that for seeds ``seed, seed+1, ...`` into the same
directory, and ``report`` aggregates a directory of runs.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import analysis
from .config import dump_config, load_config
from .engine import simulate
from .errors import SafeOLError
from .records import write_ledger, write_summary, write_trace


def _run_one(cfg):
    out = cfg.output["dir"]
    os.makedirs(out, exist_ok=True)
    res = simulate(cfg, keep_trace=cfg.output["trace"])
    if cfg.output["trace"]:
        write_trace(os.path.join(out, f"trace_seed{cfg.seed}.jsonl"), res.records)
    write_ledger(os.path.join(out, f"ledger_seed{cfg.seed}.json"), res.ledger)
    return res.ledger.summary_row()


def run_seeds(cfg, n_seeds=1, jobs=1):
    """Run ``n_seeds`` consecutive seeds; returns the summary rows in seed order."""
    cfgs = [cfg.replace(seed=int(cfg.seed) + i) for i in range(n_seeds)]
    os.makedirs(cfg.output["dir"], exist_ok=True)
    dump_config(cfg, os.path.join(cfg.output["dir"], "config.yaml"))
    if jobs > 1 and n_seeds > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_one, cfgs))
    else:
        rows = [_run_one(c) for c in cfgs]
    write_summary(os.path.join(cfg.output["dir"], "summary.csv"), rows)
    return rows


def _parser():
    p = argparse.ArgumentParser(prog="safeol", description="Safe online learning experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one seed from a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--output", help="override output.dir")
    s = sub.add_parser("sweep", help="run consecutive seeds from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--seeds", type=int, required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--output", help="override output.dir")
    rep = sub.add_parser("report", help="aggregate a directory of runs")
    rep.add_argument("--input", required=True)
    rep.add_argument("--output", help="where to write aggregates (default: the input directory)")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "report":
            rows = analysis.report(args.input, args.output)
            print(f"aggregated {len(rows)} rows into {args.output or args.input}")
            return 0
        cfg = load_config(args.config)
        if args.output:
            cfg = cfg.replace(output={"dir": args.output})
        if args.command == "sweep" and args.seeds < 1:
            raise SafeOLError("--seeds must be at least 1")
        n = args.seeds if args.command == "sweep" else 1
        rows = run_seeds(cfg, n, getattr(args, "jobs", 1))
        for row in rows:
            print(f"seed {row[0]}: regret {row[2]:.4f}, violations {row[3]}, width sum {row[5]:.4f}")
        return 0
    except (SafeOLError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
