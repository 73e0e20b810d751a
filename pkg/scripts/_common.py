"""Shared driver for the per-scenario experiment scripts."""

import argparse
import time
from pathlib import Path

from crnsw.harness import ExperimentConfig, emit_outputs, run_experiment


def run(scenario: str, **defaults) -> None:
    ap = argparse.ArgumentParser(description=f"Run the {scenario} sweep.")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--seed-offset", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    cfg = ExperimentConfig(scenario, seeds=args.seeds, seed_offset=args.seed_offset, **defaults)
    t = time.perf_counter()
    res = run_experiment(cfg, jobs=args.jobs)
    files = emit_outputs([res], args.out / scenario)
    print(f"{scenario}: {len(res.rows)} rows in {time.perf_counter() - t:.1f}s -> {files[0]}")
