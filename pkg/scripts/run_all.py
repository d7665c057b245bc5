#!/usr/bin/env python3
"""Run every example experiment config and summarize the outputs.

Usage: python scripts/run_all.py [--outdir DIR]

Each sweep resumes idempotently: finished grid points found in the output
CSVs are reused, so interrupting and rerunning is cheap.
"""

import argparse
import sys
import time
from pathlib import Path

from dyadicop.experiments import load_config, run_experiment

CONFIG_DIR = Path(__file__).parent / "configs"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default=None, help="override output_dir of every config")
    parser.add_argument("--only", default=None, help="run a single experiment by name")
    args = parser.parse_args()

    status = 0
    for path in sorted(CONFIG_DIR.glob("*.cfg")):
        config = load_config(path)
        if args.only and config.experiment != args.only:
            continue
        if args.outdir:
            from dataclasses import replace

            config = replace(config, output_dir=args.outdir)
        t0 = time.perf_counter()
        print(f"== {config.experiment} ({path.name})")
        csv_path, new = run_experiment(config, verbose=True)
        print(f"   -> {csv_path} ({len(new)} new grid points, {time.perf_counter()-t0:.1f}s)")
    return status


if __name__ == "__main__":
    sys.exit(main())
