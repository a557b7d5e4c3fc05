#!/usr/bin/env python
"""Run every verification suite and write one JSON report per suite.

Usage: python scripts/run_all_suites.py [--seed N] [--outdir reports/]
"""

import argparse
import pathlib
import sys

from qnlab.harness import ExperimentConfig, run, suite_names, write_report


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--outdir", type=pathlib.Path, default=pathlib.Path("reports"))
    args = parser.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name in suite_names():
        report = run(ExperimentConfig(experiment=name, seed=args.seed))
        path = args.outdir / (name.replace(":", "-") + ".json")
        write_report(report, str(path))
        status = (
            "OBSERVATIONAL"
            if report.observational
            else ("PASS" if report.passed else "FAIL")
        )
        print(f"{name:24s} {status:13s} {report.wallclock_seconds:7.2f}s -> {path}")
        worst = max(worst, report.exit_code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
