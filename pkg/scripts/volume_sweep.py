#!/usr/bin/env python
"""Sweep Monte Carlo unit-ball volumes against closed forms across
exponents and dimensions, printing one line per case.

Usage: python scripts/volume_sweep.py [--seed N] [--samples M] [--dims 2 3 4]
"""

import argparse
import sys

from qnlab.geometry import volume
from qnlab.numkernel import RandomSource
from qnlab.spaces import WeightedLp


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=200_000)
    parser.add_argument("--dims", type=int, nargs="+", default=[2, 3, 4])
    args = parser.parse_args()
    rng = RandomSource(args.seed)
    worst = 0.0
    for i, p in enumerate((0.5, 2.0 / 3.0, 1.0, 2.0)):
        for d in args.dims:
            space = WeightedLp.unweighted(p, d)
            exact = volume(space, "closed-form")
            mc = volume(space, "monte-carlo", rng.split(i, d), args.samples)
            rel = abs(mc.value - exact.value) / exact.value
            worst = max(worst, rel)
            print(
                f"p={p:<8.4f} dim={d}  closed={exact.value:.6e}  "
                f"mc={mc.value:.6e} +- {mc.stderr:.1e}  rel={rel:.2e}"
            )
    print(f"worst relative deviation: {worst:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
