#!/usr/bin/env python3
"""Monte Carlo convergence study for ordered-simplex volumes.

Sweeps sample counts, comparing the hit-fraction estimate of the order
cell {a <= t_n <= ... <= t_1 <= x} against the closed form (x-a)^n/n!.

Example:
    python scripts/simplex_experiment.py --n 3 --seed 42
"""

import argparse
import math
import sys
from pathlib import Path

_SRC = Path(__file__).resolve().parents[1] / "src"
if str(_SRC) not in sys.path:
    sys.path.insert(0, str(_SRC))

from opcalc.simplex import (
    MonteCarloConfig, SimplexSpec, ordering_partition_check,
    simplex_volume_exact, simplex_volume_montecarlo,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=3, help="dimension (1..12)")
    ap.add_argument("--a", type=float, default=0.0)
    ap.add_argument("--x", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--max-exponent", type=int, default=6,
                    help="largest sample count is 10**this")
    args = ap.parse_args()

    spec = SimplexSpec(args.n, args.a, args.x)
    exact = simplex_volume_exact(spec)
    print(f"exact volume of the {args.n}-dimensional order cell: {exact:.10f}")
    print(f"{'samples':>10} {'estimate':>14} {'std_error':>12} {'z':>8}")
    for k in range(2, args.max_exponent + 1):
        samples = 10 ** k
        est, se = simplex_volume_montecarlo(spec, MonteCarloConfig(samples, args.seed))
        z = (est - exact) / se if se > 0 else 0.0
        print(f"{samples:>10} {est:14.8f} {se:12.2e} {z:8.2f}")

    if 2 <= args.n <= 6:
        cells = math.factorial(args.n)
        report = ordering_partition_check(
            args.n, MonteCarloConfig(10 ** args.max_exponent, args.seed))
        print(f"\npartition into {cells} order cells "
              f"({report.total_samples} samples):")
        print(f"  classified {report.classified}, "
              f"discarded duplicates {report.discarded_duplicates}")
        print(f"  chi-square {report.chi_square:.3f} "
              f"(99.9% threshold {report.chi_square_threshold:.3f})")
        print(f"  max cell z-score {report.max_cell_z:.2f}")
        print(f"  verdict: {'pass' if report.passed else 'FAIL'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
