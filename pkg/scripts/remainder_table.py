#!/usr/bin/env python3
"""Print the Taylor remainder of a function along every route, per order.

Example:
    python scripts/remainder_table.py --f "exp(x)" --a 0 --x 1 --max-order 5
"""

import argparse
import sys
from pathlib import Path

_SRC = Path(__file__).resolve().parents[1] / "src"
if str(_SRC) not in sys.path:
    sys.path.insert(0, str(_SRC))

from opcalc.expr import parse
from opcalc.simplex import remainder_by_slicing
from opcalc.taylor import (
    NESTED_MAX_DEPTH, expand, remainder_bound, remainder_direct,
    remainder_exact, remainder_nested,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f", default="exp(x)", help="expression in x")
    ap.add_argument("--a", type=float, default=0.0, help="expansion base")
    ap.add_argument("--x", type=float, default=1.0, help="evaluation point")
    ap.add_argument("--max-order", type=int, default=5)
    args = ap.parse_args()

    f = parse(args.f)
    print(f"remainder routes for f={args.f}, a={args.a}, x={args.x}")
    header = f"{'N':>2} {'direct':>14} {'exact':>14} {'nested':>14} {'sliced':>14} {'bound':>14}"
    print(header)
    print("-" * len(header))
    for order in range(args.max_order + 1):
        t = expand(f, args.a, order)
        direct = remainder_direct(t, args.x)
        exact = remainder_exact(t, args.x)
        sliced = remainder_by_slicing(f, args.a, order, args.x)
        nested = (f"{remainder_nested(t, args.x):14.6e}"
                  if order + 1 <= NESTED_MAX_DEPTH else f"{'-':>14}")
        bound = remainder_bound(t, args.x)
        print(f"{order:>2} {direct:14.6e} {exact:14.6e} {nested} "
              f"{sliced:14.6e} {bound:14.6e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
