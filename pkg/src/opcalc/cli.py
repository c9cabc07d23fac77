"""Command-line surface: expansion tables, remainder comparisons, simplex
experiments, a Newton driver, and the invariant verifier.

Output is CSV (RFC 4180, header row mandatory) or JSON with the fixed
top-level shape {"command", "config", "rows", "invariants"}.  Floats are
serialized with 17 significant digits so values round-trip exactly.

Exit codes: 0 success, 1 invariant failure (verify), 2 usage or parse
error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .expr import DomainError, ParseError, parse
from .fixedpoint import IterationDomainError, newton
from .funcspace import DEFAULT_QUAD_CONFIG, QuadratureConfig
from .operators import UnsupportedDifferentiationError
from .simplex import (
    MonteCarloConfig, SimplexSpec, ordering_partition_check,
    remainder_by_slicing, simplex_volume_exact, simplex_volume_montecarlo,
)
from .taylor import (
    NESTED_MAX_DEPTH, evaluate_polynomial, expand, remainder_bound,
    remainder_direct, remainder_exact, remainder_nested,
)
from .verify import SUITE_NAMES, VerifyConfig, run_suites

EXIT_OK = 0
EXIT_INVARIANT_FAILURE = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

_CSV_COLUMNS = {
    "expand": ["row_type", "n", "derivative_at_base", "taylor_coefficient",
               "x", "polynomial_value"],
    "remainder": ["x", "direct", "exact_integral", "nested_integral",
                  "sliced", "bound", "max_gap"],
    "simplex": ["n", "a", "x", "samples", "seed", "exact_volume", "estimate",
                "std_error", "z_score", "classified", "discarded_duplicates",
                "chi_square", "chi_square_threshold", "max_cell_z",
                "partition_pass"],
    "fixedpoint": ["k", "iterate", "residual"],
    "verify": ["name", "pass", "measured_gap", "threshold"],
}


# ---------------------------------------------------------------------------
# Serialization (deterministic, 17 significant digits)
# ---------------------------------------------------------------------------

def format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ArithmeticError(f"non-finite value in report: {value!r}")
    return f"{value:.17g}"


def _to_json(obj) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        parts = (f"{json.dumps(str(k))}: {_to_json(v)}" for k, v in obj.items())
        return "{" + ", ".join(parts) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render_json(doc: dict) -> str:
    return _to_json(doc) + "\n"


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def render_csv(columns: list[str], records: list[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(columns)
    for record in records:
        writer.writerow([_csv_cell(record.get(c)) for c in columns])
    return buffer.getvalue()


def _emit(args, command: str, config: dict, rows: list[dict],
          invariants: list[dict]) -> None:
    if args.format == "json":
        text = render_json({"command": command, "config": config,
                            "rows": rows, "invariants": invariants})
    else:
        records = invariants if command == "verify" else rows
        text = render_csv(_CSV_COLUMNS[command], records)
    if args.out:
        with open(args.out, "w", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _points_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad points list {text!r}: {err}")


def _add_output_flags(sp, default_tol=DEFAULT_QUAD_CONFIG.abs_tolerance):
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", default=None, help="output path (default stdout)")
    sp.add_argument("--tol", type=float, default=default_tol,
                    help="absolute quadrature tolerance")
    sp.add_argument("--rel-tol", type=float, default=0.0,
                    help="relative quadrature tolerance")


def _add_point_flags(sp):
    sp.add_argument("--points", type=_points_list, default=None,
                    help="comma-separated evaluation points")
    sp.add_argument("--range", nargs=3, metavar=("LO", "HI", "COUNT"),
                    default=None, help="evenly spaced evaluation points")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opcalc",
        description="Taylor expansion by operator fixed-point iteration, "
                    "with numerically verified remainder identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("expand", help="Taylor coefficients and P_N values")
    sp.add_argument("--f", required=True, help="expression in x")
    sp.add_argument("--a", type=float, default=0.0, help="expansion base")
    sp.add_argument("--n", type=int, required=True, help="expansion order")
    _add_point_flags(sp)
    _add_output_flags(sp)

    sp = sub.add_parser("remainder", help="remainder along every route")
    sp.add_argument("--f", required=True)
    sp.add_argument("--a", type=float, default=0.0)
    sp.add_argument("--n", type=int, required=True)
    _add_point_flags(sp)
    _add_output_flags(sp)

    sp = sub.add_parser("simplex", help="order-cell volumes, exact vs Monte Carlo")
    sp.add_argument("--n", type=int, required=True, help="dimension (1..12)")
    sp.add_argument("--a", type=float, default=0.0)
    sp.add_argument("--x", type=float, default=1.0)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=2024)
    _add_output_flags(sp)

    sp = sub.add_parser("fixedpoint", help="Newton iteration trace")
    sp.add_argument("--f", required=True)
    sp.add_argument("--x0", type=float, required=True)
    sp.add_argument("--max-iter", type=int, default=50)
    _add_output_flags(sp, default_tol=1e-10)

    sp = sub.add_parser("verify", help="run the invariant suites")
    sp.add_argument("--suite", action="append", choices=SUITE_NAMES,
                    default=None, help="restrict to one suite (repeatable)")
    sp.add_argument("--perturb-basis", type=float, default=0.0,
                    help="fault-injection hook: scales the nested integral "
                         "of 1 by (1+eps) inside the basis check")
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=2024)
    _add_output_flags(sp)
    return parser


def _resolve_points(args) -> list[float]:
    points: list[float] = []
    if args.points:
        points.extend(args.points)
    if args.range:
        lo, hi = float(args.range[0]), float(args.range[1])
        count = int(float(args.range[2]))
        if count < 1:
            raise ValueError("--range COUNT must be >= 1")
        if count == 1:
            points.append(lo)
        else:
            points.extend(lo + (hi - lo) * k / (count - 1) for k in range(count))
    return points


def _quad_config(args) -> QuadratureConfig:
    return QuadratureConfig(abs_tolerance=args.tol, rel_tolerance=args.rel_tol)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_expand(args) -> int:
    f = parse(args.f)
    t = expand(f, args.a, args.n)
    points = _resolve_points(args)
    rows = []
    for n, c in enumerate(t.coefficients):
        rows.append({
            "row_type": "coefficient", "n": n, "derivative_at_base": c,
            "taylor_coefficient": c / math.factorial(n),
            "x": None, "polynomial_value": None,
        })
    for x in points:
        rows.append({
            "row_type": "evaluation", "n": None, "derivative_at_base": None,
            "taylor_coefficient": None, "x": x,
            "polynomial_value": evaluate_polynomial(t, x),
        })
    config = {"f": args.f, "a": args.a, "n": args.n, "points": points,
              "tol": args.tol, "format": args.format}
    _emit(args, "expand", config, rows, [])
    return EXIT_OK


def cmd_remainder(args) -> int:
    points = _resolve_points(args)
    if not points:
        raise ValueError("remainder requires --points or --range")
    f = parse(args.f)
    quad = _quad_config(args)
    t = expand(f, args.a, args.n)
    rows = []
    for x in points:
        direct = remainder_direct(t, x)
        exact = remainder_exact(t, x, quad)
        nested = (remainder_nested(t, x, quad)
                  if args.n + 1 <= NESTED_MAX_DEPTH else None)
        sliced = remainder_by_slicing(f, args.a, args.n, x, quad)
        bound = remainder_bound(t, x, quad)
        values = [direct, exact, sliced] + ([nested] if nested is not None else [])
        max_gap = max(abs(p - q) for p in values for q in values)
        rows.append({
            "x": x, "direct": direct, "exact_integral": exact,
            "nested_integral": nested, "sliced": sliced, "bound": bound,
            "max_gap": max_gap,
        })
    config = {"f": args.f, "a": args.a, "n": args.n, "points": points,
              "tol": args.tol, "format": args.format}
    _emit(args, "remainder", config, rows, [])
    return EXIT_OK


def cmd_simplex(args) -> int:
    spec = SimplexSpec(args.n, args.a, args.x)
    mc = MonteCarloConfig(args.samples, args.seed)
    exact = simplex_volume_exact(spec)
    estimate, std_error = simplex_volume_montecarlo(spec, mc)
    z = (estimate - exact) / std_error if std_error > 0.0 else 0.0
    row = {
        "n": args.n, "a": args.a, "x": args.x, "samples": args.samples,
        "seed": args.seed, "exact_volume": exact, "estimate": estimate,
        "std_error": std_error, "z_score": z,
        "classified": None, "discarded_duplicates": None,
        "chi_square": None, "chi_square_threshold": None,
        "max_cell_z": None, "partition_pass": None,
    }
    if 2 <= args.n <= 6:
        partition = ordering_partition_check(args.n, mc)
        row.update({
            "classified": partition.classified,
            "discarded_duplicates": partition.discarded_duplicates,
            "chi_square": partition.chi_square,
            "chi_square_threshold": partition.chi_square_threshold,
            "max_cell_z": partition.max_cell_z,
            "partition_pass": partition.passed,
        })
    config = {"n": args.n, "a": args.a, "x": args.x, "samples": args.samples,
              "seed": args.seed, "format": args.format}
    _emit(args, "simplex", config, [row], [])
    return EXIT_OK


def cmd_fixedpoint(args) -> int:
    f = parse(args.f)
    trace = newton(f, args.x0, args.tol, args.max_iter)
    rows = [{"k": 0, "iterate": trace.iterates[0], "residual": None}]
    for k, (iterate, residual) in enumerate(zip(trace.iterates[1:], trace.residuals)):
        rows.append({"k": k + 1, "iterate": iterate, "residual": residual})
    invariants = [{
        "name": "fixedpoint.converged", "pass": trace.converged,
        "measured_gap": trace.residuals[-1] if trace.residuals else 0.0,
        "threshold": args.tol,
    }]
    config = {"f": args.f, "x0": args.x0, "tol": args.tol,
              "max_iter": args.max_iter, "format": args.format}
    _emit(args, "fixedpoint", config, rows, invariants)
    return EXIT_OK


def cmd_verify(args) -> int:
    suites = tuple(args.suite) if args.suite else SUITE_NAMES
    vcfg = VerifyConfig(
        quad=_quad_config(args), samples=args.samples, seed=args.seed,
        perturb_basis=args.perturb_basis, suites=suites,
    )
    reports = run_suites(vcfg)
    invariants = [{"name": r.name, "pass": r.passed,
                   "measured_gap": r.measured_gap, "threshold": r.threshold}
                  for r in reports]
    config = {"suites": list(suites), "samples": args.samples,
              "seed": args.seed, "perturb_basis": args.perturb_basis,
              "tol": args.tol, "format": args.format}
    _emit(args, "verify", config, [], invariants)
    all_passed = all(r.passed for r in reports)
    if not all_passed:
        failed = ", ".join(r.name for r in reports if not r.passed)
        print(f"failed invariants: {failed}", file=sys.stderr)
    return EXIT_OK if all_passed else EXIT_INVARIANT_FAILURE


_HANDLERS = {
    "expand": cmd_expand,
    "remainder": cmd_remainder,
    "simplex": cmd_simplex,
    "fixedpoint": cmd_fixedpoint,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _HANDLERS[args.command](args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ArithmeticError, UnsupportedDifferentiationError,
            IterationDomainError, OverflowError) as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> None:
    sys.exit(main())
