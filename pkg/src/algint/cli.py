"""algint command line.

Data goes to stdout (or --output); progress and errors go to stderr.
Exit codes: 0 success, 1 invalid input, 2 budget or tolerance failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import census, density, limits, verify
from .poly import UnsupportedDegreeError, format_monic, MonicIntPoly
from .quadrature import ToleranceNotAchieved
from .realroots import RationalInterval

log = logging.getLogger("algint")

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2


class ValidationError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


# ---------------------------------------------------------------------------
# parsing helpers


def rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from e


def rational_list(text: str) -> list[Fraction]:
    return [rational(s) for s in text.split(",") if s.strip()]


def int_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not an integer list: {text!r}") from e


def parse_bins(text: str, Q: int) -> list[RationalInterval]:
    """``whole``, ``uniform``, ``uniform:W`` or ``lo:hi,lo:hi,...``."""
    text = text.strip()
    if text == "whole":
        return [census.whole_line_bin(Q)]
    if text.startswith("uniform"):
        _, _, w = text.partition(":")
        return census.uniform_bins(Q, Fraction(w) if w else Fraction(1, 2))
    try:
        return [RationalInterval.parse(part) for part in text.split(",")]
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"bad --bins value {text!r}: {e}") from e


def parse_grid(text: str) -> list[Fraction]:
    """``lo:hi:count`` evenly spaced, endpoints included."""
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = Fraction(lo), Fraction(hi), int(count)
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"grid must look like lo:hi:count, got {text!r}") from e
    if count < 1:
        raise ValidationError("grid count must be positive")
    if count == 1:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def _json_value(x):
    if x is None:
        return None
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return str(x)


def render(fields: Sequence[str], rows: Sequence[dict], fmt: str) -> str:
    if fmt == "json":
        data = [{f: _json_value(r.get(f)) for f in fields} for r in rows]
        return json.dumps(data, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_fmt(r.get(f)) for f in fields])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommands


def cmd_census(args):
    n, Q = args.degree, args.qmax
    bins = parse_bins(args.bins, Q)
    table = census.run_census(n, Q, bins, jobs=args.jobs, budget=args.budget)
    fields = ["n", "Q", "bin_lo", "bin_hi", "omega_count", *[f"N{k}" for k in range(1, n + 1)],
              "reducible_count", "irreducible_count", "max_abs_root_upper"]
    residuals = None
    if args.compare:
        fields += ["integral", "integral_err", "residual", "normalized_residual",
                   "refined_residual", "refined_normalized"]
        ints = [density.integrate_omega_over(n, 1 / Q, b, args.tol) for b in table.bins]
        residuals = census.compare_census_to_integral(table, ints)
    rows = []
    for i, b in enumerate(table.bins):
        row = {"n": n, "Q": Q, "bin_lo": b.lo, "bin_hi": b.hi, "omega_count": table.omega[i]}
        row.update({f"N{k}": table.N[i][k - 1] for k in range(1, n + 1)})
        if residuals:
            r = residuals[i]
            row.update(integral=r.integral, integral_err=r.integral_err, residual=r.residual,
                       normalized_residual=r.normalized, refined_residual=r.refined,
                       refined_normalized=r.refined_normalized)
        rows.append(row)
    rows.append({"n": n, "Q": Q, "omega_count": table.omega_total,
                 "reducible_count": table.reducible_count,
                 "irreducible_count": table.irreducible_count,
                 "max_abs_root_upper": table.max_abs_root_upper})
    return fields, rows


def _check_mc(args):
    if args.method == "mc" and args.seed is None:
        raise ValidationError("--seed is required with --method mc")


def _t_values(args) -> list[Fraction]:
    if (args.t is None) == (args.t_grid is None):
        raise ValidationError("give exactly one of --t and --t-grid")
    return [args.t] if args.t is not None else parse_grid(args.t_grid)


def cmd_density(args):
    _check_mc(args)
    n, xi = args.degree, args.xi
    if n < 2:
        raise ValidationError("--degree must be >= 2")
    if not 0 < xi <= 1:
        raise ValidationError("--xi must lie in (0, 1]")
    rows = []
    for i, t in enumerate(_t_values(args)):
        seed = None if args.seed is None else args.seed + 2 * i
        w = density.omega(n, xi, t, args.method, args.samples, seed)
        p = density.phi(n - 1, t, args.method, args.samples, None if seed is None else seed + 1)
        rows.append({"n": n, "xi": xi, "t": t, "omega": w.value, "phi": p.value,
                     "method": w.method, "err": w.err})
    return ["n", "xi", "t", "omega", "phi", "method", "err"], rows


def cmd_profile(args):
    n, xi = args.degree, float(args.xi)
    grid = parse_grid(args.t_grid) if args.t_grid else list(np.linspace(0, 1 / xi + 2, 200))
    prof = limits.convergence_profile(n, xi, [float(t) for t in grid], args.kappa1, args.kappa2)
    rows = [vars(r) for r in prof]
    return ["n", "xi", "t", "omega", "phi", "absdiff", "regime", "bound"], rows


def cmd_idiff(args):
    rows = []
    for xi in args.xi:
        r = limits.idiff(args.degree, float(xi), args.tol)
        rows.append({"n": args.degree, "xi": xi, "value": r.value, "err": r.err})
    return ["n", "xi", "value", "err"], rows


def cmd_thresholds(args):
    rows = []
    for xi in args.xi:
        ts = limits.thresholds(args.degree, float(xi), args.kind)
        for i, v in enumerate(ts.values, 1):
            rows.append({"n": args.degree, "xi": xi, "kind": ts.kind, "name": f"t{i}", "value": v})
    return ["n", "xi", "kind", "name", "value"], rows


def cmd_gaps(args):
    rows = []
    for Q in args.qmax:
        for x0 in args.x0:
            d, p = census.nearest_to_rational(args.degree, Q, x0, jobs=args.jobs,
                                              budget=args.budget, with_poly=True)
            scaled = d * x0.denominator**args.degree * Q
            rows.append({"n": args.degree, "Q": Q, "x0": x0, "distance": float(d),
                         "distance_lower": d, "scaled": float(scaled),
                         "poly": format_monic(MonicIntPoly(p[:-1]))})
    return ["n", "Q", "x0", "distance", "distance_lower", "scaled", "poly"], rows


def cmd_reducible(args):
    n = args.degree
    rows = []
    for Q in args.qmax:
        r = census.count_reducible(n, Q, jobs=args.jobs, budget=args.budget)
        norm = 2 * Q * math.log(Q) if n == 2 else Q ** (n - 1)
        rows.append({"n": n, "Q": Q, "reducible_count": r, "normalized": r / norm})
    return ["n", "Q", "reducible_count", "normalized"], rows


def cmd_verify(args):
    rows = []
    rows += verify.jacobian_suite(args.seed, args.count)
    rows += verify.offset_gap_suite(args.seed, args.count)
    rows += verify.section_suite(args.seed, args.count)
    rows += verify.two_root_suite(3, args.samples, args.seed, args.ratio_cap)
    out = [{"check": r.check, "params": r.params, "measured": r.measured,
            "reference": r.reference, "pass": r.passed} for r in rows]
    return ["check", "params", "measured", "reference", "pass"], out


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", help="write data here instead of stdout")
    common.add_argument("--jobs", type=int, help="worker processes (default: ALGINT_JOBS or 1)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="algint", description="Counting and density tools for real algebraic integers.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("census", cmd_census, "exact root counts per bin")
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--qmax", type=int, required=True)
    sp.add_argument("--bins", default="uniform")
    sp.add_argument("--budget", type=int)
    sp.add_argument("--compare", action="store_true", help="add Q^n int omega residual columns")
    sp.add_argument("--tol", type=float, default=1e-6)

    sp = add("density", cmd_density, "omega_n and phi_{n-1} at points")
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--xi", type=rational, required=True)
    sp.add_argument("--t", type=rational)
    sp.add_argument("--t-grid")
    sp.add_argument("--method", choices=("exact", "mc"), default="exact")
    sp.add_argument("--samples", type=int, default=10**6)
    sp.add_argument("--seed", type=int)

    sp = add("profile", cmd_profile, "omega_n - phi_{n-1} along a grid")
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--xi", type=rational, required=True)
    sp.add_argument("--t-grid")
    sp.add_argument("--kappa1", type=float)
    sp.add_argument("--kappa2", type=float, default=2.0)

    sp = add("idiff", cmd_idiff, "whole-line integral of omega_n - phi_{n-1}")
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--xi", type=rational_list, required=True)
    sp.add_argument("--tol", type=float, default=1e-4)

    sp = add("thresholds", cmd_thresholds, "critical t values")
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--xi", type=rational_list, required=True)
    sp.add_argument("--kind", choices=("quadratic", "general"))

    sp = add("gaps", cmd_gaps, "distance from rationals to the nearest algebraic integer")
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--qmax", type=int_list, required=True)
    sp.add_argument("--x0", type=rational_list, required=True)
    sp.add_argument("--budget", type=int)

    sp = add("reducible", cmd_reducible, "count reducible monic polynomials")
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--qmax", type=int_list, required=True)
    sp.add_argument("--budget", type=int)

    sp = add("verify", cmd_verify, "seeded geometric checks")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--samples", type=int, default=10**6)
    sp.add_argument("--ratio-cap", type=float, default=1.0)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ValidationError as e:
        print(f"algint: {e}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.jobs is not None and args.jobs < 1:
            raise ValidationError("--jobs must be >= 1")
        fields, rows = args.func(args)
    except (census.BudgetExceededError, ToleranceNotAchieved) as e:
        print(f"algint: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, ZeroDivisionError, UnsupportedDegreeError) as e:
        print(f"algint: {e}", file=sys.stderr)
        return EXIT_INVALID
    text = render(fields, rows, args.format)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
