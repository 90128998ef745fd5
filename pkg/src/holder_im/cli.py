"""Command-line interface.

    holder-im fit data.csv [-o out.csv]
    holder-im experiment two-point --trials 100 --seed 1234
    holder-im experiment n-point --n 3 --trials 500
    holder-im coverage --method partial --n 2 --trials 10000

Exit status: 0 on success, 2 for usage or malformed input, 3 for domain errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

from .harness import (
    COVERAGE_METHODS,
    ExperimentConfig,
    coverage_estimate,
    fit_curve,
    run_n_point,
    run_two_point,
)
from .model import Dataset, DomainError, HolderConfig
from .partial_cond import OptimizerOptions

EXIT_USAGE = 2
EXIT_DOMAIN = 3


class InputError(ValueError):
    pass


def fmt(x: float) -> str:
    return format(x, ".12g")


def read_points(text: str) -> list[tuple[float, float | None]]:
    """Parse a ``t,y`` CSV; an empty ``y`` marks an unobserved design point."""
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows or [c.strip() for c in rows[0]] != ["t", "y"]:
        raise InputError("expected header 't,y'")
    points = []
    seen = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise InputError(f"row {lineno}: expected 2 fields, got {len(row)}")
        try:
            t = float(row[0])
            y = float(row[1]) if row[1].strip() else None
        except ValueError:
            raise InputError(f"row {lineno}: non-numeric value in {row!r}") from None
        if not math.isfinite(t) or (y is not None and not math.isfinite(y)):
            raise InputError(f"row {lineno}: non-finite value in {row!r}")
        if t in seen:
            raise DomainError(f"row {lineno}: duplicate t={row[0].strip()} (first on row {seen[t]})")
        seen[t] = lineno
        points.append((t, y))
    return points


def _holder_args(p: argparse.ArgumentParser):
    p.add_argument("--M", type=float, default=1.0, help="Hölder constant (default 1)")
    p.add_argument("--gamma", type=float, default=0.5, help="Hölder exponent (default 0.5)")
    p.add_argument("--sigma", type=float, default=1.0, help="noise SD (default 1)")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
    p.add_argument("--restarts", type=int, default=0, help="extra random optimizer starts")
    p.add_argument("-o", "--output", default="-", help="output file (default stdout)")


def _sim_args(p: argparse.ArgumentParser, n: int | None, trials: int | None):
    p.add_argument("--n", type=int, default=n, help="number of design points")
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=1234)
    p.add_argument("--design", choices=["uniform", "equispaced"], default="uniform")
    p.add_argument("--truth", choices=["sqrt", "zero"], default="sqrt")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holder-im",
        description="Plausibility intervals for Hölder-constrained normal means.")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit pointwise intervals to a t,y CSV")
    fit.add_argument("input", help="input CSV with header t,y ('-' for stdin)")
    _holder_args(fit)

    exp = sub.add_parser("experiment", help="width comparison experiments")
    exp.add_argument("kind", choices=["two-point", "n-point"])
    _holder_args(exp)
    _sim_args(exp, n=None, trials=None)

    cov = sub.add_parser("coverage", help="empirical coverage of each method")
    _holder_args(cov)
    _sim_args(cov, n=2, trials=10_000)
    cov.add_argument("--method", default="all",
                     choices=["all"] + [m.replace("_", "-") for m in COVERAGE_METHODS])
    return parser


def _config(args) -> tuple[HolderConfig, OptimizerOptions]:
    return (HolderConfig(M=args.M, gamma=args.gamma, sigma=args.sigma, alpha=args.alpha),
            OptimizerOptions(restarts=args.restarts, seed=0))


def cmd_fit(args, out) -> None:
    if args.input == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.input, newline="") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(str(exc)) from None
    cfg, opts = _config(args)
    points = read_points(text)
    data = Dataset.from_pairs(points)
    curve = fit_curve(data, cfg, opts=opts)
    y_at = dict(zip(data.t, data.y))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", "y", "lower", "upper"])
    for t, iv in curve:
        y = y_at.get(t)
        # repr round-trips, so re-fitting the t,y columns reproduces the data exactly
        w.writerow([repr(t), "" if y is None else repr(y), fmt(iv.lower), fmt(iv.upper)])


def _expcfg(args, n: int, trials: int) -> ExperimentConfig:
    cfg, opts = _config(args)
    return ExperimentConfig(n_points=n, trials=trials, seed=args.seed, truth=args.truth,
                            design=args.design, cfg=cfg, opts=opts)


def _default(value, fallback):
    return fallback if value is None else value


def cmd_experiment(args, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    if args.kind == "two-point":
        if args.n not in (None, 2):
            raise DomainError("two-point experiment needs --n 2")
        records = run_two_point(_expcfg(args, 2, _default(args.trials, 100)), threads=None)
        w.writerow(["trial", "B", "marginal", "mixture", "conservative"])
        for r in records:
            w.writerow([r.trial, fmt(r.bounds[0]), fmt(r.widths["marginal"]),
                        fmt(r.widths["mixture"]), fmt(r.widths["conservative"])])
    else:
        records = run_n_point(_expcfg(args, _default(args.n, 3), _default(args.trials, 500)),
                              threads=None)
        w.writerow(["trial", "point", "B_sum", "marginal", "mixture", "cond_1pt", "cond_all",
                    "covered_mixture"])
        for r in records:
            w.writerow([r.trial, r.point_index, fmt(r.B_sum)]
                       + [fmt(r.widths[k]) for k in ("marginal", "mixture", "cond_1pt",
                                                     "cond_all")]
                       + [int(r.covered["mixture"])])


def cmd_coverage(args, out) -> None:
    expcfg = _expcfg(args, args.n, args.trials)
    methods = COVERAGE_METHODS if args.method == "all" else [args.method.replace("-", "_")]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["method", "rate", "se", "trials", "alpha"])
    for m in methods:
        rate, se = coverage_estimate(expcfg, m, threads=None)
        w.writerow([m, fmt(rate), fmt(se), expcfg.trials, fmt(expcfg.cfg.alpha)])


COMMANDS = {"fit": cmd_fit, "experiment": cmd_experiment, "coverage": cmd_coverage}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    buf = io.StringIO()
    try:
        COMMANDS[args.command](args, buf)
    except InputError as exc:
        print(f"holder-im: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"holder-im: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if args.output == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.output, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return 0


if __name__ == "__main__":
    sys.exit(main())
