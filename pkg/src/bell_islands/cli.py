"""Command-line front end: plot-ready tables for the Bell-island dynamics.

All times are dimensionless (Gamma*t) and rates are given as lambda/Gamma.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .bell import b_fix, b_max_many
from .channel import BellLikeState, Family, ReservoirParams, evolve_many
from .islands import (
    SweepRow,
    concurrence_threshold,
    default_time_grid,
    find_islands,
    max_threshold,
    relative_error_profile,
    sweep,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
SIG_DIGITS = 12

TRACE_COLUMNS = ("gamma_t", "p", "concurrence", "b_max", "b_fix", "violated")
BFIX_COLUMNS = ("p", "b_max", "b_fix", "delta_r")
ISLAND_COLUMNS = ("alpha_sq", "primary", "t_start", "t_end", "t_peak", "b_peak")


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _round(x):
    """Value as written: 12 significant digits, None for NaN/absent."""
    if x is None:
        return None
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(format(x, f".{SIG_DIGITS}g"))


def _csv_cell(x) -> str:
    x = _round(x)
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    return format(x, f".{SIG_DIGITS}g")


def write_table(columns: Sequence[str], rows: Iterable[Sequence], fmt: str, out) -> None:
    if fmt == "json":
        records = [{c: _round(v) for c, v in zip(columns, row)} for row in rows]
        json.dump(records, out, indent=1, allow_nan=False)
        out.write("\n")
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])


def _alpha_sq_values(args) -> list[float]:
    if args.alpha_steps is not None:
        if args.alpha_steps < 1:
            raise ConfigError("--alpha-steps must be >= 1")
        return [float(a) for a in np.linspace(0.0, 1.0, args.alpha_steps)]
    if args.alpha_sq is None:
        raise ConfigError("--alpha-sq is required")
    try:
        values = [float(v) for v in str(args.alpha_sq).split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"invalid --alpha-sq {args.alpha_sq!r}") from None
    if not values:
        raise ConfigError("--alpha-sq is empty")
    for v in values:
        if not (0.0 <= v <= 1.0):
            raise ConfigError(f"alpha^2 must lie in [0, 1], got {v}")
    return values


def _single_alpha_sq(args) -> float:
    values = _alpha_sq_values(args)
    if len(values) != 1:
        raise ConfigError("this subcommand takes a single --alpha-sq")
    return values[0]


def _params(args) -> ReservoirParams:
    if args.lambda_ratio is None:
        raise ConfigError("--lambda-ratio is required")
    return ReservoirParams.from_ratio(args.lambda_ratio)


def _time_grid(args, params: Optional[ReservoirParams]) -> np.ndarray:
    if args.t_max is None:
        raise ConfigError("--t-max is required")
    if not math.isfinite(args.t_max) or args.t_max < 0:
        raise ConfigError("--t-max must be a finite non-negative number")
    if args.t_max == 0:
        return np.zeros(1)
    if args.steps is not None:
        if args.steps < 2:
            raise ConfigError("--steps must be >= 2")
        return np.linspace(0.0, args.t_max, args.steps)
    if params is None:
        return np.linspace(0.0, args.t_max, 1001)
    return default_time_grid(params, args.t_max)


def _check_delta(args) -> None:
    if not (0.0 <= args.delta < 2.0 * math.pi):
        raise ConfigError("--delta must lie in [0, 2*pi)")


def cmd_trace(args, out) -> None:
    _check_delta(args)
    alpha_sq = _single_alpha_sq(args)
    params = None if args.profile == "markovian" else _params(args)
    rows = sweep(args.family, [alpha_sq], gamma_t_grid=_time_grid(args, params), params=params,
                 delta=args.delta, profile=args.profile, workers=args.workers)
    write_table(TRACE_COLUMNS, ([getattr(r, c) for c in TRACE_COLUMNS] for r in rows), args.format, out)


def cmd_sweep(args, out) -> None:
    _check_delta(args)
    alphas = _alpha_sq_values(args)
    if args.p_grid:
        n = args.steps if args.steps is not None else 101
        if n < 2:
            raise ConfigError("--steps must be >= 2")
        rows = sweep(args.family, alphas, p_grid=np.linspace(0.0, 1.0, n), delta=args.delta, workers=args.workers)
    else:
        params = None if args.profile == "markovian" else _params(args)
        rows = sweep(args.family, alphas, gamma_t_grid=_time_grid(args, params), params=params,
                     delta=args.delta, profile=args.profile, workers=args.workers)
    write_table(SweepRow.FIELDS, ([getattr(r, c) for c in SweepRow.FIELDS] for r in rows), args.format, out)


def cmd_islands(args, out) -> None:
    _check_delta(args)
    if args.profile == "markovian":
        raise ConfigError("island detection needs the non-Markovian profile")
    alphas = _alpha_sq_values(args)
    params = _params(args)
    gt = _time_grid(args, params)
    if gt.size < 2:
        raise ConfigError("island detection needs --t-max > 0")
    results = []
    for a2 in alphas:
        found = find_islands(args.family, math.sqrt(a2), params, gt, delta=args.delta, use_b_fix=args.use_b_fix)
        results.append((a2, found))
    if args.format == "json":
        def island(i):
            return {k: _round(getattr(i, k)) for k in ("t_start", "t_end", "t_peak", "b_peak")}

        report = {
            "family": Family.parse(args.family).value,
            "lambda_ratio": _round(args.lambda_ratio),
            "t_max": _round(args.t_max),
            "function": "b_fix" if args.use_b_fix else "b_max",
            "results": [
                {
                    "alpha_sq": _round(a2),
                    "primary": next((island(i) for i in found if i.primary), None),
                    "islands": [island(i) for i in found if not i.primary],
                }
                for a2, found in results
            ],
        }
        json.dump(report, out, indent=1, allow_nan=False)
        out.write("\n")
    else:
        rows = [(a2, i.primary, i.t_start, i.t_end, i.t_peak, i.b_peak) for a2, found in results for i in found]
        write_table(ISLAND_COLUMNS, rows, "csv", out)


def cmd_threshold(args, out) -> None:
    family = Family.parse(args.family)
    if args.maximize:
        best = max_threshold(family)
        columns = ("family", "alpha_star", "alpha_sq_star", "beta_star", "c_star")
        values = (family.value, best.alpha, best.alpha_sq, best.beta, best.c)
    else:
        alpha_sq = _single_alpha_sq(args)
        res = concurrence_threshold(family, math.sqrt(alpha_sq))
        columns = ("family", "alpha_sq", "c_threshold", "p_crossing")
        values = (family.value, alpha_sq, res.c_threshold, res.p_crossing)
    if args.format == "json":
        json.dump({c: (v if isinstance(v, str) else _round(v)) for c, v in zip(columns, values)}, out, indent=1)
        out.write("\n")
    else:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        writer.writerow([v if isinstance(v, str) else _csv_cell(v) for v in values])


def cmd_bfix_compare(args, out) -> None:
    _check_delta(args)
    alpha_sq = _single_alpha_sq(args)
    n = args.steps if args.steps is not None else 101
    if n < 2:
        raise ConfigError("--steps must be >= 2")
    ps = np.linspace(0.0, 1.0, n)
    state = BellLikeState.from_alpha_sq(args.family, alpha_sq, args.delta)
    profile = relative_error_profile(state.family, state.alpha, ps, delta=args.delta)
    bmax = b_max_many(evolve_many(state, ps))
    bfix = np.atleast_1d(b_fix(state, ps))
    rows = [(p, bm, bf, dr) for (p, dr), bm, bf in zip(profile.points, bmax, bfix)]
    write_table(BFIX_COLUMNS, rows, args.format, out)


def read_config(path: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bell-islands", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    shared = _Parser(add_help=False)
    shared.add_argument("--config", help="file of key=value defaults; flags take precedence")
    shared.add_argument("--family", type=str.lower, choices=("phi", "psi"), default="phi")
    shared.add_argument("--alpha-sq", help="alpha^2, or a comma-separated list where allowed")
    shared.add_argument("--delta", type=float, default=0.0, help="relative phase in radians")
    shared.add_argument("--lambda-ratio", type=float, help="lambda/Gamma, must be < 2")
    shared.add_argument("--t-max", type=float, help="largest Gamma*t")
    shared.add_argument("--steps", type=int, help="number of grid points")
    shared.add_argument("--format", choices=("csv", "json"), default="csv")
    shared.add_argument("--output", default="-", help="output path, '-' for stdout")

    trace = sub.add_parser("trace", parents=[shared], help="p, C, B_max and B_fix against Gamma*t")
    trace.add_argument("--profile", choices=("non-markovian", "markovian"), default="non-markovian")
    trace.add_argument("--workers", type=int, default=1)
    trace.set_defaults(handler=cmd_trace)

    isl = sub.add_parser("islands", parents=[shared], help="primary violation region and Bell islands")
    isl.add_argument("--alpha-steps", type=int, help="use alpha^2 = linspace(0, 1, N) (matrix mode)")
    isl.add_argument("--use-b-fix", action="store_true", help="detect islands on B_fix instead of B_max")
    isl.add_argument("--profile", choices=("non-markovian", "markovian"), default="non-markovian")
    isl.set_defaults(handler=cmd_islands)

    thr = sub.add_parser("threshold", parents=[shared], help="concurrence at the B_max = 2 crossing")
    thr.add_argument("--maximize", action="store_true", help="maximize the threshold over alpha")
    thr.set_defaults(handler=cmd_threshold)

    bfc = sub.add_parser("bfix-compare", parents=[shared], help="B_max against B_fix over p in [0, 1]")
    bfc.set_defaults(handler=cmd_bfix_compare)

    swp = sub.add_parser("sweep", parents=[shared], help="full table over an alpha^2 x time grid")
    swp.add_argument("--alpha-steps", type=int, help="use alpha^2 = linspace(0, 1, N)")
    swp.add_argument("--p-grid", action="store_true", help="sweep p in [0, 1] instead of time")
    swp.add_argument("--profile", choices=("non-markovian", "markovian"), default="non-markovian")
    swp.add_argument("--workers", type=int, default=1)
    swp.set_defaults(handler=cmd_sweep)

    for p in (trace, thr, bfc):
        p.set_defaults(alpha_steps=None)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    values = read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in values.items():
        action = known.get(key)
        if action is None or key in ("config", "help"):
            raise ConfigError(f"unknown config key {key!r} for {args.command}")
        if action.nargs == 0:
            if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ConfigError(f"config key {key!r} expects a boolean")
            defaults[key] = value.lower() in ("true", "1", "yes")
        else:
            defaults[key] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        if getattr(args, "workers", 1) < 1:
            raise ConfigError("--workers must be >= 1")
        buf = io.StringIO()
        args.handler(args, buf)
    except ValueError as exc:
        print(f"bell-islands: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"bell-islands: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = buf.getvalue()
    if args.output == "-":
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head)
            sys.stdout = open(os.devnull, "w")
    else:
        try:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"bell-islands: error: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
            return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
