"""Command-line front end.

Exit codes: 0 success, 2 converged only at the precision floor (or not at
all) / uncertified, 1 usage or computation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from itertools import groupby

from . import driver
from .errors import SteklovError
from .geometry import ShellConfig, derive_frame
from .output import (Table, convergence_table, emit_csv, emit_json, eigenfunction_table, modes_table,
                     sweep_table, table1_table, validation_table)
from .plotting import Axes, Series, emit_svg
from .precision import get_arith
from .rayleigh import truncated_eigenfunction

EXIT_OK, EXIT_ERROR, EXIT_INCOMPLETE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not val > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return val


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--precision", choices=("binary64", "extended"), default="binary64")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-", help="output file (default: stdout)")
    p.add_argument("--svg", help="also write a chart to this SVG file")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_problem(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=1, help="space is R^(n+2)")
    p.add_argument("--r1", type=_positive, default=1.0)
    p.add_argument("--r2", type=_positive, default=3.0)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--t", type=float, help="distance between the centres")
    g.add_argument("--t-ratio", type=float, help="t / (r2 - r1)")


def _add_convergence(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eta-tol", type=_positive, default=driver.DEFAULT_ETA_TOL)
    p.add_argument("--kmax", type=int, default=driver.DEFAULT_K_MAX)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="steklov-shell",
                     description="Steklov-Dirichlet eigenvalues of eccentric spherical shells")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eigen", help="converge sigma_1 by doubling N")
    _add_problem(p)
    _add_convergence(p)
    p.add_argument("--rank", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("validate", help="converge, then certify via E_{m,N}")
    _add_problem(p)
    _add_convergence(p)
    p.add_argument("--N", type=int, dest="N_fixed", help="use this N instead of the converged one")
    p.add_argument("--cert-tol", type=_positive)
    p.add_argument("--quad-tol", type=_positive)
    p.add_argument("--m-step", type=int, default=4)
    _add_common(p)

    p = sub.add_parser("sweep", help="run a parameter grid")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--grid-file", help="JSON grid spec with lists n, r1, r2, t_ratio, rank")
    src.add_argument("--grid", choices=sorted(driver.EXAMPLE_GRIDS), help="built-in grid")
    _add_convergence(p)
    p.add_argument("--validate", action="store_true", help="also compute E for rank-1 points")
    p.add_argument("--cert-tol", type=_positive)
    p.add_argument("--quad-tol", type=_positive)
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("table1", help="eta_k table for r1 = 1, r2 = 3")
    _add_common(p)

    p = sub.add_parser("modes", help="the smallest axisymmetric eigenvalues")
    _add_problem(p)
    _add_convergence(p)
    p.add_argument("--rank", type=int, default=3, help="how many modes")
    _add_common(p)

    p = sub.add_parser("eigenfunction", help="series coefficients of the truncated eigenfunction")
    _add_problem(p)
    p.add_argument("--m", type=int, default=32)
    p.add_argument("--rank", type=int, default=1)
    _add_common(p)
    return parser


def _config(args) -> ShellConfig:
    if args.t_ratio is not None:
        return ShellConfig.from_ratio(args.n, args.r1, args.r2, args.t_ratio)
    return ShellConfig(args.n, args.r1, args.r2, args.t)


def _emit(table, args) -> None:
    if args.format == "csv":
        emit_csv(table, args.out, args.precision)
    else:
        emit_json(table, args.out, args.precision)


def _summary(msg: str) -> None:
    print(msg, file=sys.stderr)


def _cmd_eigen(args, ar) -> int:
    cfg = _config(args)
    if cfg.t == 0:
        if args.rank != 1:
            raise ValueError("no concentric reference for rank > 1 at t = 0")
        sigma = driver.concentric_exact(cfg.n, cfg.r1, cfg.r2, ar)
        meta = {"n": cfg.n, "r1": cfg.r1, "r2": cfg.r2, "t": 0.0, "t_ratio": 0.0, "rank": 1,
                "precision": ar.name, "sigma": sigma, "converged": True, "status": "closed_form"}
        _emit(Table("convergence", ("k", "N", "sigma", "eta"), [], meta), args)
        _summary(f"sigma = {ar.fmt(sigma)} (concentric closed form)")
        return EXIT_OK
    rep = driver.converge_sigma(cfg, args.rank, args.eta_tol, args.kmax, ar)
    _emit(convergence_table(rep), args)
    label = f" [{driver.HIGHER_MODE_LABEL}]" if args.rank > 1 else ""
    _summary(f"sigma = {ar.fmt(rep.sigma)} at N = {rep.final_N} ({rep.status}){label}")
    if args.svg:
        emit_svg([Series("", [s.k for s in rep.records], [s.eta for s in rep.records])],
                 Axes("k  (N = 2^k)", "eta_k", logy=True), args.svg)
    return EXIT_OK if rep.converged else EXIT_INCOMPLETE


def _cmd_validate(args, ar) -> int:
    cfg = _config(args)
    rep = None
    if args.N_fixed is None:
        rep = driver.converge_sigma(cfg, 1, args.eta_tol, args.kmax, ar)
        N = rep.final_N
    else:
        N = args.N_fixed
    schedule = driver.default_m_schedule(N, args.m_step)
    val = driver.validate_sigma(cfg, rep, schedule, args.cert_tol, args.N_fixed, args.quad_tol, ar)
    _emit(validation_table(val), args)
    m, E = val.best
    _summary(f"sigma = {ar.fmt(val.sigma)} at N = {val.N}; min E = {ar.fmt(E)} at m = {m}; "
             f"{'certified' if val.certified else 'NOT certified'}")
    if args.svg:
        emit_svg([Series("", [r[0] for r in val.records], [r[1] for r in val.records])],
                 Axes("m", "E_{m,N}", f"N = {val.N}", logy=True), args.svg)
    ok = val.certified and (rep is None or rep.converged)
    return EXIT_OK if ok else EXIT_INCOMPLETE


def _load_grid(args):
    if args.grid:
        return driver.EXAMPLE_GRIDS[args.grid]
    with open(args.grid_file, encoding="utf-8") as fh:
        spec = json.load(fh)
    if not isinstance(spec, dict):
        raise ValueError("grid file must hold a JSON object")
    return driver.SweepGrid.from_dict(spec)


def _cmd_sweep(args, ar) -> int:
    grid = _load_grid(args)
    opts = driver.SweepOptions(args.eta_tol, args.kmax, args.validate, args.cert_tol,
                               args.quad_tol, ar.name)
    records = driver.sweep(grid, opts, args.workers)
    _emit(sweep_table(records, ar.name), args)
    failed = [r for r in records if r.error]
    unconverged = [r for r in records if not r.error and not r.converged]
    _summary(f"{len(records)} records, {len(failed)} failed, {len(unconverged)} unconverged")
    if args.svg:
        key = lambda r: (r.n, r.r1, r.r2, r.rank)  # noqa: E731
        series = []
        for (n, r1, r2, rank), grp in groupby((r for r in records if r.sigma is not None), key):
            grp = list(grp)
            series.append(Series(f"n={n} r1={r1:g} r2={r2:g} rank={rank}",
                                 [r.t_ratio for r in grp], [r.sigma for r in grp]))
        if series:
            emit_svg(series, Axes("t / (r2 - r1)", "sigma"), args.svg)
    return EXIT_OK if not failed and not unconverged else EXIT_INCOMPLETE


def _cmd_table1(args, ar) -> int:
    rows = driver.table1(ar)
    _emit(table1_table(rows, ar.name), args)
    if args.svg:
        series = [Series(f"n={n} ratio={ratio:g}", [r.k for r in grp], [r.eta for r in grp])
                  for (n, ratio), grp in ((key, list(g)) for key, g in
                                          groupby(rows, lambda r: (r.n, r.t_ratio)))]
        emit_svg(series, Axes("k", "eta_k", logy=True), args.svg)
    return EXIT_OK


def _cmd_modes(args, ar) -> int:
    cfg = _config(args)
    if cfg.t == 0:
        raise ValueError("no concentric reference for rank > 1 at t = 0")
    reports = driver.modes(cfg, args.rank, args.eta_tol, args.kmax, ar)
    _emit(modes_table(reports), args)
    if args.svg:
        emit_svg([Series("", [r.rank for r in reports], [r.sigma for r in reports])],
                 Axes("rank", "sigma"), args.svg)
    return EXIT_OK if all(r.converged for r in reports) else EXIT_INCOMPLETE


def _cmd_eigenfunction(args, ar) -> int:
    cfg = _config(args)
    u = truncated_eigenfunction(derive_frame(cfg, ar), cfg.n, args.m, args.rank)
    _emit(eigenfunction_table(u, cfg), args)
    if args.svg:
        emit_svg([Series("", list(range(u.m)), [abs(c) for c in u.coeffs])],
                 Axes("k", "|C_k|", f"m = {u.m}", logy=True), args.svg)
    return EXIT_OK


COMMANDS = {"eigen": _cmd_eigen, "validate": _cmd_validate, "sweep": _cmd_sweep,
            "table1": _cmd_table1, "modes": _cmd_modes, "eigenfunction": _cmd_eigenfunction}


def run(argv=None) -> int:
    """Parse ``argv`` and run one command; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, get_arith(args.precision))
    except (SteklovError, ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
