"""Command-line front end.

Exit codes: 0 success, 1 I/O error, 2 validation error, 3 failed verification
(or a quadrature that did not converge).
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .empirical import empirical_metrics, load_event
from .errors import ConvergenceError, ValidationError
from .io import dumps, empirical_report_to_dict, load_model, metrics_report_to_dict
from .model import (
    AtTime,
    EventModel,
    area_closed_form,
    mean_cum_outages,
    mean_cum_restores,
    metrics,
    model_summary,
)
from .montecarlo import ConstantQuantity, SimulationConfig, simulate, uniform_grid, z_score
from .numerics import Tolerance
from .verify import verify_model

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_VERIFY = 0, 1, 2, 3
TOL_ENV = "RESIL_DEFAULT_TOL"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.10g}"


def _line(key: str, value: str, note: str = "") -> str:
    return f"{key:<22} {value}" + (f"  {note}" if note else "")


def _tolerance(arg: float | None) -> Tolerance:
    value = arg
    if value is None and os.environ.get(TOL_ENV):
        try:
            value = float(os.environ[TOL_ENV])
        except ValueError:
            raise CliError(f"{TOL_ENV} is not a number: {os.environ[TOL_ENV]!r}", EXIT_VALIDATION)
    if value is None:
        return Tolerance()
    return Tolerance(abs_tol=value, rel_tol=value)


def _model(path: str) -> EventModel:
    try:
        return load_model(path)
    except OSError as exc:
        raise CliError(f"cannot read model file: {exc}", EXIT_IO)


def cmd_metrics(args) -> int:
    m = _model(args.model)
    tol = _tolerance(args.tol)
    report = metrics(m, tol)
    if args.json:
        print(dumps(metrics_report_to_dict(report, m, tol)))
        return EXIT_OK
    nd = report.nadir
    lines = [
        _line("model", model_summary(m)),
        _line("area", _fmt(report.area), "closed form"),
        _line("area_numeric", _fmt(report.area_numeric), "quadrature"),
        _line("area_discrepancy", f"{report.area_discrepancy:.3g}"),
        _line("nadir", _fmt(nd.value)),
    ]
    if isinstance(nd.location, AtTime):
        lines.append(_line("nadir_time", _fmt(nd.location.t)))
    else:
        lines.append(_line("nadir_interval", f"{_fmt(nd.location.t_lo)} {_fmt(nd.location.t_hi)}"))
    lines += [
        _line("mean_outage_time", _fmt(report.mean_outage_time)),
        _line("mean_restore_time", _fmt(report.mean_restore_time)),
    ]
    lines += [_line(k, _fmt(v), "h") for k, v in report.durations.items()]
    print("\n".join(lines))
    return EXIT_OK


def _open_out(path: str):
    try:
        return open(path, "w", newline="")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO)


def cmd_curve(args) -> int:
    m = _model(args.model)
    if not (math.isfinite(args.t_max) and args.t_max > 0):
        raise CliError("--t-max must be > 0", EXIT_VALIDATION)
    if args.steps < 2:
        raise CliError("--steps must be >= 2", EXIT_VALIDATION)
    t = np.linspace(0.0, args.t_max, args.steps + 1)
    o = mean_cum_outages(m, t)
    r = mean_cum_restores(m, t)
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "O_bar", "R_bar", "P_bar"])
        for row in zip(t, o, r, r - o):
            w.writerow([repr(float(x)) for x in row])
    print(f"wrote {args.steps + 1} rows to {args.out}")
    return EXIT_OK


def cmd_empirical(args) -> int:
    try:
        event = load_event(args.data)
    except OSError as exc:
        raise CliError(f"cannot read data file: {exc}", EXIT_IO)
    rep = empirical_metrics(event)
    if args.json:
        print(dumps(empirical_report_to_dict(rep, args.data)))
        return EXIT_OK
    print("\n".join([
        _line("records", str(rep.n)),
        _line("total_quantity", _fmt(rep.total_quantity)),
        _line("area", _fmt(rep.area), "sum of quantity * repair time"),
        _line("area_pairwise", _fmt(rep.area_pairwise), "weighted restore times - weighted outage times"),
        _line("nadir", _fmt(rep.nadir)),
        _line("nadir_time", _fmt(rep.nadir_time)),
        _line("duration", _fmt(rep.duration), "h"),
        _line("mean_repair_time", _fmt(rep.mean_repair_time), "h"),
    ]))
    return EXIT_OK


def cmd_simulate(args) -> int:
    m = _model(args.model)
    if args.grid_steps < 1 or not (math.isfinite(args.grid_max) and args.grid_max > 0):
        raise CliError("--grid-max must be > 0 and --grid-steps >= 1", EXIT_VALIDATION)
    qm = ConstantQuantity(args.quantity_mean if args.quantity_mean is not None else 1.0)
    cfg = SimulationConfig(
        realizations=args.realizations,
        seed=args.seed,
        grid=uniform_grid(args.grid_max, args.grid_steps),
        quantity_model=qm,
        workers=args.workers,
    )
    res = simulate(m, cfg)
    closed = area_closed_form(m)
    single = args.realizations < 2
    z = z_score(res.area.mean, res.area.stderr, res.expected_area)
    print("\n".join([
        _line("realizations", str(args.realizations)),
        _line("seed", str(args.seed)),
        _line("components", str(res.n), f"quantity {_fmt(qm.mean)} each"),
        _line("mc_area", _fmt(res.area.mean)),
        _line("mc_area_stderr", "n/a" if single else _fmt(res.area.stderr)),
        _line("closed_form_area", _fmt(closed)),
        _line("expected_area", _fmt(res.expected_area), "n * quantity * (rbar - obar)"),
        _line("z", "n/a" if single else f"{z:.4f}"),
        _line("realized_nadir_mean", _fmt(res.realized_nadir_mean)),
        _line("positive_fraction", _fmt(res.positive_fraction)),
    ]))
    if args.out:
        with _open_out(args.out) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "mean", "stderr"])
            for row in zip(res.curve.grid, res.curve.mean, res.curve.stderr):
                w.writerow([repr(float(x)) for x in row])
    return EXIT_OK


def cmd_verify(args) -> int:
    m = _model(args.model)
    if args.realizations < 2:
        raise CliError("--realizations must be >= 2", EXIT_VALIDATION)
    checks = verify_model(m, args.realizations, args.seed, _tolerance(None), args.tolerance_scale)
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:<{width}}  {c.detail}")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="resil", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("metrics", help="closed-form metrics of a model file")
    s.add_argument("--model", required=True)
    s.add_argument("--json", action="store_true")
    s.add_argument("--tol", type=float, help=f"quadrature tolerance (default 1e-9 or ${TOL_ENV})")
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("curve", help="write mean curves O_bar, R_bar, P_bar as CSV")
    s.add_argument("--model", required=True)
    s.add_argument("--t-max", type=float, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_curve)

    s = sub.add_parser("empirical", help="metrics of a recorded event CSV")
    s.add_argument("--data", required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_empirical)

    s = sub.add_parser("simulate", help="Monte Carlo estimate of area and mean curve")
    s.add_argument("--model", required=True)
    s.add_argument("--realizations", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--grid-max", type=float, required=True)
    s.add_argument("--grid-steps", type=int, required=True)
    s.add_argument("--quantity-mean", type=float)
    s.add_argument("--out")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("verify", help="cross-check formulas against quadrature and simulation")
    s.add_argument("--model", required=True)
    s.add_argument("--realizations", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tolerance-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
