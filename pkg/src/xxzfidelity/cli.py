"""Command-line interface.

Exit codes: 0 success, 1 numerical or oracle failure, 2 usage/validation error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
import warnings
from dataclasses import asdict, fields
from pathlib import Path

import numpy as np

from . import bosonsim, luttinger
from .errors import DivergenceError, DomainError
from .sweep import (ConfigError, InsufficientDataError, PeakAtBoundaryWarning, SweepConfig,
                    config_from_dict, extrapolate, from_csv, json_dumps, locate_peak,
                    run_sweep, to_csv, to_json, _fmt)

log = logging.getLogger("xxzfidelity")

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _write(out: str | None, text: str):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    if not path.parent.exists():
        raise UsageError(f"output directory {path.parent} does not exist")
    path.write_text(text)


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(v if isinstance(v, str) else _fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


# --- sweep ------------------------------------------------------------------

_SWEEP_FLAGS = {
    # flag dest -> SweepConfig field
    "L": "L_list", "bc": "bc", "lambda_min": "lambda_min", "lambda_max": "lambda_max",
    "steps": "steps", "dlambda": "delta_lambda", "tol": "tol", "max_iter": "max_iter",
    "seed": "seed", "modes": "mode_count_convention", "scan_mode": "scan_mode",
    "fit_powers": "fit_powers",
}


def _modes_arg(s: str):
    if s == "L":
        return "L"
    try:
        m = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError("--modes takes 'L' or a non-negative integer")
    if m < 0:
        raise argparse.ArgumentTypeError("--modes must be non-negative")
    return m


def build_sweep_config(args) -> SweepConfig:
    values = asdict(SweepConfig())
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {args.config}: {e}")
        values.update(asdict(config_from_dict(loaded)))
        explicit_cfg = set(loaded)
    else:
        explicit_cfg = set()
    for dest, name in _SWEEP_FLAGS.items():
        v = getattr(args, dest)
        if v is None:
            continue
        if name in explicit_cfg and values[name] != v:
            log.warning("flag --%s=%r overrides config value %r", dest.replace("_", "-"), v,
                        values[name])
        values[name] = v
    return SweepConfig(**values).validate()


def cmd_sweep(args) -> int:
    cfg = build_sweep_config(args)
    t0 = time.perf_counter()
    records = run_sweep(cfg, threads=args.threads)
    text = to_json(records, cfg) if args.format == "json" else to_csv(records)
    _write(args.out, text)
    failed = sum(1 for r in records if not math.isfinite(r.e0_per_site))
    print(f"sweep: {len(records)} records ({len(cfg.L_list)} L x {cfg.steps} lambda), "
          f"{failed} failed, {time.perf_counter() - t0:.2f} s wall"
          + (f" -> {args.out}" if args.out and args.out != "-" else ""),
          file=sys.stdout if args.out and args.out != "-" else sys.stderr)
    return EXIT_NUMERIC if failed == len(records) else EXIT_OK


# --- analytic -------------------------------------------------------------

ANALYTIC_COLUMNS = ("lambda", "K", "u", "theta", "chi_analytic")


def analytic_rows(lams, kprime_of=None, modes=None):
    rows = []
    Kp = luttinger.luttinger_K(kprime_of) if kprime_of is not None else None
    for lam in lams:
        p = luttinger.params_of_lambda(lam)
        status = "ok"
        try:
            chi = luttinger.chi_analytic_xxz(lam)
        except DivergenceError:
            chi, status = math.nan, "divergent"
        row = {"lambda": float(lam), "K": p.K, "u": p.u, "theta": p.theta, "chi_analytic": chi}
        if Kp is not None:
            row["fidelity"] = luttinger.fidelity_finite(p.K, Kp, modes)
        row["status"] = status
        rows.append(row)
    return rows


def cmd_analytic(args) -> int:
    if args.lam is not None:
        lams = args.lam
    elif args.lambda_min is not None and args.lambda_max is not None:
        lams = list(np.linspace(args.lambda_min, args.lambda_max, args.steps))
    else:
        raise UsageError("give --lambda values or --lambda-min/--lambda-max")
    for lam in lams + ([args.kprime_of] if args.kprime_of is not None else []):
        if not -1.0 < lam <= 1.0:
            raise UsageError(f"lambda={lam} is outside (-1, 1]")
    if args.kprime_of is not None and args.modes is None:
        args.modes = 1
    try:
        rows = analytic_rows(lams, args.kprime_of, args.modes)
    except DomainError as e:
        raise UsageError(str(e))
    if args.format == "json":
        text = json_dumps({"rows": rows}) + "\n"
    else:
        header = list(rows[0].keys())
        text = _csv_text(header, [[r[h] for h in header] for r in rows])
    _write(args.out, text)
    return EXIT_OK


# --- boson-check ----------------------------------------------------------

def cmd_boson_check(args) -> int:
    if args.theta is not None:
        thetas = args.theta
    else:
        if args.theta_steps < 1:
            raise UsageError("--theta-steps must be >= 1")
        thetas = list(np.linspace(args.theta_min, args.theta_max, args.theta_steps))
    if args.n_max < 0:
        raise UsageError("--n-max must be non-negative")
    try:
        err = bosonsim.max_overlap_error(thetas, args.n_max)
    except DomainError as e:
        raise UsageError(str(e))
    ok = err <= args.tol
    print(f"boson-check: {len(thetas)} thetas, n_max={args.n_max}, "
          f"max |fock - closed form| = {err:.3e} ({'pass' if ok else 'FAIL'} at tol {args.tol:g})")
    return EXIT_OK if ok else EXIT_NUMERIC


# --- scaling / peak ---------------------------------------------------------

def _read_records(path):
    try:
        return from_csv(Path(path).read_text())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}")
    except ValueError as e:
        raise UsageError(f"malformed sweep CSV {path}: {e}")


SCALING_COLUMNS = ("lambda", "n_sizes", "L_min", "L_max", "chi_inf", "c1", "c2", "residual")


def cmd_scaling(args) -> int:
    records = _read_records(args.input)
    column = {"chi_ed_logf": "chi_logF", "chi_ed_trace": "chi_trace"}[args.column]
    groups: dict[float, list] = {}
    for r in records:
        groups.setdefault(r.lam, []).append(r)
    fits = []
    for lam in sorted(groups):
        try:
            fits.append(extrapolate(groups[lam], column, args.powers))
        except InsufficientDataError as e:
            raise UsageError(f"lambda={lam}: {e}")
    if args.format == "json":
        text = json_dumps({"fit_form": "chi_inf + " + " + ".join(f"c{p}/L^{p}" for p in args.powers),
                           "fits": [asdict(f) for f in fits]}) + "\n"
    else:
        text = _csv_text(SCALING_COLUMNS, [[f.lam, len(f.L_used), f.L_used[0], f.L_used[-1],
                                            f.chi_inf, f.c1, f.c2, f.residual] for f in fits])
    _write(args.out, text)
    return EXIT_OK


def cmd_peak(args) -> int:
    records = _read_records(args.input)
    Ls = sorted({r.L for r in records}) if args.L is None else [args.L]
    rows = []
    for L in Ls:
        sub = [r for r in records if r.L == L]
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", PeakAtBoundaryWarning)
            try:
                lam = locate_peak(sub)
            except InsufficientDataError as e:
                raise UsageError(f"L={L}: {e}")
        boundary = any(issubclass(w.category, PeakAtBoundaryWarning) for w in caught)
        if boundary:
            print(f"warning: L={L} peak at grid boundary", file=sys.stderr)
        rows.append([L, lam, "boundary" if boundary else "ok"])
    _write(args.out, _csv_text(("L", "lambda_peak", "status"), rows))
    return EXIT_OK


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xxzfidelity",
                                description="Fidelity susceptibility of the XXZ chain.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="ED + analytic sweep over a lambda grid")
    s.add_argument("--config", help="JSON file with SweepConfig fields; flags win on conflict")
    s.add_argument("--L", type=int, nargs="+", help="even chain lengths")
    s.add_argument("--bc", choices=("periodic", "open"))
    s.add_argument("--lambda-min", type=float)
    s.add_argument("--lambda-max", type=float)
    s.add_argument("--steps", type=int)
    s.add_argument("--dlambda", type=float)
    s.add_argument("--tol", type=float)
    s.add_argument("--max-iter", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--modes", type=_modes_arg, help="analytic mode count: 'L' or integer")
    s.add_argument("--scan-mode", choices=("sz0", "crossing"))
    s.add_argument("--fit-powers", type=int, nargs="+")
    s.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: FIDELITY_THREADS, 0 = auto)")
    s.add_argument("--out", help="output path (default: stdout)")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_sweep)

    a = sub.add_parser("analytic", help="closed-form Luttinger quantities")
    a.add_argument("--lambda", dest="lam", type=float, nargs="+")
    a.add_argument("--lambda-min", type=float)
    a.add_argument("--lambda-max", type=float)
    a.add_argument("--steps", type=int, default=11)
    a.add_argument("--kprime-of", type=float, help="second lambda for the fidelity column")
    a.add_argument("--modes", type=int, help="mode count M for the fidelity column")
    a.add_argument("--out")
    a.add_argument("--format", choices=("csv", "json"), default="csv")
    a.set_defaults(func=cmd_analytic)

    b = sub.add_parser("boson-check", help="truncated Fock sums vs closed-form overlaps")
    b.add_argument("--theta", type=float, nargs="+")
    b.add_argument("--theta-min", type=float, default=-1.5)
    b.add_argument("--theta-max", type=float, default=1.5)
    b.add_argument("--theta-steps", type=int, default=31)
    b.add_argument("--n-max", type=int, default=bosonsim.DEFAULT_N_MAX)
    b.add_argument("--tol", type=float, default=1e-9)
    b.set_defaults(func=cmd_boson_check)

    c = sub.add_parser("scaling", help="finite-size extrapolation of a sweep CSV")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--column", choices=("chi_ed_logf", "chi_ed_trace"), default="chi_ed_logf")
    c.add_argument("--powers", type=int, nargs="+", default=[1, 2])
    c.add_argument("--out")
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.set_defaults(func=cmd_scaling)

    k = sub.add_parser("peak", help="susceptibility peak location per L")
    k.add_argument("--in", dest="input", required=True)
    k.add_argument("--L", type=int)
    k.add_argument("--out")
    k.set_defaults(func=cmd_peak)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
