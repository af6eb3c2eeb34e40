"""Lambda-grid x system-size sweeps, finite-size extrapolation and peak finding."""
from __future__ import annotations

import csv
import json
import io
import logging
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import luttinger
from .eigensolver import ConvergenceError, DegeneracyError, GroundState
from .energy import crossing_ground, energy_derivative_hf
from .errors import DivergenceError, DomainError
from .fidelity import log_fidelity_chi, overlap, trace_chi
from .solve import SolveCache, SolverConfig, default_cache, ground_state

log = logging.getLogger(__name__)

CSV_COLUMNS = ("lambda", "L", "e0_per_site", "dE_dlambda", "d2E_dlambda2", "fidelity",
               "chi_ed_logf", "chi_ed_trace", "K", "chi_analytic", "status")
SCAN_MODES = ("sz0", "crossing")


class ConfigError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


class PeakAtBoundaryWarning(UserWarning):
    pass


@dataclass
class SweepConfig:
    L_list: list[int] = field(default_factory=lambda: [12])
    bc: str = "periodic"
    lambda_min: float = -0.9
    lambda_max: float = 0.9
    steps: int = 19
    delta_lambda: float = 1e-3
    tol: float = 1e-12
    max_iter: int = 500
    seed: int = 0
    mode_count_convention: int | str = "L"
    scan_mode: str = "sz0"
    fit_powers: list[int] = field(default_factory=lambda: [1, 2])

    def validate(self) -> "SweepConfig":
        if not self.L_list:
            raise ConfigError("L_list is empty")
        for L in self.L_list:
            if not isinstance(L, int) or isinstance(L, bool):
                raise ConfigError(f"L must be an integer, got {L!r}")
            if L % 2:
                raise ConfigError(f"L must be even, got {L}")
            if not 4 <= L <= 24:
                raise ConfigError(f"L must lie in [4, 24], got {L}")
        if len(set(self.L_list)) != len(self.L_list):
            raise ConfigError("L_list has duplicates")
        if self.bc not in ("periodic", "open"):
            raise ConfigError(f"bc must be 'periodic' or 'open', got {self.bc!r}")
        if self.scan_mode not in SCAN_MODES:
            raise ConfigError(f"scan_mode must be one of {SCAN_MODES}")
        if self.steps < 1 or (self.steps == 1 and self.lambda_min != self.lambda_max):
            raise ConfigError("steps must be >= 2 (or 1 with lambda_min == lambda_max)")
        if self.lambda_min > self.lambda_max:
            raise ConfigError("lambda_min exceeds lambda_max")
        if self.scan_mode == "sz0" and not (-1.0 < self.lambda_min and self.lambda_max < 1.0):
            raise ConfigError("lambda grid must lie inside (-1, 1); use scan_mode='crossing' "
                              "to scan across the level crossing at -1")
        if not self.delta_lambda > 0:
            raise ConfigError("delta_lambda must be positive")
        if not self.tol > 0 or self.max_iter < 1:
            raise ConfigError("tol must be positive and max_iter >= 1")
        m = self.mode_count_convention
        if not (m == "L" or (isinstance(m, int) and not isinstance(m, bool) and m >= 0)):
            raise ConfigError("mode_count_convention must be 'L' or a non-negative integer")
        return self

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.lambda_min, self.lambda_max, self.steps)

    def solver(self) -> SolverConfig:
        return SolverConfig(tol=self.tol, max_iter=self.max_iter, seed=self.seed, bc=self.bc)

    def modes(self, L: int) -> int:
        return L if self.mode_count_convention == "L" else int(self.mode_count_convention)


@dataclass
class SweepRecord:
    lam: float
    L: int
    e0_per_site: float = math.nan
    de: float = math.nan
    d2e: float = math.nan
    F: float = math.nan
    chi_logF: float = math.nan
    chi_trace: float = math.nan
    K: float = math.nan
    chi_analytic: float = math.nan
    status: str = "ok"
    fidelity_analytic: float = math.nan
    n_up: int | None = None

    def csv_row(self) -> list[str]:
        vals = (self.lam, self.L, self.e0_per_site, self.de, self.d2e, self.F,
                self.chi_logF, self.chi_trace, self.K, self.chi_analytic)
        return [_fmt(v) for v in vals] + [self.status]


@dataclass
class ScalingFit:
    lam: float
    L_used: list[int]
    chi_inf: float
    c1: float
    c2: float
    residual: float
    powers: tuple[int, ...] = (1, 2)
    chi_L: list[float] = field(default_factory=list)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    return "nan" if not math.isfinite(v) else format(v, ".17g")


# --- per-point evaluation -------------------------------------------------

def _analytic(rec: SweepRecord, cfg: SweepConfig, flags: list[str]):
    lam, d = rec.lam, cfg.delta_lambda
    try:
        rec.K = luttinger.luttinger_K(lam)
    except DomainError:
        flags.append("analytic-undefined")
        return
    try:
        rec.chi_analytic = luttinger.chi_analytic_xxz(lam)
    except DivergenceError:
        flags.append("analytic-divergent")
    try:
        Km, Kp = luttinger.luttinger_K(lam - d / 2), luttinger.luttinger_K(lam + d / 2)
        rec.fidelity_analytic = luttinger.fidelity_finite(Km, Kp, cfg.modes(rec.L))
    except DomainError:
        pass


def _solver_for(cfg: SweepConfig, cache: SolveCache):
    scfg = cfg.solver()
    if cfg.scan_mode == "crossing":
        def solve(L, lam):
            cg = crossing_ground(L, lam, scfg, cache=cache)
            return cg.state, cg.tie
    else:
        def solve(L, lam):
            return ground_state(L, lam, scfg, cache=cache), False
    return solve


def evaluate_point(lam: float, L: int, cfg: SweepConfig,
                   cache: SolveCache | None = None) -> SweepRecord:
    cache = default_cache if cache is None else cache
    solve = _solver_for(cfg, cache)
    d = cfg.delta_lambda
    rec = SweepRecord(lam=float(lam), L=L)
    flags: list[str] = []
    _analytic(rec, cfg, flags)

    def get(x) -> GroundState | None:
        try:
            g, tie = solve(L, x)
        except DegeneracyError:
            flags.append("degenerate")
            return None
        except ConvergenceError:
            flags.append("no-convergence")
            return None
        if tie and x == lam:
            flags.append("level-crossing")
        return g

    g0 = get(lam)
    if g0 is not None:
        rec.e0_per_site = g0.energy / L
        rec.de = energy_derivative_hf(g0)
        rec.n_up = g0.n_up
    gm, gp = get(lam - d), get(lam + d)
    if gm is not None and gp is not None:
        rec.d2e = (energy_derivative_hf(gp) - energy_derivative_hf(gm)) / (2 * d)
        if g0 is not None and gm.n_up == g0.n_up == gp.n_up:
            rec.chi_trace = trace_chi(g0.vector, gm.vector, gp.vector, L, d)
    ha, hb = get(lam - d / 2), get(lam + d / 2)
    if ha is not None and hb is not None:
        rec.F = overlap(ha, hb, across_sectors=True)
        try:
            rec.chi_logF = log_fidelity_chi(rec.F, L, d)
        except DivergenceError:
            flags.append("divergent")
    if "divergent" in flags:
        rec.chi_trace = math.nan
    rec.status = "+".join(dict.fromkeys(flags)) or "ok"
    return rec


def _threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("FIDELITY_THREADS", "0") or 0)
    return threads if threads > 0 else (os.cpu_count() or 1)


def run_sweep(cfg: SweepConfig, threads: int | None = None,
              cache: SolveCache | None = None) -> list[SweepRecord]:
    """One record per (L, lam), L-major then grid order."""
    cfg.validate()
    cache = SolveCache() if cache is None else cache
    work = [(L, float(lam)) for L in cfg.L_list for lam in cfg.grid]
    n = _threads(threads)
    if n == 1:
        return [evaluate_point(lam, L, cfg, cache) for L, lam in work]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(lambda w: evaluate_point(w[1], w[0], cfg, cache), work))


# --- finite-size extrapolation and peaks ----------------------------------

def extrapolate(records, column: str = "chi_logF", powers=(1, 2)) -> ScalingFit:
    """Least-squares fit chi_L = chi_inf + sum_p c_p / L^p at one lambda."""
    recs = [r for r in records if math.isfinite(getattr(r, column))]
    lams = {round(r.lam, 12) for r in recs}
    if len(lams) > 1:
        raise ValueError(f"records span several lambda values: {sorted(lams)}")
    by_L = {}
    for r in recs:
        by_L[r.L] = getattr(r, column)
    Ls = sorted(by_L)
    powers = tuple(powers)
    if len(Ls) < max(3, len(powers) + 1):
        raise InsufficientDataError(f"need ≥3 sizes, got {len(Ls)}")
    x = np.array(Ls, dtype=float)
    y = np.array([by_L[L] for L in Ls])
    A = np.column_stack([np.ones_like(x)] + [x ** -p for p in powers])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - y) ** 2)))
    c = dict(zip(powers, coef[1:]))
    return ScalingFit(lam=recs[0].lam, L_used=Ls, chi_inf=float(coef[0]),
                      c1=float(c.get(1, 0.0)), c2=float(c.get(2, 0.0)), residual=resid,
                      powers=powers, chi_L=[float(v) for v in y])


def extrapolate_all(records, column: str = "chi_logF", powers=(1, 2)) -> list[ScalingFit]:
    groups: dict[float, list] = {}
    for r in records:
        groups.setdefault(r.lam, []).append(r)
    return [extrapolate(g, column, powers) for _, g in sorted(groups.items())]


def _peak_value(r) -> float:
    if "divergent" in r.status:
        return math.inf
    return r.chi_logF if math.isfinite(r.chi_logF) else -math.inf


def locate_peak(records) -> float:
    """Lambda of the largest chi_logF, refined by a parabola through the peak triple.

    Points whose fidelity vanished count as an infinite peak and are returned
    unrefined. A peak on the first or last grid point raises
    :class:`PeakAtBoundaryWarning`.
    """
    recs = sorted(records, key=lambda r: r.lam)
    if len(recs) < 3:
        raise InsufficientDataError("need ≥3 grid points")
    x = np.array([r.lam for r in recs])
    y = np.array([_peak_value(r) for r in recs])
    i = int(np.argmax(y))
    if i in (0, len(recs) - 1):
        warnings.warn(f"susceptibility peak at grid boundary lam={x[i]}", PeakAtBoundaryWarning,
                      stacklevel=2)
        return float(x[i])
    if not np.all(np.isfinite(y[i - 1:i + 2])):
        return float(x[i])
    return _parabola_vertex(x[i - 1:i + 2], y[i - 1:i + 2])


def _parabola_vertex(x, y) -> float:
    (x0, x1, x2), (y0, y1, y2) = x, y
    num = (x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)
    den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
    if den == 0:
        return float(x1)
    return float(x1 - 0.5 * num / den)


# --- serialization ----------------------------------------------------------

def to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.csv_row())
    return buf.getvalue()


def _parse_float(s: str) -> float:
    return math.nan if s.strip().lower() in ("nan", "") else float(s)


def from_csv(text: str) -> list[SweepRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header; expected {','.join(CSV_COLUMNS)}")
    out = []
    for k, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(CSV_COLUMNS):
            raise ValueError(f"line {k}: expected {len(CSV_COLUMNS)} fields, got {len(row)}")
        f = [_parse_float(v) for v in row[:-1]]
        if not math.isfinite(f[1]) or f[1] != int(f[1]):
            raise ValueError(f"line {k}: L must be an integer")
        out.append(SweepRecord(lam=f[0], L=int(f[1]), e0_per_site=f[2], de=f[3], d2e=f[4],
                               F=f[5], chi_logF=f[6], chi_trace=f[7], K=f[8],
                               chi_analytic=f[9], status=row[-1]))
    return out


def json_dumps(obj, indent: int = 0) -> str:
    """JSON with floats at 17 significant digits and non-finite floats as null."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, bool) or obj is None:
        return {True: "true", False: "false", None: "null"}[obj]
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{json_dumps(str(k))}: {json_dumps(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(json_dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + json_dumps(v, indent + 1) for v in obj) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def sweep_metadata(cfg: SweepConfig) -> dict:
    return {
        "per_site_normalizer": "L (sites); open chains have L-1 bonds",
        "sector": "n_up = L/2" if cfg.scan_mode == "sz0" else "min over n_up in {L/2, L}",
        "stencil": {"chi_ed_logf": "lambda +- delta/2", "chi_ed_trace": "lambda, lambda +- delta",
                    "d2E_dlambda2": "central difference of Hellmann-Feynman dE/dlambda at +- delta"},
        "fit_form": "chi_inf + " + " + ".join(f"c{p}/L^{p}" for p in cfg.fit_powers),
    }


def to_json(records, cfg: SweepConfig) -> str:
    recs = []
    for r in records:
        d = asdict(r)
        recs.append({"lambda": d.pop("lam"), **d})
    return json_dumps({"config": asdict(cfg), "metadata": sweep_metadata(cfg),
                       "records": recs}) + "\n"


def config_from_dict(d: dict) -> SweepConfig:
    known = {f.name for f in fields(SweepConfig)}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return SweepConfig(**d)
