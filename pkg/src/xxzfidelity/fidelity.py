"""Ground-state fidelity and two finite-difference susceptibility estimators.

Both estimators return per-site values:

* ``chi_logF``: -2 ln F(lam - d/2, lam + d/2) / (L d^2), a centered stencil.
* ``chi_trace``: <dpsi|dpsi> - <psi|dpsi>^2 over L, with dpsi a central
  difference of sign-aligned ground vectors at lam +- d. For a pure state
  this is Tr[(d rho)^2] / (2L).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensolver import GroundState
from .errors import DivergenceError
from .hamiltonian import ShapeError
from .solve import SolveCache, SolverConfig, ground_state

DEFAULT_DELTA = 1e-3


@dataclass(frozen=True)
class FidelityResult:
    lam: float
    delta_lambda: float
    F: float
    chi_logF: float = math.nan
    chi_trace: float = math.nan


def overlap(a: GroundState, b: GroundState, across_sectors: bool = False) -> float:
    """|<a|b>| clipped to [0, 1].

    States from different magnetization sectors are orthogonal; with
    ``across_sectors=True`` that case returns 0 instead of raising.
    """
    if (a.L, a.bc) != (b.L, b.bc) or (a.n_up != b.n_up and not across_sectors):
        raise ShapeError(f"sector mismatch: {a.sector} vs {b.sector}")
    if a.n_up != b.n_up:
        return 0.0
    if a.dim != b.dim:
        raise ShapeError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return min(1.0, abs(float(a.vector @ b.vector)))


def _check_delta(delta: float):
    if not delta > 0:
        raise ValueError(f"delta_lambda must be positive, got {delta!r}")


def log_fidelity_chi(F: float, L: int, delta: float) -> float:
    if F <= 0.0:
        raise DivergenceError("fidelity is zero; log-fidelity susceptibility diverges")
    return max(0.0, -2.0 * math.log(F) / (L * delta * delta))


def chi_logF(lam: float, delta: float, L: int, cfg: SolverConfig | None = None,
             cache: SolveCache | None = None) -> FidelityResult:
    _check_delta(delta)
    a = ground_state(L, lam - delta / 2, cfg, cache=cache)
    b = ground_state(L, lam + delta / 2, cfg, cache=cache)
    F = overlap(a, b)
    return FidelityResult(lam, delta, F, chi_logF=log_fidelity_chi(F, L, delta))


def aligned(ref: np.ndarray, v: np.ndarray) -> np.ndarray:
    return -v if float(ref @ v) < 0 else v


def trace_chi(psi: np.ndarray, minus: np.ndarray, plus: np.ndarray,
              L: int, delta: float) -> float:
    d = (aligned(psi, plus) - aligned(psi, minus)) / (2 * delta)
    par = float(psi @ d)
    return max(0.0, (float(d @ d) - par * par) / L)


def chi_trace(lam: float, delta: float, L: int, cfg: SolverConfig | None = None,
              cache: SolveCache | None = None) -> FidelityResult:
    _check_delta(delta)
    g = ground_state(L, lam, cfg, cache=cache)
    gm = ground_state(L, lam - delta, cfg, cache=cache)
    gp = ground_state(L, lam + delta, cfg, cache=cache)
    F = overlap(gm, gp)
    if F <= 0.0:
        raise DivergenceError("endpoint ground states are orthogonal")
    chi = trace_chi(g.vector, gm.vector, gp.vector, L, delta)
    return FidelityResult(lam, delta, F, chi_trace=chi)


def susceptibilities(lam: float, delta: float, L: int, cfg: SolverConfig | None = None,
                     cache: SolveCache | None = None) -> FidelityResult:
    """Both estimators at one point; F is the log-estimator's endpoint overlap."""
    lf = chi_logF(lam, delta, L, cfg, cache)
    tr = chi_trace(lam, delta, L, cfg, cache)
    return FidelityResult(lam, delta, lf.F, lf.chi_logF, tr.chi_trace)


def perturbative_chi(H) -> float:
    """Dense-spectrum oracle: sum_n |<n|dH/dlam|0>|^2 / (E_n - E_0)^2 / L."""
    w, U = np.linalg.eigh(H.materialize())
    m = U.T @ (H.zz_diagonal() * U[:, 0])
    return float(np.sum(m[1:] ** 2 / (w[1:] - w[0]) ** 2) / H.basis.L)
