"""Lanczos ground-state solver with full reorthogonalization.

The gap is measured with a second, deflated Lanczos run started orthogonal
to the converged ground vector. A single Krylov sequence cannot resolve an
exactly degenerate ground level (it only ever sees one vector per
eigenspace), so the deflated run is what makes the degeneracy check honest.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .hamiltonian import HamiltonianOp

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 500
DEGENERACY_RTOL = 1e-8
# The deflated run only needs E1 well enough to compare against the
# degeneracy threshold; Ritz values converge quadratically in the residual.
GAP_RESIDUAL_TOL = 1e-7


class ConvergenceError(RuntimeError):
    """Raised when the residual never drops below tol; carries the best iterate."""

    def __init__(self, message: str, best: GroundState):
        super().__init__(message)
        self.best = best


class DegeneracyError(RuntimeError):
    """Raised when the ground level is (numerically) degenerate."""

    def __init__(self, message: str, state: GroundState):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True, eq=False)
class GroundState:
    lam: float | None
    L: int | None
    n_up: int | None
    bc: str | None
    energy: float
    vector: np.ndarray = field(repr=False)
    gap: float
    converged: bool
    iterations: int = 0
    residual: float = 0.0
    ritz_history: tuple[float, ...] = field(default=(), repr=False)

    @property
    def dim(self) -> int:
        return int(self.vector.shape[0])

    @property
    def sector(self) -> tuple:
        return (self.L, self.n_up, self.bc)


def gauge_fix(v) -> np.ndarray:
    """Normalize ``v`` and flip its sign so the largest-magnitude entry is positive.

    Entries within a relative 1e-10 of the maximum count as tied; the lowest
    index among them decides the sign.
    """
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if not norm > 0 or not np.isfinite(norm):
        raise ValueError("cannot gauge-fix a zero or non-finite vector")
    v = v / norm
    mag = np.abs(v)
    k = int(np.argmax(mag >= mag.max() * (1.0 - 1e-10)))
    return -v if v[k] < 0 else v


def _as_matvec(H):
    if isinstance(H, np.ndarray):
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError("dense operator must be a square matrix")
        return (lambda v: H @ v), H.shape[0]
    return H.apply, H.dim


class _Krylov:
    """Growable row store for orthonormal Lanczos vectors."""

    def __init__(self, n: int, chunk: int = 64):
        self._a = np.empty((min(chunk, n + 1), n))
        self.k = 0
        self._chunk = chunk

    def append(self, v):
        if self.k == self._a.shape[0]:
            grown = np.empty((self._a.shape[0] + self._chunk, self._a.shape[1]))
            grown[: self.k] = self._a[: self.k]
            self._a = grown
        self._a[self.k] = v
        self.k += 1

    @property
    def rows(self) -> np.ndarray:
        return self._a[: self.k]


def _orthogonalize(w, *blocks):
    # Two passes of classical Gram-Schmidt ("twice is enough").
    for _ in range(2):
        for B in blocks:
            if B.shape[0]:
                w -= B.T @ (B @ w)
    return w


def _lanczos_lowest(matvec, n, v0, tol, max_iter, deflate=None):
    """Lowest Ritz pair of ``matvec`` restricted to the complement of ``deflate``.

    Returns (theta, ritz_vector, residual, iterations, history, converged).
    """
    deflate = np.zeros((0, n)) if deflate is None else np.atleast_2d(deflate)
    v = _orthogonalize(np.array(v0, dtype=float), deflate)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValueError("start vector lies in the deflated subspace")
    V = _Krylov(n)
    V.append(v / nv)
    alphas: list[float] = []
    betas: list[float] = []
    history: list[float] = []
    limit = n - deflate.shape[0]
    theta, s0, resid = math.inf, np.ones(1), math.inf
    for it in range(1, max_iter + 1):
        q = V.rows[-1]
        w = matvec(q)
        alphas.append(float(q @ w))
        w = _orthogonalize(w, V.rows, deflate)
        beta = float(np.linalg.norm(w))
        if len(alphas) == 1:
            ev, S = np.array(alphas), np.ones((1, 1))
        else:
            ev, S = eigh_tridiagonal(np.array(alphas), np.array(betas))
        theta, s0 = float(ev[0]), S[:, 0]
        history.append(theta)
        scale = max(1.0, abs(theta))
        resid = abs(beta * s0[-1])
        exhausted = it >= limit or beta <= 1e-14 * scale
        if resid < tol * scale or exhausted:
            return theta, V.rows.T @ s0, resid, it, history, True
        betas.append(beta)
        V.append(w / beta)
    return theta, V.rows[: len(s0)].T @ s0, resid, max_iter, history, False


def lanczos_ground(H, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                   seed: int = 0, check_degeneracy: bool = True) -> GroundState:
    """Ground state of a real symmetric operator.

    ``H`` is a :class:`HamiltonianOp` or a dense square ndarray. The
    convergence test is ``|beta_m s_m| < tol * max(1, |E|)`` on the Lanczos
    residual estimate.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    matvec, n = _as_matvec(H)
    if n < 1:
        raise ValueError("empty operator")
    rng = np.random.default_rng(seed)
    meta = dict(lam=None, L=None, n_up=None, bc=None)
    if isinstance(H, HamiltonianOp):
        meta = dict(lam=H.lam, L=H.basis.L, n_up=H.basis.n_up, bc=H.bc.value)

    e0, vec, resid, its, hist, ok = _lanczos_lowest(
        matvec, n, rng.standard_normal(n), tol, max_iter)
    vec = gauge_fix(vec)
    if not ok:
        best = GroundState(energy=e0, vector=vec, gap=math.nan, converged=False,
                           iterations=its, residual=resid, ritz_history=tuple(hist), **meta)
        raise ConvergenceError(
            f"Lanczos residual {resid:.3e} above tol {tol:.1e} after {its} iterations", best)

    if n == 1:
        gap = math.inf
    else:
        e1, *_ = _lanczos_lowest(matvec, n, rng.standard_normal(n),
                                 max(tol, GAP_RESIDUAL_TOL), max_iter, deflate=vec)
        gap = max(0.0, e1 - e0)
    gs = GroundState(energy=e0, vector=vec, gap=gap, converged=True, iterations=its,
                     residual=resid, ritz_history=tuple(hist), **meta)
    if check_degeneracy and gap < DEGENERACY_RTOL * max(1.0, abs(e0)):
        raise DegeneracyError(f"ground level degenerate (gap {gap:.3e})", gs)
    return gs


def dense_ground(H) -> tuple[float, np.ndarray, float]:
    """Dense-diagonalization oracle: (E0, gauge-fixed ground vector, E1 - E0)."""
    M = H if isinstance(H, np.ndarray) else H.materialize()
    w, U = np.linalg.eigh(M)
    gap = float(w[1] - w[0]) if len(w) > 1 else math.inf
    return float(w[0]), gauge_fix(U[:, 0]), gap
