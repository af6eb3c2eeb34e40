"""Cached ground-state solves shared by the fidelity and energy estimators."""
from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass

from .eigensolver import (DEFAULT_MAX_ITER, DEFAULT_TOL, DEGENERACY_RTOL, DegeneracyError,
                          GroundState, lanczos_ground)
from .hamiltonian import BoundaryCondition, xxz_hamiltonian


@dataclass(frozen=True)
class SolverConfig:
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    seed: int = 0
    bc: str = "periodic"
    n_up: int | None = None  # None: Sz=0 sector, L // 2

    def sector(self, L: int) -> int:
        return L // 2 if self.n_up is None else self.n_up


class SolveCache:
    """Thread-safe LRU of converged ground states.

    Two threads asking for the same key may both solve; the results are
    identical for a fixed seed, so the race is harmless.
    """

    def __init__(self, maxsize: int = 256):
        self.maxsize = maxsize
        self._data: OrderedDict = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get_or_solve(self, L: int, lam: float, n_up: int, cfg: SolverConfig,
                     check_degeneracy: bool = True) -> GroundState:
        bc = BoundaryCondition(cfg.bc).value
        key = (float(lam), L, n_up, bc, cfg.seed, cfg.tol, cfg.max_iter)
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                self.hits += 1
                gs = self._data[key]
                if check_degeneracy:
                    _recheck(gs)
                return gs
            self.misses += 1
        H = xxz_hamiltonian(L, lam, n_up, bc)
        # Degeneracy is checked on the way out so that cached states serve both modes.
        gs = lanczos_ground(H, cfg.tol, cfg.max_iter, cfg.seed, check_degeneracy=False)
        with self._lock:
            self._data[key] = gs
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)
        if check_degeneracy:
            _recheck(gs)
        return gs

    def clear(self):
        with self._lock:
            self._data.clear()


def _recheck(gs: GroundState):
    if gs.gap < DEGENERACY_RTOL * max(1.0, abs(gs.energy)):
        raise DegeneracyError(f"ground level degenerate at lam={gs.lam} (gap {gs.gap:.3e})", gs)


default_cache = SolveCache()


def ground_state(L: int, lam: float, cfg: SolverConfig | None = None,
                 n_up: int | None = None, cache: SolveCache | None = None,
                 check_degeneracy: bool = True) -> GroundState:
    cfg = cfg or SolverConfig()
    cache = default_cache if cache is None else cache
    n = cfg.sector(L) if n_up is None else n_up
    return cache.get_or_solve(L, lam, n, cfg, check_degeneracy)
