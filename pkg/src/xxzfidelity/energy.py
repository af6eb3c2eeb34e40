"""Ground-state energy derivatives.

Only the Ising term carries lam, so dE/dlam is the ground-state expectation of
sum_j Sz_j Sz_{j+1} (Hellmann-Feynman). The second derivative is a central
difference of that expectation. All values are divided by the number of
sites L, for open chains too (an open chain has L - 1 bonds).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensolver import GroundState
from .hamiltonian import zz_diagonal
from .solve import SolveCache, SolverConfig, ground_state

JUMP_FACTOR = 10.0


@dataclass(frozen=True)
class EnergyRecord:
    lam: float
    e0: float
    de: float
    d2e: float


def energy_derivative_hf(g: GroundState) -> float:
    zz = zz_diagonal(g.L, g.n_up, g.bc)
    return float(zz @ (g.vector * g.vector)) / g.L


def energy_second_derivative(lam: float, delta: float, L: int,
                             cfg: SolverConfig | None = None,
                             cache: SolveCache | None = None) -> float:
    if not delta > 0:
        raise ValueError("delta must be positive")
    gp = ground_state(L, lam + delta, cfg, cache=cache)
    gm = ground_state(L, lam - delta, cfg, cache=cache)
    return (energy_derivative_hf(gp) - energy_derivative_hf(gm)) / (2 * delta)


def energy_record(lam: float, delta: float, L: int, cfg: SolverConfig | None = None,
                  cache: SolveCache | None = None) -> EnergyRecord:
    g = ground_state(L, lam, cfg, cache=cache)
    return EnergyRecord(lam, g.energy / L, energy_derivative_hf(g),
                        energy_second_derivative(lam, delta, L, cfg, cache))


def polarized_energy(L: int, lam: float, bc: str = "periodic") -> float:
    """Energy of the all-up state: lam/4 per bond."""
    nb = L if bc == "periodic" else L - 1
    return lam * nb / 4


@dataclass(frozen=True)
class CrossingGround:
    """Lowest state over several sectors at one lam."""
    state: GroundState
    sector_energies: dict
    tie: bool


def crossing_ground(L: int, lam: float, cfg: SolverConfig | None = None,
                    sectors: tuple[int, ...] | None = None,
                    cache: SolveCache | None = None,
                    tie_rtol: float = 1e-9) -> CrossingGround:
    """Global ground state among ``sectors`` (default: Sz=0 and fully polarized).

    Near-equal sector minima are reported as a tie; the earlier sector in
    ``sectors`` wins the tie.
    """
    sectors = sectors or (L // 2, L)
    found = [ground_state(L, lam, cfg, n_up=n, cache=cache) for n in sectors]
    energies = {n: g.energy for n, g in zip(sectors, found)}
    order = sorted(range(len(found)), key=lambda i: (found[i].energy, i))
    best = found[order[0]]
    tie = False
    if len(order) > 1:
        e0, e1 = best.energy, found[order[1]].energy
        if e1 - e0 <= tie_rtol * max(1.0, abs(e0)):
            tie = True
            best = found[min(order[0], order[1])]
    return CrossingGround(best, energies, tie)


def find_jumps(values, factor: float = JUMP_FACTOR) -> list[int]:
    """Indices i whose step values[i+1] - values[i] exceeds ``factor`` times
    every neighboring step. Non-finite entries are skipped over."""
    v = np.asarray(values, dtype=float)
    steps = np.abs(np.diff(v))
    out = []
    for i, s in enumerate(steps):
        if not math.isfinite(s):
            continue
        nbrs = [steps[j] for j in (i - 1, i + 1) if 0 <= j < len(steps) and math.isfinite(steps[j])]
        if nbrs and s > factor * max(nbrs) and s > 0:
            out.append(i)
    return out
