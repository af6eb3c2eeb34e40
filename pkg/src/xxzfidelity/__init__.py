"""Ground-state fidelity susceptibility of the spin-1/2 XXZ chain.

Exact diagonalization (Lanczos in a fixed-magnetization sector) side by side
with the closed-form Luttinger-liquid expressions.
"""
from .basis import SpinBasis, build_basis, state_index
from .bosonsim import build_pair_state, pair_overlap, z_unnormalized
from .eigensolver import GroundState, gauge_fix, lanczos_ground
from .energy import energy_derivative_hf, energy_second_derivative
from .fidelity import FidelityResult, chi_logF, chi_trace, overlap
from .hamiltonian import HamiltonianOp, materialize, xxz_hamiltonian
from .luttinger import (LuttingerParams, chi_analytic_general, chi_analytic_xxz,
                        fidelity_finite, fidelity_per_mode, params_of_lambda)
from .solve import SolverConfig
from .sweep import ScalingFit, SweepConfig, SweepRecord, extrapolate, locate_peak, run_sweep

__version__ = "0.1.0"
