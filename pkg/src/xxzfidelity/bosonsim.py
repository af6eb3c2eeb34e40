"""Truncated-Fock oracle for squeezed-vacuum overlaps.

One (k, -k) mode pair in the state sum_n (-tanh theta)^n |n, n>, normalized by
1/cosh(theta). Because theta does not depend on k, a single pair is enough and
M pairs give the M-th power; :func:`product_overlap` builds the explicit
tensor product for small M to check that.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DomainError

DEFAULT_N_MAX = 200


@dataclass(frozen=True, eq=False)
class SqueezedPairState:
    theta: float
    n_max: int
    amplitudes: np.ndarray

    @property
    def norm_squared(self) -> float:
        return float(self.amplitudes @ self.amplitudes)

    def tail_bound(self) -> float:
        return math.tanh(abs(self.theta)) ** (2 * (self.n_max + 1))


def build_pair_state(theta: float, n_max: int = DEFAULT_N_MAX) -> SqueezedPairState:
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    t = math.tanh(theta)
    if not abs(t) < 1:
        raise DomainError("|tanh theta| must be below 1")
    c = (-t) ** np.arange(n_max + 1) / math.cosh(theta)
    return SqueezedPairState(float(theta), int(n_max), c)


def pair_overlap(a: SqueezedPairState, b: SqueezedPairState) -> float:
    """Sum_n a_n b_n over the common Fock range (the shorter state sets the cutoff)."""
    n = min(a.n_max, b.n_max) + 1
    return float(a.amplitudes[:n] @ b.amplitudes[:n])


def unnormalized_overlap_sum(theta_a: float, theta_b: float, n_max: int = DEFAULT_N_MAX) -> float:
    """Fock sum of the unnormalized states: sum_n (tanh theta_a tanh theta_b)^n."""
    x = math.tanh(theta_a) * math.tanh(theta_b)
    return float(np.sum(x ** np.arange(n_max + 1)))


def z_unnormalized(theta_a: float, theta_b: float) -> float:
    """Closed form 1 / (1 - sinh a sinh b / (cosh a cosh b))."""
    x = math.sinh(theta_a) * math.sinh(theta_b) / (math.cosh(theta_a) * math.cosh(theta_b))
    if x >= 1:
        raise DomainError("tanh(theta_a) tanh(theta_b) must be below 1")
    return 1.0 / (1.0 - x)


def normalized_z_ratio(theta_a: float, theta_b: float) -> float:
    return z_unnormalized(theta_a, theta_b) / math.sqrt(
        z_unnormalized(theta_a, theta_a) * z_unnormalized(theta_b, theta_b))


def product_overlap(a: SqueezedPairState, b: SqueezedPairState, M: int) -> float:
    """Overlap of explicit M-pair tensor products; memory grows as (n_max+1)^M."""
    if M == 0:
        return 1.0
    n = min(a.n_max, b.n_max) + 1
    if n ** M > 5_000_000:
        raise DomainError(f"tensor product of {M} pairs with cutoff {n} is too large")
    va = reduce(np.kron, [a.amplitudes[:n]] * M)
    vb = reduce(np.kron, [b.amplitudes[:n]] * M)
    return float(va @ vb)


def max_overlap_error(thetas, n_max: int = DEFAULT_N_MAX) -> float:
    """Largest |Fock sum - 1/cosh(dtheta)| over all ordered pairs of ``thetas``."""
    states = [build_pair_state(t, n_max) for t in thetas]
    err = 0.0
    for a in states:
        for b in states:
            err = max(err, abs(pair_overlap(a, b) - 1.0 / math.cosh(a.theta - b.theta)))
    return err
