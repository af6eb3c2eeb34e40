"""Closed-form Luttinger-liquid layer for the XXZ chain.

Bethe-ansatz parameters, valid for -1 < lam <= 1::

    K(lam) = (pi/2) / (pi - arccos lam)
    u(lam) = pi sqrt(1 - lam^2) / (2 arccos lam)

The ground state of the quadratic boson theory is a two-mode squeezed vacuum
with Bogoliubov angle theta = -ln(K)/2, the same for every momentum. Two such
states overlap by 1/cosh(theta' - theta) per mode, so fidelities and
susceptibilities depend on K only; nothing here reads u.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DivergenceError, DomainError


@dataclass(frozen=True)
class LuttingerParams:
    lam: float
    K: float
    u: float
    theta: float

    @property
    def cosh_theta(self) -> float:
        return (1 + self.K) / (2 * math.sqrt(self.K))

    @property
    def sinh_theta(self) -> float:
        return (1 - self.K) / (2 * math.sqrt(self.K))


def luttinger_K(lam: float) -> float:
    if not -1.0 < lam <= 1.0:
        raise DomainError(f"lam={lam!r} is outside the Luttinger-liquid range (-1, 1]")
    return (math.pi / 2) / (math.pi - math.acos(lam))


def velocity(lam: float) -> float:
    if not -1.0 < lam <= 1.0:
        raise DomainError(f"lam={lam!r} is outside the Luttinger-liquid range (-1, 1]")
    if lam == 1.0:
        return math.pi / 2  # limit of the 0/0 form
    return math.pi * math.sqrt(1 - lam * lam) / (2 * math.acos(lam))


def bogoliubov_angle(K: float) -> float:
    if not K > 0:
        raise DomainError(f"K must be positive, got {K!r}")
    return -0.5 * math.log(K) + 0.0  # no negative zero at K = 1


def params_of_lambda(lam: float) -> LuttingerParams:
    K = luttinger_K(lam)
    return LuttingerParams(lam=float(lam), K=K, u=velocity(lam), theta=bogoliubov_angle(K))


def fidelity_per_mode(K: float, K_prime: float) -> float:
    """2 / (sqrt(K/K') + sqrt(K'/K)), i.e. 1/cosh(theta' - theta)."""
    if not (K > 0 and K_prime > 0):
        raise DomainError("Luttinger parameters must be positive")
    r = math.sqrt(K / K_prime)
    return 2.0 / (r + 1.0 / r)


def fidelity_finite(K: float, K_prime: float, M: int) -> float:
    """Fidelity of M independent modes; M = L is the usual finite-size convention."""
    if M < 0:
        raise DomainError("mode count must be non-negative")
    return fidelity_per_mode(K, K_prime) ** M


def log_fidelity_finite(K: float, K_prime: float, M: int) -> float:
    if M < 0:
        raise DomainError("mode count must be non-negative")
    return M * math.log(fidelity_per_mode(K, K_prime))


def chi_analytic_general(K_of: Callable[[float], float], lam: float, h: float = 1e-6) -> float:
    """(1/4) (d ln K / d lam)^2 with a central difference of step h."""
    Kp, Km = K_of(lam + h), K_of(lam - h)
    if not (Kp > 0 and Km > 0):
        raise DomainError("K_of must be positive on [lam - h, lam + h]")
    dlnK = (math.log(Kp) - math.log(Km)) / (2 * h)
    return 0.25 * dlnK * dlnK


def chi_analytic_xxz(lam: float) -> float:
    """1 / (4 (pi - arccos lam)^2 (1 - lam^2)); infinite at lam = +-1."""
    if not -1.0 < lam < 1.0:
        if abs(lam) == 1.0:
            raise DivergenceError(f"susceptibility diverges at lam={lam}")
        raise DomainError(f"lam={lam!r} is outside (-1, 1)")
    a = math.pi - math.acos(lam)
    return 1.0 / (4.0 * a * a * (1.0 - lam * lam))
