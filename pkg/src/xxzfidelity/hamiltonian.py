"""Matrix-free XXZ Hamiltonian within one magnetization sector.

    H = sum_j ( Sx_j Sx_{j+1} + Sy_j Sy_{j+1} + lam * Sz_j Sz_{j+1} )

The transverse part is written as (S+S- + S-S+)/2, so every antiparallel
bond contributes a hop of amplitude 1/2, and the Ising part is +-lam/4
depending on whether the bond is aligned.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .basis import SpinBasis, build_basis

MATERIALIZE_MAX_DIM = 4096


class BoundaryCondition(str, Enum):
    PERIODIC = "periodic"
    OPEN = "open"


class HamiltonianError(ValueError):
    pass


class ShapeError(ValueError):
    pass


def bonds(L: int, bc: BoundaryCondition | str) -> list[tuple[int, int]]:
    bc = BoundaryCondition(bc)
    out = [(j, j + 1) for j in range(L - 1)]
    if bc is BoundaryCondition.PERIODIC:
        if L < 3:
            raise HamiltonianError(
                "periodic chains need L >= 3: for L=2 the wrap-around bond "
                "duplicates the single open bond"
            )
        out.append((L - 1, 0))
    return out


@dataclass(frozen=True)
class _Tables:
    zz: np.ndarray  # sum over bonds of <Sz Sz>, per basis state
    src: np.ndarray
    dst: np.ndarray


@lru_cache(maxsize=8)
def _tables(L: int, n_up: int, bc: BoundaryCondition) -> _Tables:
    # Connectivity is lambda-independent, so it is shared by every lambda on a grid.
    basis = build_basis(L, n_up)
    states = basis.states
    zz = np.zeros(basis.dim)
    src, dst = [], []
    for i, j in bonds(L, bc):
        bi = (states >> i) & 1
        bj = (states >> j) & 1
        aligned = bi == bj
        zz += np.where(aligned, 0.25, -0.25)
        flip = np.nonzero(~aligned)[0]
        flipped = states[flip] ^ ((1 << i) | (1 << j))
        src.append(flip)
        dst.append(np.searchsorted(states, flipped))
    src_a = np.concatenate(src) if src else np.zeros(0, dtype=np.int64)
    dst_a = np.concatenate(dst) if dst else np.zeros(0, dtype=np.int64)
    for a in (zz, src_a, dst_a):
        a.setflags(write=False)
    return _Tables(zz=zz, src=src_a, dst=dst_a)


@dataclass(frozen=True)
class HamiltonianOp:
    basis: SpinBasis
    lam: float
    bc: BoundaryCondition = BoundaryCondition.PERIODIC

    def __post_init__(self):
        object.__setattr__(self, "bc", BoundaryCondition(self.bc))
        bonds(self.basis.L, self.bc)  # validates L against bc

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def _t(self) -> _Tables:
        return _tables(self.basis.L, self.basis.n_up, self.bc)

    def zz_diagonal(self) -> np.ndarray:
        """Diagonal of dH/dlam = sum_j Sz_j Sz_{j+1} in the sector basis."""
        return self._t.zz

    def apply_zz(self, v: np.ndarray) -> np.ndarray:
        v = self._check(v)
        return self._t.zz * v

    def apply_hop(self, v: np.ndarray) -> np.ndarray:
        v = self._check(v)
        t = self._t
        return 0.5 * np.bincount(t.dst, weights=v[t.src], minlength=self.dim)

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = self._check(v)
        t = self._t
        out = 0.5 * np.bincount(t.dst, weights=v[t.src], minlength=self.dim)
        out += self.lam * t.zz * v
        return out

    __matmul__ = apply

    def materialize(self) -> np.ndarray:
        return materialize(self)

    def _check(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise ShapeError(f"expected vector of length {self.dim}, got shape {v.shape}")
        return v


def xxz_hamiltonian(L: int, lam: float, n_up: int | None = None,
                    bc: BoundaryCondition | str = "periodic") -> HamiltonianOp:
    """Convenience constructor; ``n_up`` defaults to the Sz=0 sector L//2."""
    if n_up is None:
        n_up = L // 2
    return HamiltonianOp(build_basis(L, n_up), float(lam), BoundaryCondition(bc))


def zz_diagonal(L: int, n_up: int, bc: BoundaryCondition | str = "periodic") -> np.ndarray:
    """Per-state value of sum_j Sz_j Sz_{j+1} (the operator multiplying lam)."""
    return _tables(L, n_up, BoundaryCondition(bc)).zz


def apply(H: HamiltonianOp, v: np.ndarray) -> np.ndarray:
    return H.apply(v)


def materialize(H: HamiltonianOp) -> np.ndarray:
    """Dense matrix of ``H``; refused above MATERIALIZE_MAX_DIM."""
    n = H.dim
    if n > MATERIALIZE_MAX_DIM:
        raise HamiltonianError(
            f"sector dimension {n} exceeds dense limit {MATERIALIZE_MAX_DIM}"
        )
    t = H._t
    M = np.diag(H.lam * t.zz)
    np.add.at(M, (t.dst, t.src), 0.5)
    return M
