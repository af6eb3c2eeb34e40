"""Fixed-magnetization sectors of an L-site spin-1/2 chain.

A configuration is an L-bit integer; bit ``j`` set means site ``j`` is up.
States are kept in ascending order so that lookups are a binary search.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

L_MIN = 2
L_MAX = 24


class BasisError(ValueError):
    """Out-of-range chain length or particle number."""


class StateLookupError(KeyError):
    """Configuration is not a member of the sector."""


@dataclass(frozen=True, eq=False)
class SpinBasis:
    L: int
    n_up: int
    states: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return int(self.states.shape[0])

    def index_of(self, state: int) -> int:
        return state_index(self, state)

    def indices_of(self, states: np.ndarray) -> np.ndarray:
        """Vectorized lookup; every entry must belong to the sector."""
        idx = np.searchsorted(self.states, states)
        return idx

    def __len__(self) -> int:
        return self.dim


def build_basis(L: int, n_up: int) -> SpinBasis:
    if not isinstance(L, (int, np.integer)) or not L_MIN <= L <= L_MAX:
        raise BasisError(f"L must be an integer in [{L_MIN}, {L_MAX}], got {L!r}")
    if not isinstance(n_up, (int, np.integer)) or not 0 <= n_up <= L:
        raise BasisError(f"n_up must be an integer in [0, {L}], got {n_up!r}")
    L, n_up = int(L), int(n_up)
    all_states = np.arange(1 << L, dtype=np.int64)
    states = all_states[np.bitwise_count(all_states) == n_up]
    states.setflags(write=False)
    assert states.shape[0] == comb(L, n_up)
    return SpinBasis(L=L, n_up=n_up, states=states)


def state_index(basis: SpinBasis, state: int) -> int:
    state = int(state)
    i = int(np.searchsorted(basis.states, state))
    if i >= basis.dim or int(basis.states[i]) != state:
        raise StateLookupError(
            f"state {state:0{basis.L}b} is not in the (L={basis.L}, n_up={basis.n_up}) sector"
        )
    return i
