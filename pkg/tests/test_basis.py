from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from xxzfidelity.basis import BasisError, StateLookupError, build_basis, state_index


def test_two_site_sector():
    b = build_basis(2, 1)
    assert list(b.states) == [0b01, 0b10]
    assert state_index(b, 0b01) == 0
    assert state_index(b, 0b10) == 1


@pytest.mark.parametrize("L,n,size", [(2, 1, 2), (4, 2, 6), (16, 8, 12870)])
def test_sizes(L, n, size):
    assert build_basis(L, n).dim == size


def test_smallest_member_first():
    assert state_index(build_basis(4, 2), 0b0011) == 0


@pytest.mark.parametrize("L,n", [(1, 0), (25, 3), (4, 5), (4, -1)])
def test_out_of_range(L, n):
    with pytest.raises(BasisError):
        build_basis(L, n)


def test_lookup_outside_sector():
    b = build_basis(4, 2)
    with pytest.raises(StateLookupError):
        state_index(b, 0b0111)
    with pytest.raises(StateLookupError):
        state_index(b, 0b110000)


@given(st.integers(2, 12).flatmap(lambda L: st.tuples(st.just(L), st.integers(0, L))))
def test_invariants(Ln):
    L, n = Ln
    b = build_basis(L, n)
    s = b.states
    assert len(s) == comb(L, n)
    assert np.all(np.diff(s) > 0)
    assert all(bin(int(x)).count("1") == n and int(x) < (1 << L) for x in s)
    assert all(state_index(b, int(x)) == i for i, x in enumerate(s))


@given(st.integers(3, 10).flatmap(lambda L: st.tuples(st.just(L), st.integers(1, L - 1))),
       st.data())
def test_hop_closure(Ln, data):
    L, n = Ln
    b = build_basis(L, n)
    s = int(b.states[data.draw(st.integers(0, b.dim - 1))])
    j, k = data.draw(st.integers(0, L - 1)), data.draw(st.integers(0, L - 1))
    # S+_j S-_k: needs k up and j down (or j == k, which is number-conserving)
    if j != k and (s >> k) & 1 and not (s >> j) & 1:
        t = s ^ (1 << j) ^ (1 << k)
        assert b.states[state_index(b, t)] == t
