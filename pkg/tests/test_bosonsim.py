import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xxzfidelity import bosonsim as bs
from xxzfidelity.errors import DomainError
from xxzfidelity.luttinger import fidelity_finite, fidelity_per_mode


def test_vacuum():
    s = bs.build_pair_state(0.0, 10)
    assert s.amplitudes[0] == 1.0 and not np.any(s.amplitudes[1:])


def test_one_pair_amplitudes():
    s = bs.build_pair_state(0.5, 1)
    np.testing.assert_allclose(s.amplitudes, [1 / math.cosh(0.5),
                                              -math.tanh(0.5) / math.cosh(0.5)], rtol=1e-15)


def test_norm_approaches_one_monotonically():
    norms = [bs.build_pair_state(0.8, n).norm_squared for n in range(0, 30)]
    assert all(b > a for a, b in zip(norms, norms[1:]))
    for n in (0, 5, 20):
        s = bs.build_pair_state(0.8, n)
        assert 1 - s.norm_squared == pytest.approx(s.tail_bound(), rel=1e-9)


def test_signs_alternate():
    c = bs.build_pair_state(0.3, 8).amplitudes
    assert np.all(np.sign(c[:-1]) == -np.sign(c[1:]))


def test_bad_arguments():
    with pytest.raises(DomainError):
        bs.build_pair_state(0.1, -1)


def test_self_overlap():
    s = bs.build_pair_state(1.2, 200)
    assert bs.pair_overlap(s, s) == pytest.approx(1.0, abs=1e-14)


def test_free_to_half_filling_k():
    a, b = bs.build_pair_state(0.0), bs.build_pair_state(0.5 * math.log(2))
    assert bs.pair_overlap(a, b) == pytest.approx(0.942809041582063, abs=1e-10)
    assert bs.pair_overlap(a, b) == pytest.approx(fidelity_per_mode(1, 0.5), abs=1e-12)


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_unnormalized_sum_vs_closed_form(ta, tb):
    z = bs.z_unnormalized(ta, tb)
    assert bs.unnormalized_overlap_sum(ta, tb) == pytest.approx(z, rel=1e-12)


def test_z_diagonal_is_cosh_squared():
    assert bs.z_unnormalized(0, 0) == 1.0
    assert bs.z_unnormalized(0.7, 0.7) == pytest.approx(math.cosh(0.7) ** 2, rel=1e-14)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_normalized_ratio(ta, tb):
    assert bs.normalized_z_ratio(ta, tb) == pytest.approx(1 / math.cosh(ta - tb), abs=1e-12)


@given(st.floats(-1.4, 1.4), st.floats(-1.4, 1.4), st.integers(10, 80))
def test_truncation_bound(ta, tb, n):
    err = abs(bs.pair_overlap(bs.build_pair_state(ta, n), bs.build_pair_state(tb, n))
              - 1 / math.cosh(ta - tb))
    assert err <= 2 * max(math.tanh(abs(ta)), math.tanh(abs(tb))) ** (2 * n) + 1e-15


@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(-0.7, 0.7))
def test_common_shift_invariance(ta, tb, c):
    a = bs.pair_overlap(bs.build_pair_state(ta), bs.build_pair_state(tb))
    b = bs.pair_overlap(bs.build_pair_state(ta + c), bs.build_pair_state(tb + c))
    assert a == pytest.approx(b, abs=1e-12)


@settings(deadline=None, max_examples=20)
@given(st.floats(0.5, 2.0), st.floats(0.5, 2.0), st.integers(0, 3))
def test_multi_pair_product(K, Kp, M):
    th = lambda k: -0.5 * math.log(k)
    a, b = bs.build_pair_state(th(K), 40), bs.build_pair_state(th(Kp), 40)
    assert bs.product_overlap(a, b, M) == pytest.approx(fidelity_finite(K, Kp, M), abs=1e-10)


def test_max_overlap_error():
    assert bs.max_overlap_error([0.0]) == 0.0
    assert bs.max_overlap_error(np.linspace(-1.5, 1.5, 13)) < 1e-10
    assert bs.max_overlap_error([1.5], n_max=2) > 1e-9
