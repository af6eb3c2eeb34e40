import inspect
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from xxzfidelity import luttinger as lt
from xxzfidelity.errors import DivergenceError, DomainError


def test_free_point():
    p = lt.params_of_lambda(0.0)
    assert (p.K, p.u, p.theta) == (1.0, 1.0, 0.0)


def test_isotropic_point():
    p = lt.params_of_lambda(1.0)
    assert p.K == pytest.approx(0.5, abs=1e-15)
    assert p.u == pytest.approx(math.pi / 2)


def test_u_limit_is_continuous():
    assert lt.velocity(1 - 1e-10) == pytest.approx(math.pi / 2, rel=1e-4)


def test_half():
    assert lt.luttinger_K(0.5) == pytest.approx(0.75, abs=1e-15)


@pytest.mark.parametrize("lam", [-1.0, -1.5, 1.0000001])
def test_outside_luttinger_phase(lam):
    with pytest.raises(DomainError):
        lt.params_of_lambda(lam)


@given(st.floats(0.05, 20))
def test_bogoliubov_relations(K):
    th = lt.bogoliubov_angle(K)
    p = lt.LuttingerParams(0.0, K, 1.0, th)
    assert math.cosh(th) == pytest.approx(p.cosh_theta, abs=1e-12 * p.cosh_theta)
    assert math.sinh(th) == pytest.approx(p.sinh_theta, abs=1e-12 * p.cosh_theta)
    assert p.cosh_theta ** 2 - p.sinh_theta ** 2 == pytest.approx(1, abs=1e-12 * p.cosh_theta ** 2)


def test_fidelity_per_mode():
    assert lt.fidelity_per_mode(0.7, 0.7) == 1.0
    assert lt.fidelity_per_mode(1, 0.5) == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-15)
    assert lt.fidelity_per_mode(2, 1) == pytest.approx(lt.fidelity_per_mode(4, 2), abs=1e-15)
    th = lt.bogoliubov_angle
    assert lt.fidelity_per_mode(1, 0.5) == pytest.approx(1 / math.cosh(th(1) - th(0.5)))
    with pytest.raises(DomainError):
        lt.fidelity_per_mode(0, 1)


@given(st.floats(0.01, 100), st.floats(0.01, 100))
def test_fidelity_per_mode_range(K, Kp):
    f = lt.fidelity_per_mode(K, Kp)
    assert 0 < f <= 1
    assert f == pytest.approx(lt.fidelity_per_mode(Kp, K), rel=1e-15)


def test_fidelity_finite():
    assert lt.fidelity_finite(1, 0.5, 0) == 1.0
    assert lt.fidelity_finite(1, 0.5, 2) == pytest.approx(8 / 9, abs=1e-15)
    vals = [lt.fidelity_finite(1, 0.8, M) for M in range(0, 2000, 100)]
    assert all(a > b for a, b in zip(vals, vals[1:])) and vals[-1] < 1e-4
    with pytest.raises(DomainError):
        lt.fidelity_finite(1, 0.5, -1)


def test_chi_general_simple_cases():
    assert lt.chi_analytic_general(lambda x: 3.0, 0.2) == 0.0
    for lam in (-2.0, 0.0, 1.7):
        assert lt.chi_analytic_general(math.exp, lam) == pytest.approx(0.25, rel=1e-9)


def test_chi_xxz_values():
    assert lt.chi_analytic_xxz(0.0) == pytest.approx(1 / math.pi ** 2, abs=1e-15)
    assert lt.chi_analytic_xxz(0.5) == pytest.approx(3 / (4 * math.pi ** 2), abs=1e-15)
    assert lt.chi_analytic_xxz(0.99) / lt.chi_analytic_xxz(0.9) > 5
    for lam in (-1.0, 1.0):
        with pytest.raises(DivergenceError):
            lt.chi_analytic_xxz(lam)
    with pytest.raises(DomainError):
        lt.chi_analytic_xxz(1.5)


def test_general_matches_xxz_at_free_point():
    a = lt.chi_analytic_general(lt.luttinger_K, 0.0, 1e-6)
    assert a == pytest.approx(lt.chi_analytic_xxz(0.0), rel=1e-8)


def test_general_matches_xxz_on_grid():
    for lam in np.linspace(-0.95, 0.95, 37):
        a = lt.chi_analytic_general(lt.luttinger_K, lam, 1e-6)
        assert a == pytest.approx(lt.chi_analytic_xxz(lam), rel=1e-6)


def test_chi_diverges_at_both_ends_with_interior_minimum():
    lams = np.linspace(-0.999, 0.999, 2001)
    chi = np.array([lt.chi_analytic_xxz(x) for x in lams])
    i = int(np.argmin(chi))
    assert 0 < i < len(lams) - 1
    assert chi[0] > 100 * chi[i] and chi[-1] > 10 * chi[i]
    assert np.all(np.diff(chi[i:]) > 0) and np.all(np.diff(chi[: i + 1]) < 0)
    assert np.all(chi > 0)


def test_susceptibility_never_reads_velocity():
    for fn in (lt.fidelity_per_mode, lt.fidelity_finite, lt.chi_analytic_general,
               lt.chi_analytic_xxz):
        assert "velocity" not in inspect.getsource(fn)
