import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dickeising import (DomainError, NoSolutionError, QuadratureConfig, ReducedIsingParams,
                        ReducedParams, critical_beta, free_energy_density, landau_coefficients,
                        magnetization, max_neg_I2, minimize, reduced_free_energy,
                        second_order_condition, tricritical_point)
from dickeising.ising import ising_free_energy
from dickeising.landau import (_SMALL_FIELD, _batched, _i2_integrand, _i4_integrand,
                               coefficient_i2, coefficient_i4, i4_zero_field, omega_window,
                               zero_field_coefficients)

TIGHT = QuadratureConfig(refine_tol=1e-13)


def _f_of_s(beta, h, s, q=TIGHT):
    return float(ising_free_energy(beta, math.sqrt(h * h + s), q))


def _richardson_derivatives(beta, h, d=2e-2):
    """First and second derivatives in s = x^2 at s = 0, fourth-order accurate."""
    def d1(step):
        return (_f_of_s(beta, h, step) - _f_of_s(beta, h, -step)) / (2 * step)

    def d2(step):
        return (_f_of_s(beta, h, step) - 2 * _f_of_s(beta, h, 0.0) + _f_of_s(beta, h, -step)) / step ** 2

    return (4 * d1(d / 2) - d1(d)) / 3, (4 * d2(d / 2) - d2(d)) / 3


def test_zeroth_coefficient_is_ising_free_energy():
    c = landau_coefficients(2.0, 1.0)
    assert c.I0 == pytest.approx(free_energy_density(ReducedIsingParams(2.0, 1.0)), rel=1e-14)


def test_coefficients_match_richardson_differences():
    c = landau_coefficients(3.0, 0.8, TIGHT)
    first, second = _richardson_derivatives(3.0, 0.8)
    assert c.I2 == pytest.approx(first, abs=1e-7)
    assert c.I4 == pytest.approx(second / 2, abs=1e-7)


@given(st.floats(0.3, 20.0), st.floats(0.05, 4.0))
def test_i2_equals_minus_half_magnetization_over_field(beta, h):
    # dF/ds = f'(u) / (2u) and f' = -m gives an independent route to I2
    i2 = coefficient_i2(beta, h)
    assert i2 == pytest.approx(-magnetization(ReducedIsingParams(beta, h)) / (2 * h), abs=1e-9)


@pytest.mark.parametrize("beta", [0.7, 1.3, 4.0, 25.0])
def test_small_field_series_agrees_with_quadrature(beta):
    h = np.array([0.16, 0.2, 0.25])
    quad_i2 = -_batched(_i2_integrand, beta, h, TIGHT)
    quad_i4 = -_batched(_i4_integrand, beta, h, TIGHT)
    # just below the switch both routes are available through a forced evaluation
    np.testing.assert_allclose(coefficient_i2(beta, h), quad_i2, atol=1e-10)
    np.testing.assert_allclose(coefficient_i4(beta, h), quad_i4, atol=1e-8)
    hs = np.array([_SMALL_FIELD * 0.999, _SMALL_FIELD * 1.001])
    i2 = coefficient_i2(beta, hs)
    assert abs(i2[1] - i2[0]) < 1e-3


@pytest.mark.parametrize("beta", [0.8, 1.5, 6.0])
def test_zero_field_limit_from_quadrature_extrapolation(beta):
    hs = np.array([0.2, 0.25, 0.3, 0.35, 0.4])
    for which, integrand in ((0, _i2_integrand), (1, _i4_integrand)):
        vals = -_batched(integrand, beta, hs, TIGHT)
        # both coefficients are even in h; fit a polynomial in h^2
        fit = np.polyfit(hs ** 2, vals, 4)
        assert fit[-1] == pytest.approx(zero_field_coefficients(beta)[which], abs=1e-5)


def test_rejects_zero_field():
    with pytest.raises(DomainError):
        landau_coefficients(2.0, 0.0)


def test_quartic_model_small_order_parameter(rng):
    for _ in range(20):
        beta, h = rng.uniform(0.5, 20.0), rng.uniform(0.2, 3.0)
        omega = rng.uniform(0.05, 0.5)
        c = landau_coefficients(beta, h, TIGHT)
        p = ReducedParams(h, beta, omega)
        err = []
        for x in (1e-2, 1e-1):
            direct = float(reduced_free_energy(math.hypot(h, x), p, TIGHT))
            err.append(abs(c.quartic(x, omega) - direct))
            if x == 1e-2:
                assert err[0] / abs(direct) < 1e-8
        # the x^6 tail dominates the larger x; ratio ~ 10^6 within a factor 10
        if err[1] > 1e-9:
            assert 1e5 < err[1] / max(err[0], 1e-300) < 1e7


def test_i2_vanishes_for_polarized_chain():
    # I2 = -m/(2h) with m increasing to 1, so the decay is exactly 1/(2h) at large h
    for beta in (0.5, 3.0, 30.0):
        i2 = coefficient_i2(beta, np.array([1.0, 10.0, 100.0]))
        assert abs(i2[1]) < abs(i2[0]) and abs(i2[2]) < abs(i2[1]) / 5
        assert 100.0 * abs(i2[2]) == pytest.approx(0.5 * magnetization(ReducedIsingParams(beta, 100.0)), rel=1e-8)
        assert abs(coefficient_i4(beta, 10.0)) < abs(coefficient_i4(beta, 1.0))


def test_second_order_condition_signs():
    hs = np.geomspace(0.01, 10, 50)
    for beta in (0.3, 1.0, 10.0, 50.0):
        assert np.all(second_order_condition(beta, hs, 0.40) > 0)
    # I2 = -m/(2h) is negative, so with no cavity penalty the condition stays
    # below zero while approaching it as the chain polarizes
    vals = second_order_condition(5.0, np.array([2.0, 10.0, 50.0]), 0.0)
    assert np.all(vals < 0) and np.all(np.diff(vals) > 0)


def test_second_order_root_separates_phases():
    beta, omega = 2.0, 0.25
    hs = np.linspace(0.2, 3.0, 200)
    v = second_order_condition(beta, hs, omega)
    j = np.nonzero(np.diff(np.sign(v)))[0][0]
    from scipy.optimize import brentq
    root = brentq(lambda h: second_order_condition(beta, h, omega), hs[j], hs[j + 1], xtol=1e-13)
    assert minimize(ReducedParams(root - 1e-3, beta, omega)).phase.value == "superradiant"
    assert minimize(ReducedParams(root + 1e-3, beta, omega)).phase.value == "normal"


def test_minimum_of_i2_at_low_temperature():
    i2 = coefficient_i2(10.0, np.linspace(0.05, 4.0, 400))
    assert -0.3366 < i2.min() < -0.32


def test_global_bound_on_minus_i2():
    value, (beta, h) = max_neg_I2()
    assert value == pytest.approx(0.3356, abs=1e-3)
    d = 1e-4
    for db, dh in ((d * beta, 0.0), (0.0, d * h)):
        slope = (coefficient_i2(beta - db, h - dh) - coefficient_i2(beta + db, h + dh)) / (2 * (db + dh))
        assert abs(slope) < 1e-4
    small, _ = max_neg_I2(beta_range=(0.05, 0.1), n_grid=40)
    assert small < value


def test_critical_beta_value_and_family_minimum():
    bc = critical_beta()
    assert bc == pytest.approx(1.1430, abs=1e-3)
    lo, hi = omega_window()
    betas = [tricritical_point(w)[0] for w in np.linspace(lo + 1e-5, hi - 1e-4, 8)]
    assert min(betas) >= bc - 1e-9
    assert min(betas) == pytest.approx(bc, abs=1e-3)


def test_no_quartic_sign_change_below_critical_beta():
    hs = np.geomspace(1e-3, 10, 200)
    assert np.all(coefficient_i4(1.0, hs) > 0)
    assert i4_zero_field(1.0) is None


@pytest.mark.parametrize("omega", [0.2997, 0.301, 0.32, 0.335])
def test_tricritical_residuals(omega):
    beta, h = tricritical_point(omega)
    assert abs(coefficient_i4(beta, h)) < 1e-6
    assert abs(coefficient_i2(beta, h) + omega) < 1e-6


@pytest.mark.parametrize("omega", [0.35, 0.5, 0.1])
def test_tricritical_outside_window(omega):
    with pytest.raises(NoSolutionError):
        tricritical_point(omega)
