import math

import numpy as np
import pytest
from scipy import integrate

from movingwell import (DomainError, MappedTime, MotionLaw, alpha_at, bessel_integrals, dilation_rate,
                        expansion_parameter, first_order_amplitude, mapped_eigenfunction,
                        perturbation_matrix_element, perturbation_terms, tau_of_t, tau_of_t_numeric)
from movingwell.bessel import mapped_eigenfunction_derivative
from movingwell.mapped import alpha_of_tau, dilation_matrix_element, t_of_tau, tau_final

LAWS = [MotionLaw.linear(0.5, 1.0), MotionLaw.linear(3.0, 0.2),
        MotionLaw.table([(0, 1), (0.3, 0.6), (0.5, 0.6), (1.0, 1.4)])]


@pytest.mark.parametrize("law", LAWS)
def test_tau_closed_form_vs_quadrature(law):
    ts = np.linspace(0, law.duration_T, 1000)
    closed = tau_of_t(law, ts)
    numeric = np.array([tau_of_t_numeric(law, t) for t in ts])
    assert np.max(np.abs(closed - numeric)) < 1e-10


def test_linear_tau_is_t_over_alpha():
    law = MotionLaw.linear(0.4, 2.0)
    t = np.linspace(0, 2, 7)
    assert np.allclose(tau_of_t(law, t), t / alpha_at(law, t), rtol=1e-15)


@pytest.mark.parametrize("law", LAWS)
def test_inverse_maps(law):
    t = np.linspace(0, law.duration_T, 101)
    tau = tau_of_t(law, t)
    assert np.allclose(alpha_of_tau(law, tau), alpha_at(law, t), rtol=1e-13)
    assert np.allclose(t_of_tau(law, tau), t, atol=1e-13)
    assert tau_final(law) == pytest.approx(tau[-1])


def test_tau_range_checked():
    law = LAWS[0]
    with pytest.raises(DomainError):
        alpha_of_tau(law, 1.1 * tau_final(law))


def test_dilation_rate_is_alpha_times_velocity():
    law = MotionLaw.linear(0.5, 1.0)
    tau = np.linspace(0, tau_final(law), 5)
    assert np.allclose(dilation_rate(law, tau), -0.5 * alpha_of_tau(law, tau))


def test_mapped_time_record():
    mt = MappedTime.at(LAWS[0], 0.5)
    assert mt.tau == pytest.approx(0.5 / 0.75)
    assert mt.alpha == pytest.approx(0.75)


def test_expansion_parameter_value():
    assert expansion_parameter(2, 1, 1.0, 1.0) == pytest.approx(17.2682, abs=1e-4)
    assert expansion_parameter(2, 1, 2.0, 0.5) == pytest.approx(17.2682, abs=1e-4)
    with pytest.raises(DomainError):
        expansion_parameter(1, 1, 1.0, 1.0)
    with pytest.raises(DomainError):
        expansion_parameter(2, 1, 1.0, 0.0)


@pytest.mark.parametrize("m,n", [(1, 2), (2, 1), (3, 1), (2, 5)])
def test_dilation_element_by_quadrature(m, n):
    def s(k, y):
        return math.sqrt(2) * math.sin(math.pi * k * y)

    def ds(k, y):
        return math.sqrt(2) * math.pi * k * math.cos(math.pi * k * y)

    val, _ = integrate.quad(lambda y: s(m, y) * (y * ds(n, y) + 0.5 * s(n, y)), 0, 1, limit=200)
    assert dilation_matrix_element(m, n) == pytest.approx(val, abs=1e-12)
    assert dilation_matrix_element(m, n) == -dilation_matrix_element(n, m)


@pytest.mark.parametrize("m,n", [(1, 1), (2, 1), (1, 3)])
def test_bessel_integrals_by_quadrature(m, n):
    inv_sq, mixed = bessel_integrals(m, n)
    ref1, _ = integrate.quad(lambda y: mapped_eigenfunction(m, y) * mapped_eigenfunction(n, y) / y**2,
                             0, 1, limit=400, epsabs=1e-12)
    ref2, _ = integrate.quad(lambda y: mapped_eigenfunction(m, y) * mapped_eigenfunction_derivative(n, y) / y,
                             0, 1, limit=400, epsabs=1e-12)
    assert inv_sq == pytest.approx(ref1, abs=1e-9)
    assert mixed == pytest.approx(ref2, abs=1e-9)


def test_bessel_operator_scaling():
    # second-order term goes as 1/alpha'^2, the others as 1/alpha'
    a = perturbation_terms(1, 2, 1.0, 0.1)
    b = perturbation_terms(1, 2, 1.0, 0.2)
    assert a.second / b.second == pytest.approx(4.0)
    assert a.first / b.first == pytest.approx(2.0)
    assert a.mixed / b.mixed == pytest.approx(2.0)
    assert perturbation_matrix_element(1, 2, 1.0, 0.1) == pytest.approx(a.value)
    with pytest.raises(DomainError):
        perturbation_terms(1, 2, 1.0, 0.0)


def test_first_order_matches_exact_for_slow_motion(exact):
    T = 10 / (math.pi**2 / 2)
    law = MotionLaw.linear(1.1, T)
    w = abs(first_order_amplitude(1, 2, law)) ** 2
    assert w == pytest.approx(exact(1, 1.1, T, M=2**13, k_max=2)[1], rel=5e-3)


def test_first_order_vanishes_without_motion():
    law = MotionLaw.table([(0, 1), (1, 1)])
    assert first_order_amplitude(1, 2, law) == 0
    with pytest.raises(DomainError):
        first_order_amplitude(1, 2, law, operator="bessel")
    with pytest.raises(DomainError):
        first_order_amplitude(2, 2, MotionLaw.linear(1.1, 1.0))


def test_bessel_amplitude_is_finite():
    val = first_order_amplitude(1, 2, MotionLaw.linear(1.1, 1.0), operator="bessel")
    assert np.isfinite(val)
