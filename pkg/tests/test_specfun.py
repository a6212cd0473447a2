"""Incomplete gamma, complex erfc, η branch and Hermite recurrences"""

import cmath
import math

import numpy as np
import pytest
from scipy import special

from rmt_lab.errors import DomainError, RecurrenceOverflowError
from rmt_lab.specfun import (
    erfc_complex,
    eta_branch,
    gamma_p,
    gamma_q,
    gamma_q_uniform,
    hermite_h,
    log_gamma_q,
    uniform_remainder,
)


def test_gamma_q_order_one_is_exponential():
    z = np.array([0.3, 2.5, 10.0, -3.0 + 1.0j, 0.5 + 2.0j])
    np.testing.assert_allclose(gamma_q(1, z), np.exp(-z), rtol=1e-12)


@pytest.mark.parametrize("w", [0.5, 3.7, 50.0])
def test_gamma_q_matches_scipy_on_the_real_axis(w):
    z = np.array([0.1, 1.0, 4.0, 30.0, 60.0])
    np.testing.assert_allclose(np.real(gamma_q(w, z)), special.gammaincc(w, z), rtol=1e-11)


def test_gamma_q_and_p_sum_to_one():
    z = np.array([2.0 + 3.0j, 10.0 - 1.0j, -4.0 + 0.5j])
    np.testing.assert_allclose(gamma_q(7.3, z) + gamma_p(7.3, z), 1.0, atol=1e-12)


def test_gamma_q_integer_order_left_half_plane_is_finite_sum():
    z = -20.0 + 2.0j
    expected = cmath.exp(-z) * sum(z ** j / math.factorial(j) for j in range(5))
    assert abs(gamma_q(5, z) - expected) <= 1e-12 * abs(expected)


def test_log_gamma_q_deep_tail():
    expected = math.log(special.gammaincc(50.0, 400.0))
    assert log_gamma_q(50.0, 400.0).real == pytest.approx(expected, rel=1e-10)


def test_gamma_q_scalar_returns_complex():
    assert isinstance(gamma_q(2.0, 1.0), complex)
    assert gamma_q(3.0, 0.0) == 1.0


def test_gamma_q_rejects_nonpositive_order():
    with pytest.raises(DomainError):
        gamma_q(0.0, 1.0)
    with pytest.raises(DomainError):
        gamma_q(1.0, complex(math.inf, 0.0))


def test_erfc_reflection():
    z = np.array([0.2 + 0.1j, -1.5 + 2.0j, 3.0 - 0.5j])
    np.testing.assert_allclose(erfc_complex(z) + erfc_complex(-z), 2.0, atol=1e-13)


def test_eta_signs_on_positive_axis():
    assert eta_branch(1.0).eta == 0
    assert eta_branch(2.0).eta.real > 0.0
    assert eta_branch(0.5).eta.real < 0.0
    assert abs(eta_branch(0.5).eta.imag) == 0.0


@pytest.mark.parametrize("z", [0.3, 1.0001, 1.0 + 0.5j, -0.5 + 0.2j, 3.0 - 2.0j])
def test_eta_squared_identity(z):
    eta = eta_branch(z).eta
    assert abs(eta * eta / 2.0 - (z - 1.0 - cmath.log(z))) <= 1e-12 * max(1.0, abs(z))


def test_eta_is_continuous_across_the_real_axis_near_one():
    above = eta_branch(1.2 + 1e-9j).eta
    below = eta_branch(1.2 - 1e-9j).eta
    assert abs(above - below) < 1e-6


def test_eta_origin_and_guard():
    origin = eta_branch(0.0)
    assert origin.at_origin
    assert origin.exponent == math.inf
    with pytest.raises(DomainError):
        eta_branch(cmath.rect(1.0, 1.5 * math.pi - 0.001), arg=1.5 * math.pi - 0.001)
    with pytest.raises(DomainError):
        eta_branch(1.0j, arg=0.3)


def test_eta_on_extended_sheet_keeps_the_identity():
    theta = 1.2 * math.pi
    z = cmath.rect(0.8, theta)
    eta = eta_branch(z, arg=theta).eta
    log_z = math.log(0.8) + 1j * theta
    assert abs(eta * eta / 2.0 - (z - 1.0 - log_z)) < 1e-10


def test_uniform_term_at_transition_point():
    assert gamma_q_uniform(100.0, 1.0) == pytest.approx(0.5)
    assert gamma_q_uniform(100.0, 0.0) == 1.0


def test_uniform_remainder_leading_correction():
    # Q(a, a) = 1/2 - 1/(3 sqrt(2πa)) + O(1/a)
    expected = -1.0 / (3.0 * math.sqrt(200.0 * math.pi))
    assert uniform_remainder(100.0, 1.0).real == pytest.approx(expected, rel=0.05)


def test_uniform_remainder_shrinks_with_order():
    small = abs(uniform_remainder(50.0, 2.0))
    large = abs(uniform_remainder(800.0, 2.0))
    assert large < small


@pytest.mark.parametrize("z", [0.8, 1.2])
@pytest.mark.parametrize("w", [50.0, 200.0])
def test_uniform_remainder_halves_when_order_quadruples(w, z):
    exponent = eta_branch(z).exponent
    scaled = abs(uniform_remainder(w, z)) * math.exp(w * exponent)
    scaled_4w = abs(uniform_remainder(4.0 * w, z)) * math.exp(4.0 * w * exponent)
    assert scaled_4w / scaled <= 0.6


def test_uniform_needs_large_order():
    with pytest.raises(DomainError):
        gamma_q_uniform(5.0, 1.0)
    with pytest.raises(DomainError):
        uniform_remainder(9.9, 1.0)


def test_hermite_low_degrees():
    x = np.array([-1.3, 0.0, 0.7, 2.0 + 1.0j])
    np.testing.assert_allclose(hermite_h(0, x), 1.0)
    np.testing.assert_allclose(hermite_h(1, x), 2.0 * x)
    np.testing.assert_allclose(hermite_h(3, x), 8.0 * x ** 3 - 12.0 * x, rtol=1e-13)
    np.testing.assert_allclose(hermite_h(4, x), 16.0 * x ** 4 - 48.0 * x ** 2 + 12.0, rtol=1e-13, atol=1e-12)


def test_hermite_matches_scipy_at_moderate_degree():
    x = np.linspace(-3.0, 3.0, 7)
    expected = special.eval_hermite(20, x)
    scale = np.max(np.abs(expected))
    np.testing.assert_allclose(np.real(hermite_h(20, x)), expected, rtol=1e-9, atol=1e-10 * scale)


def test_hermite_degree_limits():
    with pytest.raises(DomainError):
        hermite_h(501, 0.5)
    with pytest.raises(DomainError):
        hermite_h(-1, 0.5)
    with pytest.raises(RecurrenceOverflowError):
        hermite_h(500, 1e200)
