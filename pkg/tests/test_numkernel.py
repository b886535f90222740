import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from dedekind_moments import numkernel
from dedekind_moments.errors import DomainError, NonConvergenceError, NumericsError, PoleError
from dedekind_moments.numkernel import (
    bernoulli_numbers,
    adaptive_integral,
    bessel,
    complex_gamma,
    completed_pair,
    composite_gauss_legendre,
    dirichlet_l,
    hurwitz_critical_pair,
    hurwitz_zeta,
    hurwitz_zeta_many,
    log_gamma,
    riemann_zeta,
    smooth_step,
    vertical_line_integral,
    vertical_line_nodes,
)


def test_bernoulli_numbers_are_exact():
    bern = bernoulli_numbers()
    assert bern[0] == 1
    assert bern[1] == Fraction(1, 2)
    assert bern[2] == Fraction(1, 6)
    assert bern[4] == Fraction(-1, 30)
    assert bern[12] == Fraction(-691, 2730)
    assert all(b == 0 for b in bern[3::2])


def test_riemann_zeta_known_values():
    assert abs(riemann_zeta(2) - math.pi**2 / 6) < 1e-13
    assert abs(riemann_zeta(0) + 0.5) < 1e-13
    assert abs(riemann_zeta(-1) + 1 / 12) < 1e-13


@pytest.mark.parametrize("s", [0.5 + 14.134725j, 0.5 + 1000j, 0.52 - 3500.5j, -1.5 + 2j])
def test_hurwitz_matches_mpmath(s):
    for a in (1.0, 1 / 3, 0.75):
        expected = complex(mpmath.zeta(s, a))
        assert abs(hurwitz_zeta(s, a) - expected) <= 1e-10 * max(1.0, abs(expected))


def test_first_zero_is_a_zero():
    assert abs(riemann_zeta(0.5 + 14.134725141734693j)) < 1e-10


def test_vectorised_matches_scalar():
    s = np.array([0.5 + 10j, 0.6 + 200j, 2.0])
    batch = hurwitz_zeta_many(s, 0.25)
    for value, point in zip(batch, s):
        assert abs(value - hurwitz_zeta(complex(point), 0.25)) < 1e-12


def test_pole_and_window_errors():
    with pytest.raises(PoleError):
        riemann_zeta(1.0)
    with pytest.raises(DomainError):
        riemann_zeta(0.5 + 1e6j)
    with pytest.raises(DomainError):
        hurwitz_zeta(2.0, 1.5)


def test_dirichlet_l_at_one(chi_m4, chi_m3):
    assert abs(dirichlet_l(1.0, chi_m4) - math.pi / 4) < 1e-12
    assert abs(dirichlet_l(1.0, chi_m3) - math.pi / (3 * math.sqrt(3))) < 1e-12


def test_critical_pair_matches_single_evaluations():
    t = np.array([100.0, 250.5])
    x, y = 0.01 + 0.002j, -0.02j
    first, second = hurwitz_critical_pair(t, 0.5, x, y)
    for i, ti in enumerate(t):
        assert abs(first[i] - hurwitz_zeta(0.5 + x + 1j * ti, 0.5)) < 1e-11
        assert abs(second[i] - hurwitz_zeta(0.5 + y - 1j * ti, 0.5)) < 1e-11


def test_completed_functions_are_symmetric(chi_m3):
    s = 0.3 + 7j
    lam, xi = completed_pair(s, chi_m3)
    lam_r, xi_r = completed_pair(1 - s, chi_m3)
    assert abs(lam - lam_r) < 1e-10 * abs(lam)
    # real odd character: root number is 1
    assert abs(xi - xi_r) < 1e-9 * abs(xi)


def test_log_gamma_pole():
    with pytest.raises(PoleError):
        log_gamma(-2.0)
    assert abs(log_gamma(5.0) - math.log(24)) < 1e-13


def test_bessel_real_and_complex_order():
    x = np.array([0.5, 3.0])
    assert np.allclose(bessel("J", 0.1, x), [complex(mpmath.besselj(0.1, v)) for v in x], atol=1e-12)
    nu = 0.05 + 0.03j
    expected = complex(mpmath.besselk(nu, 2.0))
    assert abs(bessel("K", nu, 2.0) - expected) < 1e-12
    with pytest.raises(DomainError):
        bessel("J", 0.5, 1.0)


def test_near_integer_order_is_finite():
    value = bessel("Y", 1e-10, 2.0)
    assert abs(value - float(mpmath.bessely(0, 2.0))) < 1e-6


def test_smooth_step_limits():
    x = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
    y = smooth_step(x)
    assert y[0] == 0 and y[1] == 0
    assert y[3] == 1 and y[4] == 1
    assert abs(y[2] - 0.5) < 1e-15


def test_composite_rule_integrates_oscillation():
    value = composite_gauss_legendre(lambda t: np.exp(1j * t), 0.0, 50.0, panels=20)
    assert abs(value - (np.exp(50j) - 1) / 1j) < 1e-12


def test_vertical_line_nodes_pick_up_half_residue():
    # e^{s^2}/s is odd, so the line sigma = 1 carries half the residue at 0
    s, w = vertical_line_nodes(1.0, 8.0, 400)
    total = np.sum(w * np.exp(s**2) / s)
    assert abs(total - 0.5) < 1e-10


def test_complex_gamma():
    assert abs(complex_gamma(0.5) - math.sqrt(math.pi)) < 1e-13
    assert abs(complex_gamma(5) - 24) < 1e-11
    s = 0.25 + 30j
    expected = complex(mpmath.gamma(mpmath.mpc(s.real, s.imag)))
    assert abs(complex_gamma(s) - expected) <= 1e-12 * abs(expected)
    with pytest.raises(PoleError):
        complex_gamma(-2)
    with pytest.raises(NumericsError):
        complex_gamma(200.0)


def test_adaptive_integral():
    value = adaptive_integral(lambda t: np.exp(1j * t), 0.0, math.pi, scale=0.5)
    assert abs(value - 2j) < 1e-12
    with pytest.raises(DomainError):
        adaptive_integral(lambda t: t, 1.0, 1.0)


def _fake_quad(message, error):
    def quad(func, a, b, **kwargs):
        return (func(a), error, {}, message)

    return quad


def test_quad_roundoff_inside_budget_is_accepted(monkeypatch):
    message = "The occurrence of roundoff error is detected, which prevents the requested tolerance from being achieved."
    monkeypatch.setattr(numkernel.integrate, "quad", _fake_quad(message, 1e-15))
    value = adaptive_integral(lambda t: 1.0 + 1e-13j, 0.0, 1.0)
    assert value == pytest.approx(1.0 + 1e-13j)


def test_quad_failures_are_raised(monkeypatch):
    roundoff = "The occurrence of roundoff error is detected."
    monkeypatch.setattr(numkernel.integrate, "quad", _fake_quad(roundoff, 1e-3))
    with pytest.raises(NonConvergenceError, match="roundoff"):
        adaptive_integral(lambda t: 1.0 + 0j, 0.0, 1.0)
    limit = "The maximum number of subdivisions (50) has been achieved."
    monkeypatch.setattr(numkernel.integrate, "quad", _fake_quad(limit, 1e-15))
    with pytest.raises(NonConvergenceError, match="subdivisions"):
        adaptive_integral(lambda t: 1.0 + 0j, 0.0, 1.0)


def test_vertical_line_integral_half_residue():
    # e^{s^2}/s is odd, so the line sigma = 1 carries half of the residue at 0
    value = vertical_line_integral(lambda s: np.exp(s * s) / s, 1.0)
    assert abs(value - 0.5) < 1e-10
