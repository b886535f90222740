import math

import numpy as np
import pytest

from dedekind_moments.afe import (
    AFE_KERNEL,
    afe_residual,
    afe_terms,
    default_mn_max,
    g_factor,
    kernel_value,
    v_weight,
    v_weight_many,
    x_factor,
    x_factor_stirling,
    xi_symmetry_residual,
)
from dedekind_moments.characters import principal_character
from dedekind_moments.errors import PreconditionError, TruncationError
from dedekind_moments.models import KernelSpec, ShiftTuple
from dedekind_moments.services.analytic import QUARTIC_KERNEL


def test_kernels_are_even_and_normalized():
    s = np.array([0.3 + 1.2j, -2.0 + 0.5j])
    for kernel in (AFE_KERNEL, QUARTIC_KERNEL, KernelSpec()):
        assert abs(kernel_value(0, kernel) - 1) < 1e-15
        assert np.allclose(kernel_value(s, kernel), kernel_value(-s, kernel), rtol=1e-14)


def test_gaussian_scale_one_is_exp_s_squared():
    s = 0.7 + 2.1j
    assert abs(kernel_value(s, KernelSpec()) - np.exp(s * s)) < 1e-13


def test_g_factor_is_one_at_zero(shifts):
    assert abs(g_factor(0, 50.0, shifts[0], 1) - 1) < 1e-14


def test_x_factor_approaches_stirling(chi_m3, generic_shift):
    exact = x_factor(1000.0, generic_shift, chi_m3)
    approx = x_factor_stirling(1000.0, generic_shift, chi_m3)
    assert abs(exact - approx) < 1e-3 * abs(approx)
    with pytest.raises(PreconditionError):
        x_factor(0.0, generic_shift, chi_m3)


def test_v_weight_batch_matches_adaptive(shifts):
    sh = shifts[0]
    x = np.array([1.0, 250.0, 900.0])
    batch = v_weight_many(x, 50.0, sh, 0, AFE_KERNEL)
    for xi, value in zip(x, batch):
        assert abs(value - v_weight(float(xi), 50.0, sh, 0, AFE_KERNEL)) < 1e-9


def test_v_weight_limits(shifts):
    sh = shifts[0]
    small, large = v_weight_many(np.array([1e-2, 1e8]), 50.0, sh, 1, AFE_KERNEL)
    assert abs(small - 1) < 1e-8
    assert abs(large) < 1e-8


def test_default_mn_max_grows_with_t_and_q():
    assert default_mn_max(80.0, 3) > default_mn_max(30.0, 3)
    assert default_mn_max(30.0, 5) > default_mn_max(30.0, 3)


def test_afe_identity_small_height(chi_m3, shifts):
    assert afe_residual(30.0, shifts[0], chi_m3) <= 1e-6


def test_afe_truncation_is_reported(chi_5, shifts):
    with pytest.raises(TruncationError):
        afe_residual(50.0, shifts[0], chi_5, mn_max=40)


def test_afe_needs_primitive_character(shifts):
    with pytest.raises(PreconditionError):
        afe_terms(30.0, shifts[0], principal_character(4))


@pytest.mark.parametrize("name", ["chi_m3", "chi_m4", "chi_5"])
def test_xi_symmetry(name, request, shifts):
    chi = request.getfixturevalue(name)
    assert xi_symmetry_residual(0.3 + 0.2j, 40.0, shifts[1], chi) < 1e-10


@pytest.mark.slow
@pytest.mark.parametrize("name", ["chi_m3", "chi_m4", "chi_5"])
@pytest.mark.parametrize("t", [30.0, 50.0, 80.0])
def test_afe_identity_grid(name, t, request):
    chi = request.getfixturevalue(name)
    sh = ShiftTuple.random(np.random.default_rng(int(t)), 0.05)
    first = afe_terms(t, sh, chi, kernel=AFE_KERNEL)
    assert first.tail_bound <= 1e-6
    assert first.residual <= 1e-6
    second = afe_terms(t, sh, chi, kernel=QUARTIC_KERNEL)
    assert abs(first.rhs - second.rhs) / max(1.0, abs(first.lhs)) <= 1e-6
    assert math.isfinite(abs(second.x_factor))
