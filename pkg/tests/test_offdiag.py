import pytest

from dedekind_moments.errors import PreconditionError
from dedekind_moments.models import ShiftTuple, SumTruncation
from dedekind_moments.offdiag import (
    displayed_u12,
    r_exponent,
    s_ij_sum,
    u_21_by_swap,
    u_ij_brute,
    u_ij_closed,
    u_ij_factors,
)

SH = ShiftTuple.of(0.02 + 0.01j, -0.03 + 0.02j, 0.01 - 0.02j, 0.04 + 0.01j)
SMALL = SumTruncation(r_max=3000, d_max=3000)


def test_r_exponent_picks_pairs():
    assert r_exponent(1, 1, SH) == SH.alpha + SH.gamma
    assert r_exponent(2, 1, SH) == SH.beta + SH.gamma
    assert r_exponent(1, 2, SH) == SH.alpha + SH.delta


def test_empty_classes_are_rejected(chi_m3):
    with pytest.raises(PreconditionError):
        u_ij_closed(1, 2, 2, 1, chi_m3, SH, 1.5)
    with pytest.raises(PreconditionError):
        u_ij_closed(2, 1, 1, 2, chi_m3, SH, 1.5)
    with pytest.raises(PreconditionError):
        u_ij_closed(1, 1, 2, 4, chi_m3, SH, 1.5)
    with pytest.raises(ValueError):
        u_ij_closed(1, 3, 1, 1, chi_m3, SH, 1.5)


def test_brute_needs_convergent_r_sum(chi_m3):
    with pytest.raises(PreconditionError):
        u_ij_brute(1, 1, 1, 1, chi_m3, SH, 0.5, SMALL)


@pytest.mark.parametrize(
    "i,j,h,k",
    [
        (1, 1, 1, 1),
        pytest.param(1, 1, 2, 5, marks=pytest.mark.slow),
        pytest.param(2, 2, 1, 1, marks=pytest.mark.slow),
        (1, 2, 3, 2),
        pytest.param(2, 1, 2, 3, marks=pytest.mark.slow),
    ],
)
def test_brute_matches_closed(chi_m3, i, j, h, k):
    s = 1.5 + 0.5j
    brute, used = u_ij_brute(i, j, h, k, chi_m3, SH, s, SMALL)
    closed = u_ij_closed(i, j, h, k, chi_m3, SH, s)
    assert used.tail_bound > 0
    assert abs(brute - closed) <= max(1e-5, 10 * used.tail_bound)


def test_u21_is_swapped_u12(chi_m4):
    s = 1.4 - 0.2j
    direct = u_ij_closed(2, 1, 1, 4, chi_m4, SH, s)
    swapped = u_21_by_swap(1, 4, chi_m4, SH, s)
    assert abs(direct - swapped) < 1e-10 * abs(direct)


def test_displayed_u12_misses_the_parity_sign(chi_m3, chi_5):
    s = 1.5
    for chi, h in ((chi_m3, 3), (chi_5, 5)):
        closed = u_ij_closed(1, 2, h, 1, chi, SH, s)
        assert abs(chi(-1) * displayed_u12(h, 1, chi, SH, s) - closed) < 1e-12 * abs(closed)


def test_factors_multiply_to_closed(chi_m3):
    factors = u_ij_factors(2, 2, 1, 2, chi_m3, SH, 1.5)
    assert "Q22" in factors and "C22" in factors
    product = 1
    for value in factors.values():
        product *= value
    assert abs(product - u_ij_closed(2, 2, 1, 2, chi_m3, SH, 1.5)) < 1e-14 * abs(product)


def test_single_r_sum_reports_tail(chi_m3):
    value, used = s_ij_sum(1, 1, 1, 1, 6, chi_m3, SH, SMALL)
    assert used.d_max == 3000
    assert used.tail_bound > 0
    assert abs(value) < 1e3
    with pytest.raises(PreconditionError):
        s_ij_sum(1, 1, 1, 1, 0, chi_m3, SH, SMALL)


@pytest.mark.slow
@pytest.mark.parametrize("s", [1.2, 1.3 + 1j, 1.5, 2.0 - 0.5j, 2.5])
@pytest.mark.parametrize("i,j,h,k", [(1, 1, 2, 3), (2, 2, 1, 1), (1, 2, 3, 1), (2, 1, 1, 3)])
def test_brute_matches_closed_default_truncation(chi_m3, s, i, j, h, k):
    brute, used = u_ij_brute(i, j, h, k, chi_m3, SH, s)
    closed = u_ij_closed(i, j, h, k, chi_m3, SH, s)
    assert abs(brute - closed) <= max(1e-5, 10 * used.tail_bound)
