import numpy as np
import pytest

from dedekind_moments.characters import principal_character
from dedekind_moments.errors import DomainError, PreconditionError
from dedekind_moments.numkernel import dirichlet_l, riemann_zeta
from dedekind_moments.voronoi import (
    BumpFunction,
    delta_symbol_residual,
    delta_vanishes,
    delta_weight,
    dual_transforms,
    e_continued,
    e_residue,
    e_series,
    functional_e_residual,
    voronoi_residual,
    voronoi_terms,
)

SH2 = (0.05 - 0.01j, -0.04 + 0.02j)
WIDE_SH2 = (0.01, 0.03)
WIDE_WINDOW = BumpFunction(500.0, 50.0)
CHARACTERS = {3: "chi_m3", 4: "chi_m4", 5: "chi_5"}


def test_bump_support_and_normalization():
    g = BumpFunction(300.0, 8.0)
    assert g(300.0) == pytest.approx(1.0)
    assert g(300.0 + 81.0) == 0.0
    unit = delta_weight(20.0)
    assert unit.kind == "smoothed-indicator"
    assert float(np.sum(unit(np.arange(1, 60)))) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        BumpFunction(10.0, 0.0)


def test_e_at_d_one_factors(chi_m3):
    s = 2.2 + 1.0j
    value = e_continued(SH2, s, 1, 1, chi_m3)
    expected = riemann_zeta(s + SH2[0]) * dirichlet_l(s + SH2[1], chi_m3)
    assert abs(value - expected) < 1e-10 * abs(expected)


@pytest.mark.parametrize("c,d", [(1, 2), (2, 3), (5, 6), (1, 4)])
def test_e_continuation_matches_series(chi_m4, c, d):
    s = 2.5 + 0.3j
    series, tail = e_series(SH2, s, c, d, chi_m4, N=50_000)
    assert abs(series - e_continued(SH2, s, c, d, chi_m4)) <= tail + 1e-10


def test_e_series_needs_convergence(chi_m3):
    with pytest.raises(DomainError):
        e_series(SH2, 1.0, 1, 1, chi_m3)
    with pytest.raises(PreconditionError):
        e_series(SH2, 2.0, 2, 4, chi_m3)


def test_e_residue_regimes(chi_m4):
    assert len(e_residue(SH2, 1, 1, chi_m4)) == 1
    assert e_residue(SH2, 1, 2, chi_m4) == []
    assert len(e_residue(SH2, 1, 4, chi_m4)) == 1


@pytest.mark.parametrize("name", ["chi_m3", "chi_m4", "chi_5"])
@pytest.mark.parametrize("c,d", [(1, 1), (1, 2), (2, 3), (1, 6)])
def test_e_functional_equation(name, c, d, request):
    chi = request.getfixturevalue(name)
    assert functional_e_residual(SH2, 0.3 + 2.0j, c, d, chi, "alpha") < 1e-9


def test_beta_theta_fails_for_odd_characters(chi_m3):
    assert functional_e_residual(SH2, 0.3 + 2.0j, 1, 2, chi_m3, "beta") > 1e-6


def test_beta_theta_agrees_for_even_characters(chi_5):
    assert functional_e_residual(SH2, 0.3 + 2.0j, 1, 2, chi_5, "beta") < 1e-9


@pytest.mark.parametrize("c,d", [(1, 1), (1, 3)])
def test_voronoi_summation(chi_m3, c, d):
    g = BumpFunction(300.0, 8.0)
    terms = voronoi_terms(g, SH2, c, d, chi_m3)
    assert terms.residual / max(1.0, abs(terms.lhs)) <= 1e-6
    assert voronoi_residual(g, SH2, c, d, chi_m3) == terms.residual


def test_voronoi_mutations_miss(chi_m3):
    g = BumpFunction(300.0, 8.0)
    for flag in ("drop_residue", "swap_kernels"):
        mutated = voronoi_terms(g, SH2, 1, 1, chi_m3, **{flag: True})
        assert mutated.residual / max(1.0, abs(mutated.lhs)) > 1e-2


def test_window_must_avoid_small_n(chi_m3):
    with pytest.raises(PreconditionError):
        voronoi_terms(BumpFunction(5.0, 8.0), SH2, 1, 1, chi_m3)


@pytest.mark.parametrize("q,d", [(1, 1), (3, 2), (3, 3), (4, 4), (5, 2), (5, 5)])
def test_voronoi_grid(q, d, request):
    chi = principal_character(1) if q == 1 else request.getfixturevalue(CHARACTERS[q])
    terms = voronoi_terms(WIDE_WINDOW, WIDE_SH2, 1, d, chi)
    assert terms.residual / max(1.0, abs(terms.lhs)) <= 1e-6


def test_wide_window_support_starts_at_one():
    assert WIDE_WINDOW.support == (1.0, 1000.0)
    assert WIDE_WINDOW(1.0) == 0.0
    assert BumpFunction(30.0, 8.0).support[0] < 1


def test_dual_transforms_fixed_rule_matches_adaptive(chi_m3):
    g = BumpFunction(300.0, 8.0)
    n = np.arange(1, 4)
    for swap in (False, True):
        fixed = dual_transforms(g, SH2, 3, chi_m3, n, swap_kernels=swap)
        exact = dual_transforms(g, SH2, 3, chi_m3, n, swap_kernels=swap, adaptive=True)
        for a, b in zip(fixed, exact):
            scale = max(1.0, float(np.max(np.abs(b))))
            assert float(np.max(np.abs(a - b))) <= 1e-9 * scale


def test_delta_symbol_reconstruction():
    for n in range(-6, 7):
        assert delta_symbol_residual(n, 20.0) <= 1e-8


def test_delta_support():
    assert delta_vanishes(0, 40, 20.0)
    assert delta_vanishes(399, 41, 20.0)
    assert not delta_vanishes(0, 10, 20.0)
