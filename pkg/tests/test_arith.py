import math

import numpy as np
import pytest

from dedekind_moments.arith import (
    classify_pij,
    dirichlet_series_of_twisted_ramanujan,
    enumerate_pij,
    factorize,
    kloosterman,
    kloosterman_bound,
    q_split,
    ramanujan_sum,
    ramanujan_sum_sterneck,
    salie_chi,
    shifted_divisor_f,
    shifted_divisor_sigma,
    shifted_divisor_table,
    twisted_ramanujan,
    twisted_ramanujan_closed,
    twisted_sigma,
    twisted_sigma_closed,
)
from dedekind_moments.errors import PreconditionError


def test_factored_int_properties():
    n = factorize(360)
    assert n.factors == ((2, 3), (3, 2), (5, 1))
    assert n.tau == 24
    assert n.phi == 96
    assert n.mu == 0
    assert factorize(30).mu == -1
    assert sum(n.divisors()) == 1170


def test_q_split():
    split = q_split(360, 6)
    assert (split.q_part, split.non_q_part) == (72, 5)


def test_shifted_divisor_sums_match_brute(chi_m3):
    a, b = 0.03 + 0.01j, -0.02j
    for n in (1, 12, 45, 64):
        brute = sum(u ** (-a) * (n // u) ** (-b) * chi_m3(n // u) for u in range(1, n + 1) if n % u == 0)
        assert abs(shifted_divisor_f(a, b, n, chi_m3) - brute) < 1e-12
        plain = sum(u ** (-a) * (n // u) ** (-b) for u in range(1, n + 1) if n % u == 0)
        assert abs(shifted_divisor_sigma(a, b, n) - plain) < 1e-12


def test_divisor_table_matches_pointwise(chi_m4):
    table = shifted_divisor_table(0.01, 0.02 + 0.01j, chi_m4, 60)
    for n in (1, 2, 17, 36, 60):
        assert abs(table[n] - shifted_divisor_f(0.01, 0.02 + 0.01j, n, chi_m4)) < 1e-12


def test_confluent_shifts_count_divisors():
    assert abs(shifted_divisor_sigma(0.0, 0.0, 360) - 24) < 1e-12


@pytest.mark.parametrize("name", ["chi_m3", "chi_m4", "chi_5"])
def test_twisted_sigma_closed_forms(name, request):
    chi = request.getfixturevalue(name)
    a, b = 0.02 - 0.01j, 0.04j
    for d in range(1, 2 * chi.q + 1):
        c = next(x for x in range(1, d + 2) if math.gcd(x, d) == 1)
        for n in (1, 2, 6, 12):
            direct = twisted_sigma(a, b, n, c, d, chi)
            closed = twisted_sigma_closed(a, b, n, c, d, chi)
            assert abs(direct - closed) < 1e-10 * max(1.0, abs(direct)), (d, n)


def test_twisted_sigma_representative_independence(chi_m4):
    base = twisted_sigma_closed(0.01, 0.02, 6, 1, 6, chi_m4)
    shifted = twisted_sigma_closed(0.01, 0.02, 6, 1, 6, chi_m4, qbar_shift=2)
    assert abs(base - shifted) < 1e-12


def test_twisted_sigma_needs_coprime(chi_m3):
    with pytest.raises(PreconditionError):
        twisted_sigma(0, 0, 4, 2, 4, chi_m3)


def test_ramanujan_sums():
    for d in range(1, 40):
        for r in range(0, 30):
            assert ramanujan_sum(d, r) == ramanujan_sum_sterneck(d, r)
    assert ramanujan_sum(12, 0) == 4


@pytest.mark.parametrize("name", ["chi_m3", "chi_m4", "chi_quartic"])
def test_twisted_ramanujan_closed_form(name, request):
    chi = request.getfixturevalue(name)
    q = chi.q
    for d in (q, 2 * q, 3 * q, q * q):
        for r in range(1, 40):
            direct = twisted_ramanujan(d, r, chi)
            closed = twisted_ramanujan_closed(d, r, chi)
            assert abs(direct - closed) < 1e-9, (d, r)
            bound = math.sqrt(q) * sum(x for x in range(1, d + 1) if math.gcd(r, d) % x == 0)
            assert abs(direct) <= bound + 1e-9


def test_twisted_ramanujan_closed_needs_q_divides_d(chi_m3):
    with pytest.raises(PreconditionError):
        twisted_ramanujan_closed(4, 1, chi_m3)


def test_kloosterman_real_and_bounded():
    for d in (5, 7, 12, 25):
        for r in (1, 2, 5):
            value = kloosterman(r, 1, d)
            assert abs(value) <= kloosterman_bound(r, d) + 1e-9
    assert abs(kloosterman(1, 1, 5) - (2 + 2 * math.cos(4 * math.pi / 5))) < 1e-12


def test_salie_needs_q_divides_d(chi_m3):
    assert np.isfinite(abs(salie_chi(1, 1, 6, chi_m3)))
    with pytest.raises(PreconditionError):
        salie_chi(1, 1, 4, chi_m3)


@pytest.mark.parametrize("q,h,k", [(3, 1, 1), (4, 2, 3), (3, 9, 2), (5, 5, 7), (4, 8, 9)])
def test_pij_classes_partition(q, h, k):
    limit = 120
    seen = []
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            seen.extend(enumerate_pij(i, j, h, k, q, limit))
    assert sorted(seen) == list(range(1, limit + 1))


def test_classify_pij_examples():
    assert classify_pij(1, 1, 1, 3) == (1, 1)
    assert classify_pij(3, 1, 1, 3) == (2, 2)
    assert classify_pij(6, 2, 1, 3) == (2, 2)
    assert classify_pij(3, 3, 1, 3) == (1, 2)
    with pytest.raises(PreconditionError):
        classify_pij(5, 2, 4, 3)


@pytest.mark.parametrize("d", [3, 6])
def test_dirichlet_series_of_twisted_ramanujan(chi_m3, d):
    sides = dirichlet_series_of_twisted_ramanujan(d, chi_m3, 2.5)
    assert abs(sides["lhs"] - sides["rhs"]) <= 10 * sides["tail_bound"] + 1e-10
    with pytest.raises(PreconditionError):
        dirichlet_series_of_twisted_ramanujan(4, chi_m3, 2.5)
