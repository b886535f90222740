"""Finite Euler products and the main-term factor functions.

A, A', Z, Z' combine shifted zeta and L values with finite products over the
primes of q, h and k. Every local factor built from a closed form has a series
twin so the two can be compared prime by prime.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Literal

from sympy import primerange

from .arith import FactoredInt, as_factored, coprime_quotient, q_split
from .characters import DirichletCharacter
from .errors import PreconditionError
from .models import LocalFactorReport, ShiftTuple
from .numkernel import dirichlet_l, riemann_zeta

logger = logging.getLogger(__name__)

SERIES_TOL = 1e-17
MAX_SERIES_TERMS = 2000

FactorKind = Literal["C11", "C22", "C12", "C21"]
IdentityKind = Literal[
    "C11_fe",
    "C11_fe_perm",
    "C12_fe",
    "C21_fe",
    "bridge_c11_b",
    "bridge_c22_b",
    "bridge_c12_b_prime",
    "bridge_c21_b_prime",
    "r_alpha",
    "r_prime_beta",
]


def require_generic(sh: ShiftTuple, gap: float) -> None:
    """Reject shift tuples whose pole-controlling combinations come within ``gap`` of 0."""
    if sh.pole_gap() < gap:
        raise PreconditionError(
            f"shift tuple is {sh.pole_gap():.2e} from a pole, below the gap {gap:.1e}"
        )


def _coprime(h: FactoredInt, k: FactoredInt, what: str) -> None:
    if math.gcd(h.n, k.n) != 1:
        raise PreconditionError(f"{what} needs (h, k) = 1, got h={h.n}, k={k.n}")


def _q_product(q: int, local: Callable[[int], complex]) -> complex:
    value = 1 + 0j
    for p in as_factored(q).primes:
        value *= local(p)
    return value


# ---------------------------------------------------------------------------
# A and A'
# ---------------------------------------------------------------------------


def a_factor(sh: ShiftTuple, chi: DirichletCharacter, s: complex) -> complex:
    """A_{alpha,beta,gamma,delta}(s)."""
    a, b, g, d = sh.as_tuple()
    total = sh.total
    value = (
        riemann_zeta(1 + a + g + s)
        * riemann_zeta(1 + b + d + s)
        * dirichlet_l(1 + b + g + s, chi)
        * dirichlet_l(1 + a + d + s, chi.conj())
        / riemann_zeta(2 + total + 2 * s)
    )
    return value * _q_product(
        chi.q, lambda p: (1 - p ** (-1 - s - b - d)) / (1 - p ** (-2 - 2 * s - total))
    )


def a_residue(
    sh: ShiftTuple, chi: DirichletCharacter, pole: Literal["alpha_gamma", "beta_delta"]
) -> complex:
    """Residue of A(s) at s = -alpha-gamma or s = -beta-delta."""
    a, b, g, d = sh.as_tuple()
    total = sh.total
    if pole == "alpha_gamma":
        s = -a - g
        partial = riemann_zeta(1 + b + d + s)
    else:
        s = -b - d
        partial = riemann_zeta(1 + a + g + s)
    value = (
        partial
        * dirichlet_l(1 + b + g + s, chi)
        * dirichlet_l(1 + a + d + s, chi.conj())
        / riemann_zeta(2 + total + 2 * s)
    )
    return value * _q_product(
        chi.q, lambda p: (1 - p ** (-1 - s - b - d)) / (1 - p ** (-2 - 2 * s - total))
    )


def _a_local_series(sh: ShiftTuple, chi: DirichletCharacter, p: int, s: complex) -> complex:
    a, b, g, d = sh.as_tuple()
    c = chi(p)
    return _pair_series(p ** (-a), c * p ** (-b), p ** (-g), c.conjugate() * p ** (-d), p ** (-1 - s), 0)


def a_factor_euler(
    sh: ShiftTuple, chi: DirichletCharacter, s: complex, p_max: int = 10_000
) -> tuple[complex, float]:
    """Truncated Euler product of sum_n f_{a,b}(n, chi) f_{g,d}(n, chi-bar) n^{-1-s}, with a tail estimate."""
    s = complex(s)
    if s.real <= 0.5:
        raise PreconditionError("the Euler product oracle needs Re s > 1/2")
    value = 1 + 0j
    for p in primerange(2, p_max + 1):
        value *= _a_local_series(sh, chi, int(p), complex(s))
    sigma = complex(s).real - 4 * max(abs(z.real) for z in sh.as_tuple())
    tail = 4 * p_max ** (-sigma) / (sigma * math.log(p_max))
    return value, tail


def a_prime_factor(sh: ShiftTuple, chi: DirichletCharacter, s: complex) -> complex:
    """A'_{alpha,beta,gamma,delta}(s, chi) with L(., chi^2) taken mod q as given."""
    a, b, g, d = sh.as_tuple()
    return (
        dirichlet_l(1 + a + g + s, chi)
        * dirichlet_l(1 + b + d + s, chi)
        * dirichlet_l(1 + a + d + s, chi)
        * dirichlet_l(1 + b + g + s, chi)
        / dirichlet_l(2 + sh.total + 2 * s, chi.square())
    )


# ---------------------------------------------------------------------------
# B and B': one generic local factor covers both
# ---------------------------------------------------------------------------
#
# With F(x, y, m) = sum_{i<=m} x^{m-i} y^i, the local factor at p is
#   sum_j F(a, b, j) F(c, d, m + j) X^j / sum_j F(a, b, j) F(c, d, j) X^j.
# B: a = p^-alpha, b = chi(p) p^-beta, c = p^-gamma, d = chi-bar(p) p^-delta, X = p^{-1-s}
# B': a = p^-alpha, b = p^-beta, c = p^-gamma, d = p^-delta, X = chi(p) p^{-1-s}


def _pair_closed(a: complex, b: complex, c: complex, d: complex, X: complex, m: int) -> complex | None:
    den = (c - d) * (1 - a * b * c * d * X * X)
    if abs(den) < 1e-8:
        return None
    num = (
        (c ** (m + 1) - d ** (m + 1))
        - X * c * d * (a + b) * (c**m - d**m)
        + X * X * a * b * c * d * (d * c**m - c * d**m)
    )
    return num / den


def _series_terms(a: complex, b: complex, c: complex, d: complex, X: complex) -> int:
    ratio = abs(X) * max(abs(a), abs(b), 1e-300) * max(abs(c), abs(d), 1e-300)
    if ratio == 0:
        return 1
    if ratio >= 1:
        raise PreconditionError("local series diverges; Re s is too small for these shifts")
    return min(MAX_SERIES_TERMS, int(math.log(SERIES_TOL) / math.log(ratio)) + 8)


def _pair_series(
    a: complex, b: complex, c: complex, d: complex, X: complex, m: int, terms: int | None = None
) -> complex:
    """sum_j F(a,b,j) F(c,d,m+j) X^j by the recurrence F(x,y,n) = x F(x,y,n-1) + y^n."""
    J = terms if terms is not None else _series_terms(a, b, c, d, X)
    f_ab = 1 + 0j
    f_cd = 1 + 0j
    for i in range(1, m + 1):
        f_cd = c * f_cd + d**i
    total = f_ab * f_cd
    power = 1 + 0j
    for j in range(1, J + 1):
        f_ab = a * f_ab + b**j
        f_cd = c * f_cd + d ** (m + j)
        power *= X
        total += f_ab * f_cd * power
    return total


def _pair_ratio_series(a, b, c, d, X, m, terms=None) -> complex:
    return _pair_series(a, b, c, d, X, m, terms) / _pair_series(a, b, c, d, X, 0, terms)


def _pair_ratio(a, b, c, d, X, m) -> complex:
    closed = _pair_closed(a, b, c, d, X, m)
    return closed if closed is not None else _pair_ratio_series(a, b, c, d, X, m)


def _b_entries(sh: ShiftTuple, h: FactoredInt, k: FactoredInt, chi: DirichletCharacter, s: complex):
    a, b, g, d = sh.as_tuple()
    for p, m in h.factors:
        c = chi(p)
        yield p, (p ** (-a), c * p ** (-b), p ** (-g), c.conjugate() * p ** (-d), p ** (-1 - s), m)
    for p, m in k.factors:
        c = chi(p)
        yield p, (p ** (-g), c.conjugate() * p ** (-d), p ** (-a), c * p ** (-b), p ** (-1 - s), m)


def _b_prime_entries(sh: ShiftTuple, h: FactoredInt, k: FactoredInt, chi: DirichletCharacter, s: complex):
    a, b, g, d = sh.as_tuple()
    for p, m in h.factors:
        yield p, (p ** (-a), p ** (-b), p ** (-g), p ** (-d), chi(p) * p ** (-1 - s), m)
    for p, m in k.factors:
        yield p, (p ** (-g), p ** (-d), p ** (-a), p ** (-b), chi(p) * p ** (-1 - s), m)


def _check_b_args(h, k, s, what: str) -> tuple[FactoredInt, FactoredInt, complex]:
    h, k = as_factored(h), as_factored(k)
    _coprime(h, k, what)
    s = complex(s)
    if s.real <= -0.5:
        raise PreconditionError(f"{what} needs Re s > -1/2")
    return h, k, s


def b_factor(sh: ShiftTuple, h, k, chi: DirichletCharacter, s: complex) -> complex:
    """B_{alpha,beta,gamma,delta,h,k}(s) from the closed local polynomials."""
    h, k, s = _check_b_args(h, k, s, "b_factor")
    value = 1 + 0j
    for _, args in _b_entries(sh, h, k, chi, s):
        value *= _pair_ratio(*args)
    return value


def b_factor_series(sh: ShiftTuple, h, k, chi: DirichletCharacter, s: complex, terms: int | None = None) -> complex:
    h, k, s = _check_b_args(h, k, s, "b_factor_series")
    value = 1 + 0j
    for _, args in _b_entries(sh, h, k, chi, s):
        value *= _pair_ratio_series(*args, terms=terms)
    return value


def b_prime_factor(sh: ShiftTuple, h, k, chi: DirichletCharacter, s: complex) -> complex:
    """B'_{alpha,beta,gamma,delta,h,k}(s, chi)."""
    h, k, s = _check_b_args(h, k, s, "b_prime_factor")
    value = 1 + 0j
    for _, args in _b_prime_entries(sh, h, k, chi, s):
        value *= _pair_ratio(*args)
    return value


def b_prime_factor_series(
    sh: ShiftTuple, h, k, chi: DirichletCharacter, s: complex, terms: int | None = None
) -> complex:
    h, k, s = _check_b_args(h, k, s, "b_prime_factor_series")
    value = 1 + 0j
    for _, args in _b_prime_entries(sh, h, k, chi, s):
        value *= _pair_ratio_series(*args, terms=terms)
    return value


def local_factor_report(
    sh: ShiftTuple, h, k, chi: DirichletCharacter, s: complex, prime: bool = False
) -> list[LocalFactorReport]:
    """Closed form against series for every local factor of B (or B')."""
    h, k, s = _check_b_args(h, k, s, "local_factor_report")
    entries = _b_prime_entries if prime else _b_entries
    reports = []
    for p, args in entries(sh, h, k, chi, s):
        a, b, c, d, X, m = args
        terms = _series_terms(a, b, c, d, X)
        closed = _pair_closed(*args)
        series = _pair_ratio_series(*args, terms=terms)
        closed = series if closed is None else closed
        reports.append(
            LocalFactorReport(
                prime=p,
                closed_form=closed,
                series_value=series,
                terms_used=terms,
                residual=abs(closed - series),
            )
        )
    return reports


def z_factor(sh: ShiftTuple, h, k, chi: DirichletCharacter, s: complex) -> complex:
    """Z = A * B."""
    return a_factor(sh, chi, s) * b_factor(sh, h, k, chi, s)


NormalizationKind = Literal["displayed", "root-number"]


def z_prime_factor(
    sh: ShiftTuple,
    h,
    k,
    chi: DirichletCharacter,
    s: complex,
    normalization: NormalizationKind = "displayed",
) -> complex:
    """Z' = conj(G(chi)) A' B'; ``root-number`` uses G(chi-bar) = chi(-1) conj(G(chi)) instead."""
    coeff = chi.gauss.conjugate()
    if normalization == "root-number":
        coeff = chi.conj().gauss
    return coeff * a_prime_factor(sh, chi, s) * b_prime_factor(sh, h, k, chi, s)


# ---------------------------------------------------------------------------
# Q, C, M
# ---------------------------------------------------------------------------


def q_factor(which: Literal["Q11", "Q22"], sh: ShiftTuple, q: int, s: complex) -> complex:
    if which == "Q22":
        return q_factor("Q11", sh.swap(), q, -s)
    a, b, g, d = sh.as_tuple()
    return _q_product(q, lambda p: (1 - p ** (-1 - b - d - 2 * s)) / (1 - p ** (-2 + a - b + g - d)))


def _c11_local(p: int, m: int, shifts, psi: complex, s: complex) -> complex:
    a, b, g, d = shifts
    x = a + d + 2 * s
    c0 = 1 - psi ** (m + 1) * p ** (-(m + 1) * x)
    c1 = (psi * p ** (g - d) + p ** (-b - d - 2 * s)) * (1 - psi**m * p ** (-m * x))
    c2 = psi * p ** (-b + g - 2 * d - 2 * s) - psi**m * p ** (-m * x) * p ** (a - b + g - d)
    den = (1 - psi * p ** (-x)) * (1 - p ** (-2 + a - b + g - d))
    return (c0 - c1 / p + c2 / p**2) / den


def _c22_local(p: int, m: int, shifts, psi: complex, s: complex) -> complex:
    a, b, g, d = shifts
    y = b + g + 2 * s
    lead = p ** (-m * y)
    c0 = lead - psi ** (m + 1) * p**y
    c1 = (lead - psi**m) * (p ** (b + d + 2 * s) + psi * p ** (-a + b))
    c2 = lead * psi * p ** (-a + 2 * b + d + 2 * s) - psi**m * p ** (-a + b - g + d)
    den = (1 - psi * p**y) * (1 - p ** (-2 - a + b - g + d))
    return (c0 - c1 / p + c2 / p**2) / den


def _c12_local(p: int, m: int, shifts, c: complex, s: complex) -> complex:
    a, b, g, d = shifts
    x = a + g + 2 * s
    c0 = 1 - p ** (-(m + 1) * x)
    c1 = c * (p ** (d - g) + p ** (-b - g - 2 * s)) * (1 - p ** (-m * x))
    c2 = c * c * p ** (d - b) * (p ** (-2 * (g + s)) - p ** (2 * (a + s)) * p ** (-(m + 1) * x))
    den = (1 - p ** (-x)) * (1 - c * c * p ** (-2 + a - b - g + d))
    return (c0 - c1 / p + c2 / p**2) / den


def _off_q(n: FactoredInt, q: int):
    return [(p, m) for p, m in n.factors if q % p]


def c_factor(which: FactorKind, sh: ShiftTuple, h, k, chi: DirichletCharacter, s: complex) -> complex:
    """C11, C22, C12, C21 as finite products over p | hk with p not dividing q."""
    h, k = as_factored(h), as_factored(k)
    _coprime(h, k, "c_factor")
    s = complex(s)
    q = chi.q
    a, b, g, d = sh.as_tuple()
    if which == "C21":
        return c_factor("C12", sh.permuted("g,d,a,b"), k, h, chi.conj(), s)
    value = 1 + 0j
    if which == "C11":
        for p, m in _off_q(h, q):
            value *= _c11_local(p, m, (a, b, g, d), chi(p).conjugate(), s)
        for p, m in _off_q(k, q):
            value *= _c11_local(p, m, (g, d, a, b), chi(p), s)
    elif which == "C22":
        value *= q_split(h, q).q_part ** (-b - g - 2 * s) * q_split(k, q).q_part ** (-a - d - 2 * s)
        for p, m in _off_q(h, q):
            value *= _c22_local(p, m, (a, b, g, d), chi(p).conjugate(), s)
        for p, m in _off_q(k, q):
            value *= _c22_local(p, m, (g, d, a, b), chi(p), s)
    elif which == "C12":
        for p, m in _off_q(h, q):
            value *= _c12_local(p, m, (a, b, g, d), chi(p), s)
        for p, m in _off_q(k, q):
            value *= _c12_local(p, m, (d, g, b, a), chi(p), s)
    else:
        raise ValueError(f"unknown C factor {which!r}")
    return value


def m_sum(alpha: complex, gamma: complex, h, q: int, s: complex) -> complex:
    """M_{alpha,gamma,h}(s) = sum_{m | h(q)/q} m^{-alpha-gamma-2s}."""
    h = as_factored(h)
    if h.n % q:
        raise PreconditionError(f"m_sum needs q | h (q={q}, h={h.n})")
    top = q_split(h, q).q_part // q
    return sum(m ** (-alpha - gamma - 2 * s) for m in as_factored(top).divisors())


def m_sum_reflection_residual(x: complex, h, q: int) -> float:
    """|sum m^-x - (h(q)/q)^-x sum m^x| over m | h(q)/q."""
    h = as_factored(h)
    if h.n % q:
        raise PreconditionError(f"m_sum needs q | h (q={q}, h={h.n})")
    top = q_split(h, q).q_part // q
    divs = as_factored(top).divisors()
    lhs = sum(m ** (-x) for m in divs)
    rhs = top ** (-x) * sum(m**x for m in divs)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Functional identities and bridges
# ---------------------------------------------------------------------------


def _identity_sides(kind: IdentityKind, sh: ShiftTuple, h: FactoredInt, k: FactoredInt, chi, s: complex):
    a, b, g, d = sh.as_tuple()
    H, K = h.n, k.n
    q = chi.q
    sw = sh.swap()
    if kind == "C11_fe":
        lhs = H**a * K**g * (H * K) ** (-s) * c_factor("C11", sh, h, k, chi, -s)
        rhs = H ** (-d) * K ** (-b) * (H * K) ** s * c_factor("C22", sw, h, k, chi, s)
    elif kind == "C11_fe_perm":
        lhs = H**b * K**d * (H * K) ** (-s) * c_factor("C22", sh, h, k, chi, -s)
        rhs = H ** (-g) * K ** (-a) * (H * K) ** s * c_factor("C11", sw, h, k, chi, s)
    elif kind == "C12_fe":
        lhs = (
            q ** (-(a + d - s))
            * m_sum(a, g, h, q, -s)
            * H**a * K**d * (H * K) ** (-s)
            * c_factor("C12", sh, h, k, chi, -s)
        )
        rhs = (
            q ** (-b - d) * q ** (b + g - s)
            * m_sum(-g, -a, h, q, s)
            * H ** (-g) * K ** (-b) * (H * K) ** s
            * c_factor("C12", sw, h, k, chi, s)
        )
    elif kind == "C21_fe":
        lhs = (
            q ** (-(b + g - s))
            * m_sum(a, g, k, q, -s)
            * H**b * K**g * (H * K) ** (-s)
            * c_factor("C21", sh, h, k, chi, -s)
        )
        rhs = (
            q ** (-b - d) * q ** (a + d - s)
            * m_sum(-g, -a, k, q, s)
            * H ** (-d) * K ** (-a) * (H * K) ** s
            * c_factor("C21", sw, h, k, chi, s)
        )
    elif kind == "bridge_c11_b":
        lhs = H**a * K**g * c_factor("C11", sh, h, k, chi, 0)
        rhs = b_factor(sh.permuted("-g,b,-a,d"), h, k, chi, 0)
    elif kind == "bridge_c22_b":
        lhs = H**b * K**d * c_factor("C22", sh, h, k, chi, 0)
        rhs = b_factor(sh.permuted("a,-d,g,-b"), h, k, chi, 0)
    elif kind == "bridge_c12_b_prime":
        if H % q:
            raise PreconditionError("bridge_c12_b_prime needs q | h")
        lhs = q ** (-a) * m_sum(a, g, h, q, 0) * H**a * K**d * c_factor("C12", sh, h, k, chi, 0)
        rhs = b_prime_factor(sh.permuted("-d,b,g,-a"), H // q, k, chi, 0)
    elif kind == "bridge_c21_b_prime":
        if K % q:
            raise PreconditionError("bridge_c21_b_prime needs q | k")
        lhs = q ** (-g) * m_sum(a, g, k, q, 0) * H**b * K**g * c_factor("C21", sh, h, k, chi, 0)
        rhs = b_prime_factor(sh.permuted("a,-g,-b,d"), h, K // q, chi.conj(), 0)
    elif kind == "r_alpha":
        lhs = H ** (-g) * K ** (-a) * c_factor("C11", sh, h, k, chi, -(a + g) / 2)
        rhs = b_factor(sh, h, k, chi, -(a + g))
    elif kind == "r_prime_beta":
        lhs = H ** (-d) * K ** (-b) * c_factor("C22", sh, h, k, chi, -(b + d) / 2)
        rhs = b_factor(sh, h, k, chi, -(b + d))
    else:
        raise ValueError(f"unknown identity {kind!r}")
    return complex(lhs), complex(rhs)


def functional_identity_residual(
    kind: IdentityKind, sh: ShiftTuple, h, k, chi: DirichletCharacter, s: complex = 0
) -> float:
    """|LHS - RHS| of a named functional identity or bridge lemma."""
    h, k = as_factored(h), as_factored(k)
    _coprime(h, k, "functional_identity_residual")
    lhs, rhs = _identity_sides(kind, sh, h, k, chi, complex(s))
    residual = abs(lhs - rhs)
    logger.debug("%s residual %.3e (|lhs|=%.3e)", kind, residual, abs(lhs))
    return residual


# ---------------------------------------------------------------------------
# Leading coefficient of the Corollary
# ---------------------------------------------------------------------------


def corollary_delta(m, chi_D: DirichletCharacter) -> float:
    """delta(m): 0 unless the inert part of m is a square, else a product over split primes."""
    m = as_factored(m)
    value = 1.0
    for p, e in m.factors:
        kind = round(chi_D(p).real)
        if kind == -1 and e % 2:
            return 0.0
        if kind == 1:
            value *= 1 + e * (1 - 1 / p) / (1 + 1 / p)
    return value


def corollary_c2(h, k, chi_D: DirichletCharacter) -> float:
    """c_2(h, k) = (6/pi^2) L(1,chi)^2 prod_{p|D} (1+1/p)^-1 delta(h_(k)) delta(k_(h))."""
    h, k = as_factored(h), as_factored(k)
    if not chi_D.is_real:
        raise PreconditionError("corollary_c2 needs a real (Kronecker) character")
    L1 = dirichlet_l(1, chi_D).real
    ramified = math.prod(1 / (1 + 1 / p) for p in as_factored(chi_D.q).primes)
    deltas = corollary_delta(coprime_quotient(k.n, h.n), chi_D) * corollary_delta(
        coprime_quotient(h.n, k.n), chi_D
    )
    return 6 / math.pi**2 * L1 * L1 * ramified * deltas
