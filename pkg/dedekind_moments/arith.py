"""Integer structure and the finite arithmetical sums.

Covers factorizations and q-parts, shifted divisor sums f and sigma, the twisted
sigma(n, c/d, chi) of the Voronoi formula, Ramanujan, Kloosterman and Salie sums,
and the P_ij classes that organise the off-diagonal d-sum.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np
from sympy import factorint

from .characters import DirichletCharacter
from .errors import NumericsError, PreconditionError

logger = logging.getLogger(__name__)

CONFLUENT_GAP = 1e-8


@dataclass(frozen=True)
class FactoredInt:
    """A positive integer with its factorization."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("FactoredInt needs n >= 1")
        primes = [p for p, _ in self.factors]
        if primes != sorted(set(primes)) or any(e < 1 for _, e in self.factors):
            raise ValueError("factors must have strictly increasing primes and exponents >= 1")
        if math.prod(p**e for p, e in self.factors) != self.n:
            raise ValueError("factors do not multiply to n")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def tau(self) -> int:
        return math.prod(e + 1 for _, e in self.factors)

    @property
    def mu(self) -> int:
        if any(e > 1 for _, e in self.factors):
            return 0
        return -1 if len(self.factors) % 2 else 1

    @property
    def phi(self) -> int:
        return math.prod(p ** (e - 1) * (p - 1) for p, e in self.factors)

    def valuation(self, p: int) -> int:
        return dict(self.factors).get(p, 0)

    def divisors(self) -> list[int]:
        out = [1]
        for p, e in self.factors:
            out = [d * p**j for d in out for j in range(e + 1)]
        return sorted(out)


@dataclass(frozen=True)
class QSplit:
    n: FactoredInt
    q_part: int
    non_q_part: int


@lru_cache(maxsize=4096)
def factorize(n: int) -> FactoredInt:
    """Complete factorization (sympy: trial division, Pollard rho, ECM)."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    return FactoredInt(n=n, factors=tuple(sorted(factorint(n).items())))


def as_factored(n: int | FactoredInt) -> FactoredInt:
    return n if isinstance(n, FactoredInt) else factorize(int(n))


def q_split(n: int | FactoredInt, q: int) -> QSplit:
    """n(q) is the part of n supported on primes dividing q; n* = n / n(q)."""
    n = as_factored(n)
    q_part = math.prod(p**e for p, e in n.factors if q % p == 0)
    return QSplit(n=n, q_part=q_part, non_q_part=n.n // q_part)


def coprime_quotient(m: int, n: int) -> int:
    """n_(m) = n / (n, m)."""
    if m < 1 or n < 1:
        raise ValueError("coprime_quotient needs m, n >= 1")
    return n // math.gcd(n, m)


def local_divisor_sum(a: complex, b: complex, m: int) -> complex:
    """sum_{j=0}^{m} a^{m-j} b^j."""
    if abs(a - b) < CONFLUENT_GAP:
        return sum(a ** (m - j) * b**j for j in range(m + 1))
    return (a ** (m + 1) - b ** (m + 1)) / (a - b)


def shifted_divisor_f(
    alpha: complex, beta: complex, n: int | FactoredInt, chi: DirichletCharacter
) -> complex:
    """f_{alpha,beta}(n, chi) = sum_{n1 n2 = n} n1^-alpha n2^-beta chi(n2)."""
    value = 1 + 0j
    for p, m in as_factored(n).factors:
        a = p ** (-alpha)
        b = chi(p) * p ** (-beta)
        value *= local_divisor_sum(a, b, m)
    return value


def shifted_divisor_sigma(alpha: complex, beta: complex, n: int | FactoredInt) -> complex:
    value = 1 + 0j
    for p, m in as_factored(n).factors:
        value *= local_divisor_sum(p ** (-alpha), p ** (-beta), m)
    return value


def divisor_pairs(n: int) -> Iterable[tuple[int, int]]:
    for u in as_factored(n).divisors():
        yield u, n // u


def dirichlet_convolve(a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    """c(P) = sum_{mn=P} a(m) b(n) for P <= N; index 0 is unused."""
    out = np.zeros(N + 1, dtype=complex)
    for m in range(1, N + 1):
        if a[m] == 0:
            continue
        top = N // m
        out[m : m * top + 1 : m] += a[m] * b[1 : top + 1]
    return out


def shifted_divisor_table(
    alpha: complex, beta: complex, chi: DirichletCharacter, N: int
) -> np.ndarray:
    """f_{alpha,beta}(n, chi) for n = 0..N by one convolution."""
    n = np.arange(N + 1, dtype=float)
    n[0] = 1.0
    left = np.exp(-alpha * np.log(n))
    right = np.exp(-beta * np.log(n)) * chi(np.arange(N + 1))
    left[0] = right[0] = 0
    return dirichlet_convolve(left, right, N)


@lru_cache(maxsize=256)
def unit_circle(d: int) -> np.ndarray:
    """e_d(x) for x = 0..d-1."""
    table = np.exp(2j * np.pi * np.arange(d) / d)
    table.setflags(write=False)
    return table


def e(x: int, d: int) -> complex:
    return complex(unit_circle(d)[x % d])


def twisted_sigma(
    alpha: complex, beta: complex, n: int, c: int, d: int, chi: DirichletCharacter
) -> complex:
    """sigma_{alpha,beta}(n, c/d, chi) by direct summation over b <= dq/rho."""
    if math.gcd(c, d) != 1:
        raise PreconditionError(f"twisted_sigma needs (c, d) = 1, got c={c}, d={d}")
    rho = math.gcd(d, chi.q)
    d1 = d * chi.q // rho
    table = unit_circle(d1)
    total = 0j
    for u, v in divisor_pairs(n):
        b = (c * u) % d + d * np.arange(d1 // d)
        b = np.where(b == 0, d1, b)
        inner = np.sum(chi(b) * table[(b * v) % d1])
        total += u ** (-alpha) * v ** (-beta) * complex(inner)
    return total


def twisted_sigma_closed(
    alpha: complex,
    beta: complex,
    n: int,
    c: int,
    d: int,
    chi: DirichletCharacter,
    qbar_shift: int = 0,
) -> complex:
    """Closed forms of sigma(n, c/d, chi) in the three rho = (d, q) regimes.

    ``qbar_shift`` moves the representative of the inverse of q/rho mod d/rho;
    the value must not depend on it.
    """
    if math.gcd(c, d) != 1:
        raise PreconditionError(f"twisted_sigma needs (c, d) = 1, got c={c}, d={d}")
    if not chi.primitive:
        raise PreconditionError("closed forms of twisted_sigma need a primitive character")
    q = chi.q
    rho = math.gcd(d, q)
    if rho == q:
        return chi(c) * e(c * n, d) * shifted_divisor_f(beta, alpha, n, chi)
    Q, D = q // rho, d // rho
    Qbar = (pow(Q, -1, D) if D > 1 else 1) + qbar_shift * D
    w = (Q * Qbar - 1) // D
    if rho == 1:
        return chi(d) * e(c * Qbar * n, d) * chi.gauss * shifted_divisor_f(alpha, beta, n, chi.conj())
    chibar = chi.conj()
    total = 0j
    for u, v in divisor_pairs(n):
        inner = sum(chibar(m * Q - v * w) * e(-m * c * u, rho) for m in range(1, rho + 1))
        total += u ** (-alpha) * v ** (-beta) * inner
    return e(n * c * Qbar, d) * chi.gauss * total / rho


def _round_integer(value: complex, what: str) -> int:
    nearest = round(value.real)
    if abs(value.imag) > 1e-9 * max(1.0, abs(value)) or abs(value.real - nearest) > 1e-9 * max(
        1.0, abs(value)
    ):
        raise NumericsError(f"{what} = {value} is not an integer; check the inputs")
    return int(nearest)


def _units(d: int) -> np.ndarray:
    c = np.arange(d)
    return c[np.gcd(c, d) == 1]


def ramanujan_sum(d: int, r: int) -> int:
    """c_d(r) = sum_{(c,d)=1} e_d(cr), rounded after a realness check."""
    if d < 1:
        raise ValueError("ramanujan_sum needs d >= 1")
    c = _units(d)
    return _round_integer(complex(np.sum(unit_circle(d)[(c * r) % d])), f"c_{d}({r})")


def ramanujan_sum_sterneck(d: int, r: int) -> int:
    """von Sterneck form mu(d/(d,r)) phi(d) / phi(d/(d,r))."""
    m = as_factored(d // math.gcd(d, r))
    return m.mu * as_factored(d).phi // m.phi


def twisted_ramanujan(d: int, r: int, chi: DirichletCharacter) -> complex:
    """c_d(r, chi) = sum_{(c,d)=1} chi(c) e_d(-cr) by direct summation."""
    c = _units(d)
    return complex(np.sum(chi(c) * unit_circle(d)[(-c * r) % d]))


def twisted_ramanujan_closed(d: int, r: int, chi: DirichletCharacter) -> complex:
    """Closed form of c_d(r, chi) for q | d."""
    q = chi.q
    if d % q:
        raise PreconditionError(f"closed form of c_d(r, chi) needs q | d (q={q}, d={d})")
    e_ = d // q
    total = 0j
    for n in as_factored(e_).divisors():
        if r % n:
            continue
        m = e_ // n
        total += as_factored(m).mu * chi(m) * chi.conj()(r // n) * n
    return chi.conj().gauss.conjugate() * total


def twisted_ramanujan_table(d: int, chi: DirichletCharacter) -> np.ndarray:
    """c_d(r, chi) for r = 0..d-1 via one FFT."""
    weights = np.zeros(d, dtype=complex)
    c = _units(d)
    weights[c] = chi(c)
    return np.fft.fft(weights)


def dirichlet_series_of_twisted_ramanujan(
    d: int, chi: DirichletCharacter, s: complex, r_max: int = 100_000
) -> dict[str, complex | float]:
    """Both sides of sum_r c_d(r, chi) r^-s = G-bar L(s, chi-bar)(q/d)^{s-1} sum_{n | d/q} ..."""
    from .numkernel import dirichlet_l

    q = chi.q
    if d % q:
        raise PreconditionError(f"Dirichlet series of c_d(r, chi) needs q | d (q={q}, d={d})")
    s = complex(s)
    if s.real <= 1:
        raise PreconditionError("Dirichlet series of c_d(r, chi) needs Re s > 1")
    table = twisted_ramanujan_table(d, chi)
    r = np.arange(1, r_max + 1)
    terms = table[r % d] * np.exp(-s * np.log(r))
    lhs = complex(math.fsum(terms.real), math.fsum(terms.imag))
    e_ = d // q
    finite = sum(
        as_factored(n).mu * chi(n) * n ** (s - 1) for n in as_factored(e_).divisors()
    )
    rhs = chi.conj().gauss.conjugate() * dirichlet_l(s, chi.conj()) * (q / d) ** (s - 1) * finite
    sigma_e = sum(as_factored(e_).divisors())
    tail = math.sqrt(q) * sigma_e * r_max ** (1 - s.real) / (s.real - 1)
    return {"lhs": lhs, "rhs": rhs, "tail_bound": tail}


def kloosterman(r: int, t: int, d: int) -> float:
    """S(r, t; d) = sum_{(c,d)=1} e_d(rc + t c-bar)."""
    if d < 1:
        raise ValueError("kloosterman needs d >= 1")
    if d == 1:
        return 1.0
    c = _units(d)
    cbar = np.array([pow(int(x), -1, d) for x in c])
    value = complex(np.sum(unit_circle(d)[(r * c + t * cbar) % d]))
    if abs(value.imag) > 1e-9 * max(1.0, abs(value)):
        raise NumericsError(f"Kloosterman sum S({r},{t};{d}) is not real")
    return value.real


def salie_chi(r: int, t: int, d: int, chi: DirichletCharacter) -> complex:
    """S_chi(r, t; d) = sum_{(c,d)=1} chi(c) e_d(cr + c-bar t), q | d."""
    if d % chi.q:
        raise PreconditionError(f"salie_chi needs q | d (q={chi.q}, d={d})")
    if d == 1:
        return 1 + 0j
    c = _units(d)
    cbar = np.array([pow(int(x), -1, d) for x in c])
    return complex(np.sum(chi(c) * unit_circle(d)[(r * c + t * cbar) % d]))


def kloosterman_bound(r: int, d: int, q: int = 1) -> float:
    return math.sqrt(q * math.gcd(r, d) * d) * as_factored(d).tau


def _class_of(part: int, q: int) -> int:
    g = math.gcd(part, q)
    if g == 1:
        return 1
    if g == q:
        return 2
    return 3


def classify_pij(d: int, h: int | FactoredInt, k: int | FactoredInt, q: int) -> tuple[int, int]:
    """(i, j) from (d_(h), q) and (d_(k), q): 1 if coprime, 2 if equal to q, 3 otherwise."""
    h, k = as_factored(h), as_factored(k)
    if math.gcd(h.n, k.n) != 1:
        raise PreconditionError(f"classify_pij needs (h, k) = 1, got h={h.n}, k={k.n}")
    return (_class_of(coprime_quotient(h.n, d), q), _class_of(coprime_quotient(k.n, d), q))


def _prime_class(vals: dict[int, int], shift: FactoredInt, qf: FactoredInt) -> int:
    exps = {p: min(max(vals[p] - shift.valuation(p), 0), v) for p, v in qf.factors}
    if all(x == 0 for x in exps.values()):
        return 1
    if all(exps[p] == v for p, v in qf.factors):
        return 2
    return 3


def _coprime_multiples(base: int, q: int, limit: int) -> list[int]:
    return [base * l for l in range(1, limit // base + 1) if math.gcd(l, q) == 1]


def _parametric_pij(i: int, j: int, h: FactoredInt, k: FactoredInt, q: int, limit: int) -> set[int]:
    qf = as_factored(q)
    hq, kq = q_split(h, q).q_part, q_split(k, q).q_part
    if (i, j) == (1, 1):
        return set(_coprime_multiples(1, q, limit))
    if (i, j) == (2, 2):
        base = q * hq * kq
        return set(range(base, limit + 1, base))
    if (i, j) in ((1, 2), (2, 1)):
        owner = hq if (i, j) == (1, 2) else kq
        if owner % q:
            return set()
        out: set[int] = set()
        for m in as_factored(owner // q).divisors():
            out.update(_coprime_multiples(q * m, q, limit))
        return out
    # classes involving 3: enumerate q-part valuation vectors prime by prime
    ranges = [range(int(math.log(limit, p)) + 2) for p in qf.primes]
    out = set()
    for vec in itertools.product(*ranges):
        vals = dict(zip(qf.primes, vec))
        if (_prime_class(vals, h, qf), _prime_class(vals, k, qf)) != (i, j):
            continue
        base = math.prod(p**x for p, x in vals.items())
        if base <= limit:
            out.update(_coprime_multiples(base, q, limit))
    return out


def enumerate_pij(
    i: int, j: int, h: int | FactoredInt, k: int | FactoredInt, q: int, limit: int
) -> list[int]:
    """All d <= limit in P_ij; brute classification must equal the parametrization."""
    h, k = as_factored(h), as_factored(k)
    if math.gcd(h.n, k.n) != 1:
        raise PreconditionError(f"enumerate_pij needs (h, k) = 1, got h={h.n}, k={k.n}")
    brute = [d for d in range(1, limit + 1) if classify_pij(d, h, k, q) == (i, j)]
    if q == 1:
        return brute
    parametric = _parametric_pij(i, j, h, k, q, limit)
    if set(brute) != parametric:
        raise NumericsError(
            f"P_{i}{j} generators disagree for q={q}, h={h.n}, k={k.n}: "
            f"{sorted(set(brute) ^ parametric)[:10]}"
        )
    return brute

