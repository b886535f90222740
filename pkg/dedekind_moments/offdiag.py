"""Off-diagonal arithmetical sums S_ij(h, k, r) and their Dirichlet series U_ij(s).

The brute routes sum c_d(r, psi) against the d-weights of each P_ij class; the
closed routes assemble U_ij from zeta and L values times the finite Euler
products of ``eulerprod``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .arith import as_factored, enumerate_pij, twisted_ramanujan_table
from .characters import DirichletCharacter
from .errors import PreconditionError, ensure_finite
from .eulerprod import c_factor, m_sum, q_factor
from .models import ShiftTuple, SumTruncation
from .numkernel import dirichlet_l, riemann_zeta

logger = logging.getLogger(__name__)

PAIRS = ((1, 1), (2, 2), (1, 2), (2, 1))
MIN_R_EXPONENT = 2.1
MIN_D_EXPONENT = 1.3


@dataclass(frozen=True)
class _Shape:
    """Prefactor, Ramanujan twist and d-weight of one S_ij."""

    prefactor: complex
    twist: DirichletCharacter | None
    weight: Callable[[int], complex]
    x: complex
    y: complex


def _check_pair(i: int, j: int) -> None:
    if (i, j) not in PAIRS:
        raise ValueError(f"(i, j) must be one of {PAIRS}, got {(i, j)}")


def _check_nonempty(i: int, j: int, h: int, k: int, q: int) -> None:
    if math.gcd(h, k) != 1:
        raise PreconditionError(f"S_ij needs (h, k) = 1, got h={h}, k={k}")
    if i == j:
        return
    if q == 1:
        raise PreconditionError("P_12 and P_21 need a nontrivial modulus")
    owner, name = (h, "h") if (i, j) == (1, 2) else (k, "k")
    if owner % q:
        raise PreconditionError(f"P_{i}{j} is empty unless q | {name} (q={q}, {name}={owner})")


def r_exponent(i: int, j: int, sh: ShiftTuple) -> complex:
    """a_i + b_j with a = (alpha, beta) and b = (gamma, delta)."""
    a, b, g, d = sh.as_tuple()
    return (a, b)[i - 1] + (g, d)[j - 1]


def _shape(i: int, j: int, h: int, k: int, chi: DirichletCharacter, sh: ShiftTuple) -> _Shape:
    a, b, g, d = sh.as_tuple()
    q = chi.q
    cb = chi.conj()

    def dh(n: int) -> int:
        return n // math.gcd(n, h)

    def dk(n: int) -> int:
        return n // math.gcd(n, k)

    if (i, j) == (1, 1):
        x, y = 1 - a + b, 1 - g + d
        pref = dirichlet_l(x, chi) * dirichlet_l(y, cb)
        return _Shape(pref, None, lambda n: chi(dh(n)) * cb(dk(n)) * dh(n) ** -x * dk(n) ** -y, x, y)
    if (i, j) == (1, 2):
        x, y = 1 - a + b, 1 + g - d
        pref = chi(-1) * cb.gauss * dirichlet_l(x, chi) * dirichlet_l(y, chi) / q ** (d - g)
        return _Shape(
            pref, chi, lambda n: chi(dh(n)) * chi(k // math.gcd(k, n)) * dh(n) ** -x * dk(n) ** -y, x, y
        )
    if (i, j) == (2, 1):
        x, y = 1 + a - b, 1 - g + d
        pref = chi.gauss * dirichlet_l(x, cb) * dirichlet_l(y, cb) / q ** (b - a)
        return _Shape(
            pref, cb, lambda n: cb(h // math.gcd(h, n)) * cb(dk(n)) * dh(n) ** -x * dk(n) ** -y, x, y
        )
    x, y = 1 + a - b, 1 + g - d
    pref = dirichlet_l(x, cb) * dirichlet_l(y, chi) / q ** (-1 + b - a + d - g)
    # q | d on P_22, so c_d(r, |chi|^2) is the plain Ramanujan sum
    return _Shape(
        pref,
        None,
        lambda n: cb(h // math.gcd(h, n)) * chi(k // math.gcd(k, n)) * dh(n) ** -x * dk(n) ** -y,
        x,
        y,
    )


def ramanujan_table(d: int, twist: DirichletCharacter | None) -> np.ndarray:
    """c_d(r, psi) for r = 0..d-1; ``twist=None`` gives the plain c_d(r)."""
    if twist is not None:
        return twisted_ramanujan_table(d, twist)
    return np.fft.fft((np.gcd(np.arange(d), d) == 1).astype(complex))


def _divisor_counts(limit: int) -> np.ndarray:
    tau = np.zeros(limit + 1, dtype=np.int64)
    for m in range(1, limit + 1):
        tau[m::m] += 1
    return tau


def _d_tail(shape: _Shape, h: int, k: int, q: int, d_max: int, r_mass: float) -> float:
    """sum_{d > d_max} |w(d)| (sum over r), using d_(h) >= d/h and d_(k) >= d/k."""
    sigma = (shape.x + shape.y).real
    if sigma <= MIN_D_EXPONENT:
        raise PreconditionError(f"d-sum exponent {sigma:.3f} is not above {MIN_D_EXPONENT}")
    c = math.sqrt(q) if shape.twist is not None else 1.0
    return (
        abs(shape.prefactor)
        * c
        * r_mass
        * h ** shape.x.real
        * k ** shape.y.real
        * d_max ** (1 - sigma)
        / (sigma - 1)
    )


def s_ij_sum(
    i: int,
    j: int,
    h: int,
    k: int,
    r: int,
    chi: DirichletCharacter,
    sh: ShiftTuple,
    trunc: SumTruncation | None = None,
) -> tuple[complex, SumTruncation]:
    """S_ij(h, k, r) summed over d <= d_max in P_ij, with a certified d-tail."""
    _check_pair(i, j)
    _check_nonempty(i, j, h, k, chi.q)
    if r == 0:
        raise PreconditionError("S_ij is only used at r != 0")
    trunc = trunc or SumTruncation()
    shape = _shape(i, j, h, k, chi, sh)
    ds = enumerate_pij(i, j, h, k, chi.q, trunc.d_max)
    terms = [ramanujan_table(d, shape.twist)[r % d] * shape.weight(d) for d in ds]
    total = complex(math.fsum(z.real for z in terms), math.fsum(z.imag for z in terms))
    sigma_r = float(sum(as_factored(abs(r)).divisors()))
    tail = _d_tail(shape, h, k, chi.q, trunc.d_max, sigma_r)
    value = ensure_finite(shape.prefactor * total, f"S_{i}{j}")
    return value, trunc.model_copy(update={"tail_bound": tail})


def u_ij_brute(
    i: int,
    j: int,
    h: int,
    k: int,
    chi: DirichletCharacter,
    sh: ShiftTuple,
    s: complex,
    trunc: SumTruncation | None = None,
) -> tuple[complex, SumTruncation]:
    """sum_{r <= r_max} sum_{d <= d_max} with r-tail and d-tail bounds.

    The r-sum is grouped by residue of r mod d, so each d costs one pass over
    r^{-e} and one FFT of length d.
    """
    _check_pair(i, j)
    _check_nonempty(i, j, h, k, chi.q)
    trunc = trunc or SumTruncation()
    s = complex(s)
    e = r_exponent(i, j, sh) + 2 * s
    if e.real <= MIN_R_EXPONENT:
        raise PreconditionError(f"r-sum exponent {e.real:.3f} is not above {MIN_R_EXPONENT}")
    shape = _shape(i, j, h, k, chi, sh)
    R, D = trunc.r_max, trunc.d_max

    rpow = np.exp(-e * np.log(np.arange(1, R + 1, dtype=float)))
    tau = _divisor_counts(D)
    ds = enumerate_pij(i, j, h, k, chi.q, D)
    inner = []
    weight_mass = 0.0
    for d in ds:
        rows = -(-(R + 1) // d)
        buf = np.zeros(rows * d, dtype=complex)
        buf[1 : R + 1] = rpow
        by_residue = buf.reshape(rows, d).sum(axis=0)
        w = shape.weight(d)
        inner.append(w * complex(by_residue @ ramanujan_table(d, shape.twist)))
        weight_mass += abs(w) * tau[d]
    total = complex(math.fsum(z.real for z in inner), math.fsum(z.imag for z in inner))

    er = e.real
    c = math.sqrt(chi.q) if shape.twist is not None else 1.0
    zeta_e = riemann_zeta(er).real
    r_tail = abs(shape.prefactor) * c * weight_mass * R ** (1 - er) * max(2 ** (er - 1) / (er - 1), zeta_e)
    d_tail = _d_tail(shape, h, k, chi.q, D, zeta_e * riemann_zeta(er - 1).real)
    logger.debug("U_%d%d brute: %d d-values, r_tail=%.2e d_tail=%.2e", i, j, len(ds), r_tail, d_tail)
    value = ensure_finite(shape.prefactor * total, f"U_{i}{j} brute")
    return value, trunc.model_copy(update={"tail_bound": r_tail + d_tail})


def u_ij_factors(
    i: int,
    j: int,
    h: int,
    k: int,
    chi: DirichletCharacter,
    sh: ShiftTuple,
    s: complex,
) -> dict[str, complex]:
    """The named factors whose product is U_ij(s); a mismatch can be traced to one of them."""
    _check_pair(i, j)
    _check_nonempty(i, j, h, k, chi.q)
    s = complex(s)
    a, b, g, d = sh.as_tuple()
    q = chi.q
    cb = chi.conj()
    if (i, j) == (1, 1):
        return {
            "L_prefactor": dirichlet_l(1 - a + b, chi) * dirichlet_l(1 - g + d, cb),
            "zeta_numerator": riemann_zeta(a + g + 2 * s) * riemann_zeta(1 + b + d + 2 * s),
            "zeta_denominator": 1 / riemann_zeta(2 - a + b - g + d),
            "Q11": q_factor("Q11", sh, q, s),
            "C11": c_factor("C11", sh, h, k, chi, s),
        }
    if (i, j) == (2, 2):
        return {
            "L_prefactor": dirichlet_l(1 + a - b, cb) * dirichlet_l(1 + g - d, chi),
            "q_power": q ** (-b - d - 2 * s),
            "zeta_numerator": riemann_zeta(b + d + 2 * s) * riemann_zeta(1 + a + g + 2 * s),
            "zeta_denominator": 1 / riemann_zeta(2 + a - b + g - d),
            "Q22": q_factor("Q22", sh, q, s),
            "C22": c_factor("C22", sh, h, k, chi, s),
        }
    if (i, j) == (1, 2):
        return {
            "chi(-1)": chi(-1),
            "L_prefactor": dirichlet_l(1 - a + b, chi) * dirichlet_l(1 + g - d, chi),
            "chi(k)": chi(k),
            "L_numerator": dirichlet_l(a + d + 2 * s, cb) * dirichlet_l(1 + b + g + 2 * s, chi),
            "L_denominator": 1 / dirichlet_l(2 - a + b + g - d, chi.square()),
            "M": m_sum(a, g, h, q, s),
            "C12": c_factor("C12", sh, h, k, chi, s),
        }
    return {
        "L_prefactor": dirichlet_l(1 + a - b, cb) * dirichlet_l(1 - g + d, cb),
        "chi-bar(h)": cb(h),
        "L_numerator": dirichlet_l(b + g + 2 * s, chi) * dirichlet_l(1 + a + d + 2 * s, cb),
        "L_denominator": 1 / dirichlet_l(2 + a - b - g + d, cb.square()),
        "M": m_sum(a, g, k, q, s),
        "C21": c_factor("C21", sh, h, k, chi, s),
    }


def u_ij_closed(
    i: int,
    j: int,
    h: int,
    k: int,
    chi: DirichletCharacter,
    sh: ShiftTuple,
    s: complex,
) -> complex:
    factors = u_ij_factors(i, j, h, k, chi, sh, s)
    return ensure_finite(math.prod(factors.values()), f"U_{i}{j} closed form")


def u_21_by_swap(h: int, k: int, chi: DirichletCharacter, sh: ShiftTuple, s: complex) -> complex:
    """U_21 from the U_12 assembly under h <-> k, chi <-> chi-bar, (alpha, beta) <-> (gamma, delta).

    S_21 carries no chi(-1) while S_12 does, so the swapped U_12 differs from
    U_21 by exactly chi(-1); that factor is divided back out here.
    """
    swapped = u_ij_closed(1, 2, k, h, chi.conj(), sh.permuted("g,d,a,b"), s)
    return chi(-1) * swapped


def displayed_u12(h: int, k: int, chi: DirichletCharacter, sh: ShiftTuple, s: complex) -> complex:
    """U_12 as assembled without the chi(-1) coming from c_d(r, chi) against G(chi-bar)."""
    factors = u_ij_factors(1, 2, h, k, chi, sh, s)
    factors.pop("chi(-1)")
    return math.prod(factors.values())
