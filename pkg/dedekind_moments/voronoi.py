"""Twisted divisor series E(s, c/d, chi), Voronoi summation and the delta symbol.

E and its dual E~ are continued to the whole plane by splitting both divisor
variables into residue classes, which turns each series into a finite
combination of products of two Hurwitz zeta values.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .arith import ramanujan_sum, shifted_divisor_table, twisted_sigma, unit_circle
from .characters import DirichletCharacter
from .errors import DomainError, PreconditionError
from .models import VoronoiTerms
from .numkernel import adaptive_integral, bessel, dirichlet_l, hurwitz_zeta_many, log_gamma, panel_nodes, smooth_step

logger = logging.getLogger(__name__)

Shift2 = tuple[complex, complex]
ThetaConvention = Literal["alpha", "beta"]

# Gaussian windows are cut at this many widths, where the window is below 1e-21.
WINDOW_CUT = 10.0
# below this value at x = 1 the window counts as supported in [1, infinity)
WINDOW_FLOOR = 1e-16
_DUAL_MARGIN = 9.0


@dataclass(frozen=True)
class BumpFunction:
    """A smooth, nonnegative test function of (numerically) compact support."""

    center: float
    width: float
    kind: Literal["gaussian-window", "smoothed-indicator"] = "gaussian-window"
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ValueError("bump width must be positive")

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == "gaussian-window":
            lo = self.center - WINDOW_CUT * self.width
            if lo < 1 and math.exp(-0.5 * ((1 - self.center) / self.width) ** 2) < WINDOW_FLOOR:
                lo = 1.0
            return (lo, self.center + WINDOW_CUT * self.width)
        return (self.center - self.width, self.center + self.width)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        if self.kind == "gaussian-window":
            y = (x - self.center) / self.width
            out = np.exp(-0.5 * y * y)
        else:
            ramp = self.width / 2
            out = smooth_step((x - lo) / ramp) * smooth_step((hi - x) / ramp)
        out = np.where((x > lo) & (x < hi), out, 0.0) * self.scale
        return float(out) if out.ndim == 0 else out

    def normalized_on_integers(self) -> "BumpFunction":
        """Rescale so that the values at the integers sum to 1."""
        lo, hi = self.support
        n = np.arange(max(1, math.floor(lo)), math.ceil(hi) + 1)
        total = float(np.sum(BumpFunction(self.center, self.width, self.kind)(n)))
        if total <= 0:
            raise PreconditionError("bump has no mass on the integers")
        return BumpFunction(self.center, self.width, self.kind, scale=1.0 / total)


def _rho(d: int, chi: DirichletCharacter) -> int:
    return math.gcd(d, chi.q)


def _check_cd(c: int, d: int) -> None:
    if d < 1 or math.gcd(c, d) != 1:
        raise PreconditionError(f"need d >= 1 and (c, d) = 1, got c={c}, d={d}")


def _inverse(c: int, d: int) -> int:
    return pow(c, -1, d) if d > 1 else 0


# ---------------------------------------------------------------------------
# E and E~
# ---------------------------------------------------------------------------


def e_series(sh2: Shift2, s: complex, c: int, d: int, chi: DirichletCharacter, N: int = 100_000) -> tuple[complex, float]:
    """Partial sum of E up to N and a divisor-bound estimate of the tail."""
    _check_cd(c, d)
    s = complex(s)
    alpha, beta = sh2
    sigma = s.real - max(abs(complex(alpha).real), abs(complex(beta).real))
    if s.real <= 1.05 or sigma <= 1.0:
        raise DomainError("e_series needs Re s > 1.05 and absolute convergence")
    f = shifted_divisor_table(alpha, beta, chi, N)[1:]
    n = np.arange(1, N + 1)
    terms = f * unit_circle(d)[(c * n) % d] * np.exp(-s * np.log(n))
    value = complex(math.fsum(terms.real), math.fsum(terms.imag))
    tail = (math.log(N) + 2) * N ** (1 - sigma) / (sigma - 1)
    return value, tail


def _hurwitz_classes(s: complex, shift: complex, modulus: int) -> np.ndarray:
    """modulus^{-(s+shift)} zeta(s+shift, a/modulus) for a = 1..modulus."""
    z = complex(s + shift)
    values = np.array([complex(hurwitz_zeta_many(z, a / modulus)) for a in range(1, modulus + 1)])
    return values * modulus ** (-z)


def e_continued(sh2: Shift2, s: complex, c: int, d: int, chi: DirichletCharacter) -> complex:
    """E_{alpha,beta}(s, c/d, chi) for any s off the poles."""
    _check_cd(c, d)
    alpha, beta = sh2
    L = math.lcm(d, chi.q)
    left = _hurwitz_classes(s, alpha, d)
    right = _hurwitz_classes(s, beta, L)
    a1 = np.arange(1, d + 1)[:, None]
    a2 = np.arange(1, L + 1)[None, :]
    weight = unit_circle(d)[(c * a1 * a2) % d] * chi(np.arange(1, L + 1))[None, :]
    return complex(left @ weight @ right)


def e_tilde_continued(sh2: Shift2, s: complex, c: int, d: int, chi: DirichletCharacter) -> complex:
    """E~_{alpha,beta}(s, c/d, chi) = sum_n sigma(n, c/d, chi) n^-s, continued."""
    _check_cd(c, d)
    alpha, beta = sh2
    d1 = d * chi.q // _rho(d, chi)
    left = _hurwitz_classes(s, alpha, d)
    right = _hurwitz_classes(s, beta, d1)
    table = unit_circle(d1)
    weight = np.zeros((d, d1), dtype=complex)
    a2 = np.arange(1, d1 + 1)
    for a1 in range(1, d + 1):
        b = (c * a1) % d + d * np.arange(d1 // d)
        b = np.where(b == 0, d1, b)
        weight[a1 - 1] = (chi(b)[:, None] * table[(b[:, None] * a2[None, :]) % d1]).sum(axis=0)
    return complex(left @ weight @ right)


def e_residue(sh2: Shift2, c: int, d: int, chi: DirichletCharacter) -> list[tuple[complex, complex]]:
    """(location, residue) pairs of E; empty when 1 < (d, q) < q."""
    _check_cd(c, d)
    alpha, beta = sh2
    q = chi.q
    rho = _rho(d, chi)
    poles = []
    if rho == 1:
        value = chi(d) * dirichlet_l(1 - alpha + beta, chi) / d ** (1 - alpha + beta)
        poles.append((1 - alpha, value))
    if rho == q:
        value = (
            chi(c).conjugate()
            * chi.gauss
            * dirichlet_l(1 + alpha - beta, chi.conj())
            / (q ** (beta - alpha) * d ** (1 + alpha - beta))
        )
        poles.append((1 - beta, value))
    return poles


def theta(s: complex, sh2: Shift2, chi: DirichletCharacter) -> complex:
    """theta(s) = e^{pi i (s + (alpha+beta)/2)} + chi(-1) e^{-pi i (s + (alpha+beta)/2)}."""
    phase = math.pi * 1j * (s + (sh2[0] + sh2[1]) / 2)
    return cmath.exp(phase) + (-1) ** chi.parity * cmath.exp(-phase)


def h_factor(sh2: Shift2, s: complex, d: int, chi: DirichletCharacter) -> complex:
    alpha, beta = sh2
    rho = _rho(d, chi)
    log_value = (
        (2 * s - 2 + alpha + beta) * math.log(2 * math.pi)
        - (2 * s - 1 + alpha + beta) * math.log(d)
        + (s + beta) * math.log(rho / chi.q)
        + log_gamma(1 - s - alpha)
        + log_gamma(1 - s - beta)
    )
    return cmath.exp(log_value)


def functional_e_residual(
    sh2: Shift2,
    s: complex,
    c: int,
    d: int,
    chi: DirichletCharacter,
    theta_convention: ThetaConvention = "alpha",
) -> float:
    """Relative |E(s) - H(s)[theta E~(1-s, c'/d) - theta(s) E~(1-s, -c'/d)]|, c' = c^-1 mod d.

    ``theta_convention`` picks the constant theta(-alpha) or theta(-beta).
    """
    _check_cd(c, d)
    if not chi.primitive:
        raise PreconditionError("the functional equation of E needs a primitive character")
    alpha, beta = sh2
    cbar = _inverse(c, d)
    dual = (-alpha, -beta)
    const = theta(-alpha if theta_convention == "alpha" else -beta, sh2, chi)
    lhs = e_continued(sh2, s, c, d, chi)
    rhs = h_factor(sh2, s, d, chi) * (
        const * e_tilde_continued(dual, 1 - s, cbar, d, chi)
        - theta(s, sh2, chi) * e_tilde_continued(dual, 1 - s, -cbar, d, chi)
    )
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)


# ---------------------------------------------------------------------------
# Voronoi summation
# ---------------------------------------------------------------------------


def _window_nodes(g: BumpFunction, panels: int = 64, order: int = 24):
    lo, hi = g.support
    lo = max(lo, 1e-9)
    x, w = panel_nodes(lo, hi, panels, order)
    return x, w * g(x)


def dual_length(g: BumpFunction, d: int, chi: DirichletCharacter) -> int:
    """Dual terms past (9d / (2 pi W))^2 q x_max / rho are below the window's Fourier decay."""
    rho = _rho(d, chi)
    x_max = g.support[1]
    return int(math.ceil((_DUAL_MARGIN * d / (2 * math.pi * g.width)) ** 2 * chi.q * x_max / rho)) + 1


def _adaptive_transform(
    g: BumpFunction, sh2: Shift2, d: int, chi: DirichletCharacter, y: float, kind: str, nu: complex
) -> complex:
    rho = _rho(d, chi)
    shift = (sh2[0] + sh2[1]) / 2
    lo, hi = g.support

    def integrand(x: float) -> complex:
        arg = 4 * math.pi * math.sqrt(rho * x * y / chi.q) / d
        return g(x) * cmath.exp(-shift * math.log(x * y)) * bessel(kind, nu, arg, chi.parity)

    return adaptive_integral(integrand, max(lo, 1e-9), hi, scale=g.width)


def dual_transforms(
    g: BumpFunction,
    sh2: Shift2,
    d: int,
    chi: DirichletCharacter,
    n: np.ndarray,
    swap_kernels: bool = False,
    adaptive: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """g+(n) and g-(n) with the K and B Bessel kernels (exchanged if ``swap_kernels``).

    The default composite Gauss-Legendre rule is fixed; ``adaptive`` integrates
    each transform with adaptive_integral on pieces of one window width instead.
    """
    alpha, beta = sh2
    rho = _rho(d, chi)
    x, w = _window_nodes(g)
    pre = (rho / chi.q) ** (1 - (alpha - beta) / 2) / d
    plus_coeff = 2 * theta(-alpha, sh2, chi) * pre
    minus_coeff = -2 * math.pi * pre
    plus = np.empty(n.shape, dtype=complex)
    minus = np.empty(n.shape, dtype=complex)
    plus_kind, minus_kind = ("B", "K") if swap_kernels else ("K", "B")
    nu_plus = beta - alpha if plus_kind == "K" else alpha - beta
    nu_minus = alpha - beta if minus_kind == "B" else beta - alpha
    for i, y in enumerate(n):
        if adaptive:
            plus[i] = plus_coeff * _adaptive_transform(g, sh2, d, chi, float(y), plus_kind, nu_plus)
            minus[i] = minus_coeff * _adaptive_transform(g, sh2, d, chi, float(y), minus_kind, nu_minus)
            continue
        arg = 4 * math.pi * np.sqrt(rho * x * y / chi.q) / d
        power = np.exp(-(alpha + beta) / 2 * np.log(x * y))
        plus[i] = plus_coeff * np.sum(w * power * bessel(plus_kind, nu_plus, arg, chi.parity))
        minus[i] = minus_coeff * np.sum(w * power * bessel(minus_kind, nu_minus, arg, chi.parity))
    return plus, minus


def voronoi_terms(
    g: BumpFunction,
    sh2: Shift2,
    c: int,
    d: int,
    chi: DirichletCharacter,
    *,
    drop_residue: bool = False,
    swap_kernels: bool = False,
    n_dual: int | None = None,
) -> VoronoiTerms:
    """Both sides of sum f(n) e_d(cn) g(n) = residue term + dual sums."""
    _check_cd(c, d)
    alpha, beta = sh2
    lo, hi = g.support
    if lo < 1:
        raise PreconditionError("the window must live in [1, infinity)")

    top = int(math.floor(hi))
    f = shifted_divisor_table(alpha, beta, chi, top)
    n = np.arange(1, top + 1)
    lhs_terms = f[1:] * unit_circle(d)[(c * n) % d] * g(n)
    lhs = complex(math.fsum(lhs_terms.real), math.fsum(lhs_terms.imag))

    x, w = _window_nodes(g)
    residue_term = 0j
    if not drop_residue:
        for z, value in e_residue(sh2, c, d, chi):
            residue_term += value * complex(np.sum(w * np.exp((z - 1) * np.log(x))))

    N = n_dual or dual_length(g, d, chi)
    dual_n = np.arange(1, N + 1)
    g_plus, g_minus = dual_transforms(g, sh2, d, chi, dual_n, swap_kernels=swap_kernels)
    cbar = _inverse(c, d)
    sig_plus = np.array([twisted_sigma(-alpha, -beta, int(m), cbar, d, chi) for m in dual_n])
    sig_minus = np.array([twisted_sigma(-alpha, -beta, int(m), -cbar, d, chi) for m in dual_n])
    dual_plus = complex(np.sum(sig_plus * g_plus))
    dual_minus = complex(np.sum(sig_minus * g_minus))

    rhs = residue_term + dual_plus + dual_minus
    logger.debug("voronoi q=%d d=%d c=%d N=%d residual=%.2e", chi.q, d, c, N, abs(lhs - rhs))
    return VoronoiTerms(
        lhs=lhs,
        residue_term=residue_term,
        dual_plus=dual_plus,
        dual_minus=dual_minus,
        rhs=rhs,
        residual=abs(lhs - rhs),
        dual_length=N,
        details={"rho": _rho(d, chi), "drop_residue": drop_residue, "swap_kernels": swap_kernels},
    )


def voronoi_residual(g: BumpFunction, sh2: Shift2, c: int, d: int, chi: DirichletCharacter, **mutations) -> float:
    return voronoi_terms(g, sh2, c, d, chi, **mutations).residual


# ---------------------------------------------------------------------------
# delta symbol
# ---------------------------------------------------------------------------


def delta_weight(Omega: float) -> BumpFunction:
    """omega: a smoothed indicator of [Omega, 2 Omega] with unit mass on the integers."""
    return BumpFunction(1.5 * Omega, 0.5 * Omega, "smoothed-indicator").normalized_on_integers()


def delta_coefficient(d: int, u: int, omega: BumpFunction) -> float:
    """Delta_d(u) = sum_m (dm)^-1 (omega(dm) - omega(|u| / dm))."""
    top = omega.support[1]
    m_max = int(max(top / d, abs(u) / (d * omega.support[0]) if u else 0)) + 1
    dm = d * np.arange(1, m_max + 1, dtype=float)
    return float(np.sum((omega(dm) - omega(abs(u) / dm)) / dm))


def delta_symbol_residual(n: int, Omega: float, omega: BumpFunction | None = None, d_max: int | None = None) -> float:
    """|delta(n) - sum_{d <= d_max} Delta_d(n) c_d(n)|."""
    omega = omega or delta_weight(Omega)
    d_max = d_max or int(math.ceil(3 * Omega))
    total = math.fsum(delta_coefficient(d, n, omega) * ramanujan_sum(d, n) for d in range(1, d_max + 1))
    return abs((1.0 if n == 0 else 0.0) - total)


def delta_vanishes(u: int, d: int, Omega: float, omega: BumpFunction | None = None) -> bool:
    """Whether Delta_d(u) is exactly zero (expected for |u| <= Omega^2 and d >= 2 Omega)."""
    omega = omega or delta_weight(Omega)
    return delta_coefficient(d, u, omega) == 0.0
