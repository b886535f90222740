"""Approximate functional equation for zeta(s)L(s,chi) times its reflection.

The central product zeta L zeta L at 1/2 + shifts +- it is written as two
smoothed double sums of conductor length, weighted by V(pi^2 mn / q) and
coupled by the Gamma-ratio factor X.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .arith import dirichlet_convolve, shifted_divisor_table
from .characters import DirichletCharacter
from .errors import PreconditionError, TruncationError
from .models import AfeTerms, KernelSpec, QuadratureSpec, ShiftTuple
from .numkernel import (
    completed_pair,
    dirichlet_l,
    log_gamma,
    riemann_zeta,
    vertical_line_integral,
    vertical_line_nodes,
)

logger = logging.getLogger(__name__)

# AFE identity checks use G(s) = exp(s^2 / 4); see default_mn_max.
AFE_KERNEL = KernelSpec(kind="gaussian", scale=4.0)
AFE_TOL = 1e-6
_V_CHUNK = 1 << 14


def kernel_value(s, kernel: KernelSpec):
    s = np.asarray(s, dtype=complex)
    value = s * s / kernel.scale
    if kernel.kind == "quartic-damped":
        value = value - s**4 / kernel.quartic
    return np.exp(value)


def contour_height(kernel: KernelSpec) -> float:
    """Height beyond which |G| on the contour is below 1e-18."""
    return math.sqrt(kernel.scale * (42.0 + kernel.sigma**2))


def _gamma_args(s, t: float, sh: ShiftTuple, parity: int):
    a, b, g, d = sh.as_tuple()
    s = np.asarray(s, dtype=complex)
    return (
        (0.5 + a + s + 1j * t) / 2,
        (0.5 + b + s + 1j * t + parity) / 2,
        (0.5 + g + s - 1j * t) / 2,
        (0.5 + d + s - 1j * t + parity) / 2,
    )


def _log_gamma_product(s, t: float, sh: ShiftTuple, parity: int):
    return sum(log_gamma(arg) for arg in _gamma_args(s, t, sh, parity))


def g_factor(s, t: float, sh: ShiftTuple, a_parity: int):
    """g(s, t): product of the four Gamma ratios Gamma(. + s/2) / Gamma(.)."""
    scalar = np.ndim(s) == 0
    value = np.exp(_log_gamma_product(s, t, sh, a_parity) - _log_gamma_product(0, t, sh, a_parity))
    return complex(value) if scalar else value


def gamma_ratio_x(t: float, sh: ShiftTuple, a_parity: int) -> complex:
    """pi^{alpha+beta+gamma+delta} times the Gamma quotient of X, without the q power."""
    lg = _log_gamma_product(0, t, sh.swap(), a_parity) - _log_gamma_product(0, t, sh, a_parity)
    return complex(np.exp(lg + sh.total * math.log(math.pi)))


def x_factor(t: float, sh: ShiftTuple, chi: DirichletCharacter) -> complex:
    if t <= 0:
        raise PreconditionError("x_factor needs t > 0")
    _, b, _, d = sh.as_tuple()
    return chi.q ** (-b - d) * gamma_ratio_x(t, sh, chi.parity)


def x_factor_stirling(t: float, sh: ShiftTuple, chi: DirichletCharacter) -> complex:
    """q^{-beta-delta} (t/2pi)^{-alpha-beta-gamma-delta}."""
    _, b, _, d = sh.as_tuple()
    return chi.q ** (-b - d) * (t / (2 * math.pi)) ** (-sh.total)


def v_weight(
    x: float,
    t: float,
    sh: ShiftTuple,
    a_parity: int,
    kernel: KernelSpec | None = None,
    spec: QuadratureSpec | None = None,
) -> complex:
    """V(x) = (1/2 pi i) int_(sigma) G(s)/s g(s,t) x^{-s} ds by adaptive quadrature."""
    if x <= 0:
        raise PreconditionError("v_weight needs x > 0")
    kernel = kernel or KernelSpec()
    spec = spec or QuadratureSpec()
    spec = spec.model_copy(update={"truncation_height": contour_height(kernel)})
    logx = math.log(x)

    def integrand(s: complex) -> complex:
        return complex(kernel_value(s, kernel)) / s * g_factor(s, t, sh, a_parity) * complex(np.exp(-s * logx))

    return vertical_line_integral(integrand, kernel.sigma, spec, decay_scale=kernel.scale)


def v_weight_many(x: np.ndarray, t: float, sh: ShiftTuple, a_parity: int, kernel: KernelSpec) -> np.ndarray:
    """V on a batch of x from one Gauss-Legendre contour rule."""
    nodes, weights = vertical_line_nodes(kernel.sigma, contour_height(kernel), kernel.nodes)
    base = kernel_value(nodes, kernel) / nodes * g_factor(nodes, t, sh, a_parity) * weights
    logx = np.log(np.asarray(x, dtype=float))
    out = np.empty(logx.shape, dtype=complex)
    for start in range(0, logx.size, _V_CHUNK):
        block = logx[start : start + _V_CHUNK]
        out[start : start + _V_CHUNK] = np.exp(-np.outer(block, nodes)) @ base
    return out


def default_mn_max(t: float, q: int, kernel: KernelSpec = AFE_KERNEL, eps: float = 1e-8) -> int:
    """Product length where the V envelope exp(-tau (log y)^2 / 4) drops below eps * 1e-3.

    Here y = x / (t/2)^2 and x = pi^2 mn / q.
    """
    y = math.exp(math.sqrt(4 * math.log(1e3 / eps) / kernel.scale))
    return int(math.ceil(q * (t / 2) ** 2 * y / math.pi**2))


def _product_coefficients(first: tuple, second: tuple, chi: DirichletCharacter, t: float, N: int) -> np.ndarray:
    """c(P) = sum_{nm=P} f_first(n, chi) n^{-it} f_second(m, chi-bar) m^{it}."""
    n = np.arange(N + 1, dtype=float)
    n[0] = 1.0
    phase = np.exp(-1j * t * np.log(n))
    left = shifted_divisor_table(*first, chi, N) * phase
    right = shifted_divisor_table(*second, chi.conj(), N) * phase.conj()
    return dirichlet_convolve(left, right, N)


def _tail_estimate(N: int, t: float, sh: ShiftTuple, chi: DirichletCharacter, kernel: KernelSpec) -> float:
    grid = N * 2.0 ** (np.arange(40) / 2)
    x = math.pi**2 * grid / chi.q
    envelope = np.abs(v_weight_many(x, t, sh, chi.parity, kernel)) + np.abs(
        v_weight_many(x, t, sh.swap(), chi.parity, kernel)
    )
    mass = 2 * np.sqrt(grid) * (2**0.25 - 1) * np.log(grid) ** 3
    return float(np.sum(envelope * mass))


def central_product(t: float, sh: ShiftTuple, chi: DirichletCharacter) -> complex:
    """zeta(1/2+alpha+it) L(1/2+beta+it, chi) zeta(1/2+gamma-it) L(1/2+delta-it, chi-bar)."""
    a, b, g, d = sh.as_tuple()
    return (
        riemann_zeta(0.5 + a + 1j * t)
        * dirichlet_l(0.5 + b + 1j * t, chi)
        * riemann_zeta(0.5 + g - 1j * t)
        * dirichlet_l(0.5 + d - 1j * t, chi.conj())
    )


def afe_terms(
    t: float,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    mn_max: int | None = None,
    kernel: KernelSpec = AFE_KERNEL,
) -> AfeTerms:
    """Evaluate both sides of the AFE with the phase (n/m)^{-it}."""
    if not chi.primitive:
        raise PreconditionError("the approximate functional equation needs a primitive character")
    N = mn_max or default_mn_max(t, chi.q, kernel)
    a, b, g, d = sh.as_tuple()
    P = np.arange(1, N + 1, dtype=float)
    x = math.pi**2 * P / chi.q
    weight = P**-0.5

    c1 = _product_coefficients((a, b), (g, d), chi, t, N)[1:]
    c2 = _product_coefficients((-g, -d), (-a, -b), chi, t, N)[1:]
    first = c1 * weight * v_weight_many(x, t, sh, chi.parity, kernel)
    second = c2 * weight * v_weight_many(x, t, sh.swap(), chi.parity, kernel)
    first_sum = complex(math.fsum(first.real), math.fsum(first.imag))
    second_sum = complex(math.fsum(second.real), math.fsum(second.imag))

    X = x_factor(t, sh, chi)
    lhs = central_product(t, sh, chi)
    rhs = first_sum + X * second_sum
    tail = _tail_estimate(N, t, sh, chi, kernel)
    logger.debug("afe t=%.1f q=%d N=%d tail=%.2e", t, chi.q, N, tail)
    return AfeTerms(
        t=t,
        lhs=lhs,
        first_sum=first_sum,
        second_sum=second_sum,
        x_factor=X,
        rhs=rhs,
        residual=abs(lhs - rhs),
        mn_max=N,
        tail_bound=tail,
    )


def afe_residual(
    t: float,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    mn_max: int | None = None,
    kernel: KernelSpec = AFE_KERNEL,
    tol: float = AFE_TOL,
) -> float:
    """|LHS - RHS| of the AFE; raises TruncationError when the tail estimate exceeds tol."""
    terms = afe_terms(t, sh, chi, mn_max, kernel)
    if terms.tail_bound > tol:
        raise TruncationError(
            f"mn <= {terms.mn_max} leaves an estimated tail {terms.tail_bound:.2e} above {tol:.0e}"
        )
    return terms.residual


def _xi_product(s: complex, t: float, sh: ShiftTuple, chi: DirichletCharacter) -> complex:
    a, b, g, d = sh.as_tuple()
    lam1, _ = completed_pair(0.5 + a + s + 1j * t, chi)
    _, xi1 = completed_pair(0.5 + b + s + 1j * t, chi)
    lam2, _ = completed_pair(0.5 + g + s - 1j * t, chi)
    _, xi2 = completed_pair(0.5 + d + s - 1j * t, chi.conj())
    return lam1 * xi1 * lam2 * xi2


def xi_symmetry_residual(s: complex, t: float, sh: ShiftTuple, chi: DirichletCharacter) -> float:
    """Relative |Xi_sh(-s) - Xi_swap(s)|; Xi is exponentially small in t, so the scale is divided out."""
    if not chi.primitive:
        raise PreconditionError("Xi symmetry needs a primitive character")
    left = _xi_product(-s, t, sh, chi)
    right = _xi_product(s, t, sh.swap(), chi)
    return abs(left - right) / max(abs(right), 1e-300)
