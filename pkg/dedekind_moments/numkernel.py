"""Complex special functions and quadrature engines.

Zeta and Hurwitz zeta values come from an Euler-Maclaurin continuation whose
start shift N satisfies |s + N| > 1.3 |Im s| + 30, with 12 Bernoulli
corrections. Everything is vectorised over numpy arrays of arguments so that
the quadrature-heavy callers (moment oracle, AFE sums) can evaluate whole node
batches at once.
"""

from __future__ import annotations

import cmath
import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING, Callable, Literal

import mpmath
import numpy as np
from scipy import integrate, special

from .errors import DomainError, NonConvergenceError, NumericsError, PoleError, TruncationError
from .models import QuadratureSpec

if TYPE_CHECKING:  # pragma: no cover
    from .characters import DirichletCharacter

logger = logging.getLogger(__name__)

BERNOULLI_TERMS = 12
IM_LIMIT = 20000.0
RE_MIN = -3.0
NEAR_INTEGER_STEP = 1e-4
_CHUNK = 1 << 22
_ROUNDOFF = "The occurrence of roundoff error"


@lru_cache(maxsize=1)
def bernoulli_numbers(count: int = 2 * BERNOULLI_TERMS) -> tuple[Fraction, ...]:
    """Exact B_0..B_count (Akiyama-Tanigawa, B_1 = +1/2)."""
    row: list[Fraction] = []
    out: list[Fraction] = []
    for m in range(count + 1):
        row.append(Fraction(1, m + 1))
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
        out.append(row[0])
    return tuple(out)


@lru_cache(maxsize=1)
def _em_coefficients() -> np.ndarray:
    bern = bernoulli_numbers()
    return np.array(
        [float(bern[2 * j] / math.factorial(2 * j)) for j in range(1, BERNOULLI_TERMS + 1)]
    )


def _as_array(s) -> tuple[np.ndarray, bool]:
    scalar = np.ndim(s) == 0
    return np.atleast_1d(np.asarray(s, dtype=complex)), scalar


def _start_shift(s: np.ndarray) -> int:
    im = float(np.max(np.abs(s.imag))) if s.size else 0.0
    re = float(np.max(np.abs(s.real))) if s.size else 0.0
    return int(math.ceil(1.3 * im + 30 + re)) + 1


def _check_window(s: np.ndarray) -> None:
    if np.any(s.real < RE_MIN) or np.any(np.abs(s.imag) > IM_LIMIT * 1.01):
        raise DomainError("argument outside the Euler-Maclaurin window")


def _em_tail(s: np.ndarray, a: float, N: int, regular: bool) -> np.ndarray:
    """Euler-Maclaurin remainder of sum_{n >= N} (n + a)^{-s}."""
    x = N + a
    logx = math.log(x)
    if regular:
        u = (1 - s) * logx
        ratio = np.where(np.abs(u) < 1e-8, 1 + u / 2, np.expm1(u) / np.where(u == 0, 1, u))
        tail = -logx * ratio
    else:
        tail = np.exp((1 - s) * logx) / (s - 1)
    power = np.exp(-s * logx)
    tail = tail + power / 2
    rising = s.copy()
    for j, coeff in enumerate(_em_coefficients(), start=1):
        power = power / x
        tail = tail + coeff * rising * power
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        power = power / x
    return tail


def hurwitz_zeta_many(s, a: float, *, regular: bool = False) -> np.ndarray:
    """Vectorised zeta(s, a); ``regular`` subtracts the polar part 1/(s-1)."""
    if not 0 < a <= 1:
        raise DomainError(f"Hurwitz parameter a={a} outside (0, 1]")
    arr, scalar = _as_array(s)
    _check_window(arr)
    if not regular and np.any(np.abs(arr - 1) < 1e-13):
        raise PoleError("Hurwitz zeta pole at s = 1")
    N = _start_shift(arr)
    logn = np.log(np.arange(N) + a)
    head = np.empty(arr.shape, dtype=complex)
    rows = max(1, _CHUNK // N)
    for start in range(0, arr.size, rows):
        block = arr[start : start + rows]
        head[start : start + rows] = np.exp(-np.outer(block, logn)).sum(axis=1)
    values = head + _em_tail(arr, a, N, regular)
    logger.debug("hurwitz a=%.4f N=%d batch=%d", a, N, arr.size)
    if not np.all(np.isfinite(values)):
        raise NumericsError("Hurwitz zeta evaluation overflowed")
    return values[0] if scalar else values


def hurwitz_zeta(s: complex, a: float) -> complex:
    return complex(hurwitz_zeta_many(s, a))


def riemann_zeta(s: complex) -> complex:
    return complex(hurwitz_zeta_many(s, 1.0))


def riemann_zeta_many(s) -> np.ndarray:
    return hurwitz_zeta_many(s, 1.0)


def dirichlet_l_many(s, chi: "DirichletCharacter") -> np.ndarray:
    """L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q), vectorised in s."""
    arr, scalar = _as_array(s)
    if chi.q == 1:
        out = hurwitz_zeta_many(arr, 1.0)
        return out[0] if scalar else out
    regular = not chi.is_principal
    total = np.zeros(arr.shape, dtype=complex)
    for a in range(1, chi.q + 1):
        value = chi.values[a % chi.q]
        if value == 0:
            continue
        total += value * hurwitz_zeta_many(arr, a / chi.q, regular=regular)
    out = np.exp(-arr * math.log(chi.q)) * total
    return out[0] if scalar else out


def dirichlet_l(s: complex, chi: "DirichletCharacter") -> complex:
    return complex(dirichlet_l_many(s, chi))


def hurwitz_critical_pair(t, a: float, x: complex, y: complex) -> tuple[np.ndarray, np.ndarray]:
    """Return (zeta(1/2+x+it, a), zeta(1/2+y-it, a)) sharing one phase table."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    s1 = 0.5 + x + 1j * t
    s2 = 0.5 + y - 1j * t
    _check_window(s1)
    N = _start_shift(np.concatenate([s1, s2]))
    logn = np.log(np.arange(N) + a)
    amp_x = np.exp(-(0.5 + x) * logn)
    amp_y = np.exp(-(0.5 + y) * logn)
    first = np.empty(t.shape, dtype=complex)
    second = np.empty(t.shape, dtype=complex)
    rows = max(1, _CHUNK // N)
    for start in range(0, t.size, rows):
        phase = np.exp(-1j * np.outer(t[start : start + rows], logn))
        first[start : start + rows] = phase @ amp_x
        second[start : start + rows] = phase.conj() @ amp_y
    first += _em_tail(s1, a, N, False)
    second += _em_tail(s2, a, N, False)
    return first, second


def log_gamma(s) -> np.ndarray | complex:
    """Principal-branch log Gamma with pole detection."""
    arr, scalar = _as_array(s)
    near = np.round(arr.real)
    if np.any((np.abs(arr - near) < 1e-14) & (near <= 0)):
        raise PoleError("Gamma pole at a nonpositive integer")
    out = special.loggamma(arr)
    return complex(out[0]) if scalar else out


def complex_gamma(s: complex) -> complex:
    lg = log_gamma(s)
    if lg.real > 709.0:
        raise NumericsError(f"Gamma({s}) overflows binary64")
    return cmath.exp(lg)


def completed_pair(s: complex, chi: "DirichletCharacter") -> tuple[complex, complex]:
    """Return (Lambda(s), xi(s, chi))."""
    if abs(s) < 1e-12 or abs(s - 1) < 1e-12:
        raise PoleError("Lambda has poles at s = 0 and s = 1")
    lam = cmath.exp(-s / 2 * math.log(math.pi) + log_gamma(s / 2)) * riemann_zeta(s)
    w = (s + chi.parity) / 2
    xi = cmath.exp(-w * math.log(math.pi / chi.q) + log_gamma(w)) * dirichlet_l(s, chi)
    return lam, xi


BesselKind = Literal["J", "Y", "K", "I", "B"]

_SCIPY_BESSEL = {"J": special.jv, "Y": special.yv, "K": special.kv, "I": special.iv}
_MP_BESSEL = {"J": mpmath.besselj, "Y": mpmath.bessely, "K": mpmath.besselk, "I": mpmath.besseli}


def _plain_bessel(kind: str, nu: complex, x: np.ndarray) -> np.ndarray:
    if abs(nu.imag) < 1e-15:
        return _SCIPY_BESSEL[kind](nu.real, x).astype(complex)
    func = np.frompyfunc(lambda v: complex(_MP_BESSEL[kind](nu, float(v))), 1, 1)
    return func(x).astype(complex)


def bessel(kind: BesselKind, nu: complex, x, chi_parity: int = 0):
    """Bessel J, Y, K, I of small order, and the Voronoi kernel B_nu."""
    nu = complex(nu)
    if abs(nu) > 0.2 + 1e-12:
        raise DomainError("Bessel order restricted to |nu| <= 0.2")
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(arr <= 0):
        raise DomainError("Bessel argument must be positive")
    if kind != "J" and kind != "I" and abs(cmath.sin(math.pi * nu)) < 1e-8:
        # near-integer order: average the two perturbed orders
        upper = bessel(kind, nu + NEAR_INTEGER_STEP, x, chi_parity)
        lower = bessel(kind, nu - NEAR_INTEGER_STEP, x, chi_parity)
        return (upper + lower) / 2
    if kind == "B":
        c = cmath.cos(math.pi * nu / 2)
        s = cmath.sin(math.pi * nu / 2)
        J = _plain_bessel("J", nu, arr)
        Y = _plain_bessel("Y", nu, arr)
        out = c * Y + s * J if chi_parity == 0 else 1j * c * J - 1j * s * Y
    else:
        out = _plain_bessel(kind, nu, arr)
    return complex(out[0]) if np.ndim(x) == 0 else out


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, built from exp(-1/x)."""
    x = np.asarray(x, dtype=float)

    def phi(u):
        return np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)

    up, down = phi(x), phi(1 - x)
    return up / (up + down)


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    nodes, weights = special.roots_legendre(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_nodes(a: float, b: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def composite_gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray], a: float, b: float, panels: int, order: int = 20
) -> complex:
    """Fixed composite rule with order-independent (fsum) accumulation."""
    nodes, weights = panel_nodes(a, b, panels, order)
    values = np.asarray(f(nodes), dtype=complex) * weights
    sums = values.reshape(panels, order).sum(axis=1)
    return complex(math.fsum(sums.real), math.fsum(sums.imag))


def vertical_line_nodes(sigma: float, height: float, n: int, panels: int = 8):
    """Nodes s_j and weights w_j with sum w_j f(s_j) ~ (1/2 pi i) int_(sigma) f(s) ds."""
    per_panel = max(4, n // panels)
    u, w = panel_nodes(-height, height, panels, per_panel)
    return sigma + 1j * u, w / (2 * math.pi)


def _quad_complex(f, a: float, b: float, spec: QuadratureSpec) -> tuple[complex, float]:
    parts = []
    error = 0.0
    roundoff = []
    for pick in (lambda z: z.real, lambda z: z.imag):
        out = integrate.quad(
            lambda u: pick(complex(f(u))),
            a,
            b,
            epsabs=spec.abs_tol,
            epsrel=spec.rel_tol,
            limit=spec.max_subdivisions,
            full_output=1,
        )
        if len(out) > 3:
            if not out[3].startswith(_ROUNDOFF):
                raise NonConvergenceError(f"quad on [{a}, {b}] failed: {out[3]}")
            roundoff.append(out[3])
        parts.append(out[0])
        error += out[1]
    value = complex(parts[0], parts[1])
    # a part near zero can hit roundoff; accept it when the error fits the complex budget
    budget = max(spec.abs_tol, spec.rel_tol * abs(value))
    if roundoff and error > budget:
        raise NonConvergenceError(f"quad on [{a}, {b}] failed: {roundoff[0]} (error {error:.2e} > {budget:.2e})")
    if roundoff:
        logger.debug("quad on [%s, %s] accepted after roundoff, error %.2e", a, b, error)
    return value, error


def vertical_line_integral(
    f: Callable[[complex], complex],
    sigma: float,
    spec: QuadratureSpec | None = None,
    decay_scale: float = 1.0,
) -> complex:
    """(1/2 pi i) int_(sigma) f(s) ds for integrands decaying like exp(-u^2/decay_scale)."""
    spec = spec or QuadratureSpec()
    H = spec.truncation_height
    value, _ = _quad_complex(lambda u: f(sigma + 1j * u), -H, H, spec)
    value /= 2 * math.pi
    edge = abs(complex(f(sigma + 1j * H))) + abs(complex(f(sigma - 1j * H)))
    tail = edge * decay_scale / (2 * H) / (2 * math.pi)
    budget = max(spec.abs_tol, spec.rel_tol * abs(value))
    if tail > 10 * budget:
        raise TruncationError(f"vertical-line tail {tail:.2e} exceeds budget {budget:.2e}")
    return value


def adaptive_integral(
    f: Callable[[float], complex],
    a: float,
    b: float,
    spec: QuadratureSpec | None = None,
    scale: float | None = None,
) -> complex:
    """int_a^b f(t) dt, bisected to pieces no longer than ``scale``."""
    if not a < b:
        raise DomainError("adaptive_integral needs a < b")
    spec = spec or QuadratureSpec()
    pieces = 1 if scale is None else max(1, int(math.ceil((b - a) / scale)))
    edges = np.linspace(a, b, pieces + 1)
    re, im = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, _ = _quad_complex(f, float(lo), float(hi), spec)
        re.append(value.real)
        im.append(value.imag)
    return complex(math.fsum(re), math.fsum(im))
