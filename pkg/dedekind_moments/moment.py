"""The twisted second moment of zeta(s)L(s, chi) and its main term.

``i_hk_oracle`` integrates

    (h/k)^{-it} zeta(1/2+alpha+it) L(1/2+beta+it, chi) zeta(1/2+gamma-it) L(1/2+delta-it, chi-bar) w(t)

directly. ``main_term`` assembles the six-term prediction from the Euler-product
factors. Every main-term piece has the shape coefficient * (t/2pi)^{-x}, so the
t-integrals reduce to ``power_integral`` of the weight.
"""

from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate

from .afe import AFE_KERNEL, default_mn_max, kernel_value, v_weight_many, x_factor
from .arith import shifted_divisor_table
from .characters import DirichletCharacter
from .errors import PreconditionError, ensure_finite
from .eulerprod import (
    NormalizationKind,
    a_factor,
    a_residue,
    b_factor,
    c_factor,
    corollary_c2,
    q_factor,
    require_generic,
    z_factor,
    z_prime_factor,
)
from .models import KernelSpec, MomentReport, ShiftTuple, WeightSpec
from .numkernel import dirichlet_l, hurwitz_critical_pair, panel_nodes, riemann_zeta, smooth_step

logger = logging.getLogger(__name__)

MOMENT_GAP = 1e-6
ORACLE_ORDER = 20
ORACLE_CHUNK_PANELS = 24
POWER_PANELS = 256
POWER_ORDER = 20
DIAGONAL_ORDER = 10
V_CUTOFF = 1e-12
FIT_POINTS = 33
DEFAULT_SHIFT_SCALES = (1e-2, 1e-3)


# ---------------------------------------------------------------------------
# Weight
# ---------------------------------------------------------------------------


def weight_w(t, spec: WeightSpec):
    """Smooth bump rising on [T/2, T/2+T0], falling on [4T-T0, 4T], zero outside."""
    t = np.asarray(t, dtype=float)
    lo, hi = spec.support
    out = smooth_step((t - lo) / spec.T0) * smooth_step((hi - t) / spec.T0)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=32)
def _weighted_nodes(T: float, T0: float) -> tuple[np.ndarray, np.ndarray]:
    spec = WeightSpec(T=T, T0=T0)
    lo, hi = spec.support
    t, weights = panel_nodes(lo, hi, POWER_PANELS, POWER_ORDER)
    mass = weights * weight_w(t, spec)
    t.setflags(write=False)
    mass.setflags(write=False)
    return t, mass


def _fsum(values: np.ndarray) -> complex:
    values = np.asarray(values, dtype=complex)
    return complex(math.fsum(values.real), math.fsum(values.imag))


def power_integral(x, spec: WeightSpec):
    """int w(t) (t/2pi)^{-x} dt, vectorised over x."""
    t, mass = _weighted_nodes(spec.T, spec.T0)
    exponents = np.atleast_1d(np.asarray(x, dtype=complex))
    logs = np.log(t / (2 * math.pi))
    table = np.exp(-np.outer(exponents, logs)) * mass
    out = np.array([_fsum(row) for row in table])
    return complex(out[0]) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Oracle
# ---------------------------------------------------------------------------


def _check_hk(h: int, k: int) -> None:
    if h < 1 or k < 1 or math.gcd(h, k) != 1:
        raise PreconditionError(f"need coprime h, k >= 1, got h={h}, k={k}")


def node_budget(h: int, k: int, chi: DirichletCharacter, spec: WeightSpec) -> tuple[int, float]:
    """Panels for the oracle so that no node gap exceeds 2 pi / (10 log(T q h k))."""
    spacing = 2 * math.pi / (10 * math.log(spec.T * chi.q * h * k))
    # the widest gap of an n-point Gauss-Legendre panel of width W is about pi W / (2n)
    width = 2 * ORACLE_ORDER * spacing / math.pi
    lo, hi = spec.support
    return int(math.ceil((hi - lo) / width)), spacing


def critical_product(t, sh: ShiftTuple, chi: DirichletCharacter) -> np.ndarray:
    """zeta L zeta L on the critical line at the shifts, vectorised in t."""
    a, b, g, d = sh.as_tuple()
    t = np.atleast_1d(np.asarray(t, dtype=float))
    z1, z2 = hurwitz_critical_pair(t, 1.0, a, g)
    q = chi.q
    l1 = np.zeros(t.shape, dtype=complex)
    l2 = np.zeros(t.shape, dtype=complex)
    for r in range(1, q + 1):
        c = complex(chi.values[r % q])
        if c == 0:
            continue
        h1, h2 = hurwitz_critical_pair(t, r / q, b, d)
        l1 += c * h1
        l2 += c.conjugate() * h2
    logq = math.log(q)
    l1 *= np.exp(-(0.5 + b + 1j * t) * logq)
    l2 *= np.exp(-(0.5 + d - 1j * t) * logq)
    return z1 * l1 * z2 * l2


def _integrand(t: np.ndarray, h: int, k: int, sh: ShiftTuple, chi: DirichletCharacter, spec: WeightSpec):
    w = weight_w(t, spec)
    phase = np.exp(-1j * t * math.log(h / k))
    return w, phase * critical_product(t, sh, chi) * w


@dataclass
class OracleRun:
    value: complex
    nodes: int
    panels: int
    spacing: float
    samples: list[tuple[float, float, complex]] = field(default_factory=list)


def _oracle(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    spec: WeightSpec,
    threads: int = 1,
    keep_samples: bool = False,
) -> OracleRun:
    _check_hk(h, k)
    panels, spacing = node_budget(h, k, chi, spec)
    lo, hi = spec.support
    edges = np.linspace(lo, hi, panels + 1)
    chunks = [
        (start, min(start + ORACLE_CHUNK_PANELS, panels))
        for start in range(0, panels, ORACLE_CHUNK_PANELS)
    ]
    logger.info(
        "oracle h=%d k=%d q=%d T=%.0f: %d panels x %d nodes", h, k, chi.q, spec.T, panels, ORACLE_ORDER
    )

    def run(chunk: tuple[int, int]):
        i0, i1 = chunk
        t, weights = panel_nodes(float(edges[i0]), float(edges[i1]), i1 - i0, ORACLE_ORDER)
        w, values = _integrand(t, h, k, sh, chi, spec)
        sums = (values * weights).reshape(i1 - i0, ORACLE_ORDER).sum(axis=1)
        samples = list(zip(t.tolist(), w.tolist(), values.tolist())) if keep_samples else []
        return sums, samples

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(run, chunks))
    value = ensure_finite(_fsum(np.concatenate([sums for sums, _ in results])), "oracle integral")
    samples = [row for _, rows in results for row in rows]
    return OracleRun(value, panels * ORACLE_ORDER, panels, spacing, samples)


def write_samples(path: str | Path, samples: Iterable[tuple[float, float, complex]]) -> Path:
    """CSV of per-node integrand samples (t, w, re, im)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "w", "re", "im"])
        for t, w, value in samples:
            writer.writerow([f"{t:.10g}", f"{w:.10g}", f"{value.real:.17g}", f"{value.imag:.17g}"])
    return path


def i_hk_oracle(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    spec: WeightSpec,
    threads: int = 1,
    samples_path: str | Path | None = None,
) -> complex:
    """Composite Gauss-Legendre value of the twisted moment integral I(h, k)."""
    run = _oracle(h, k, sh, chi, spec, threads, keep_samples=samples_path is not None)
    if samples_path is not None:
        write_samples(samples_path, run.samples)
    return run.value


def i_hk_simpson(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    spec: WeightSpec,
    step: float | None = None,
    block: int = 2048,
) -> complex:
    """Independent fixed-step Simpson value of I(h, k), at half the oracle spacing by default."""
    _check_hk(h, k)
    lo, hi = spec.support
    step = step or node_budget(h, k, chi, spec)[1] / 2
    n = int(math.ceil((hi - lo) / step))
    n += n % 2
    t = np.linspace(lo, hi, n + 1)
    values = np.concatenate(
        [_integrand(t[i : i + block], h, k, sh, chi, spec)[1] for i in range(0, t.size, block)]
    )
    return complex(integrate.simpson(values.real, x=t), integrate.simpson(values.imag, x=t))


# ---------------------------------------------------------------------------
# Main term
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BracketTerm:
    """One main-term summand coefficient * (t/2pi)^{-exponent}."""

    label: str
    coefficient: complex
    exponent: complex


def _lower_order_terms(
    h: int, k: int, sh: ShiftTuple, chi: DirichletCharacter, normalization: NormalizationKind
) -> list[BracketTerm]:
    a, b, g, d = sh.as_tuple()
    q = chi.q
    fifth = sixth = 0j
    if q > 1 and h % q == 0:
        fifth = (
            complex(chi(k))
            * q ** (-d)
            * z_prime_factor(sh.permuted("-d,b,g,-a"), h // q, k, chi, 0, normalization)
        )
    if q > 1 and k % q == 0:
        sixth = (
            complex(chi(h)).conjugate()
            * q ** (-b)
            * z_prime_factor(sh.permuted("a,-g,-b,d"), h, k // q, chi.conj(), 0, normalization)
        )
    return [BracketTerm("Z'_h", fifth, a + d), BracketTerm("Z'_k", sixth, b + g)]


def bracket_terms(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    normalization: NormalizationKind = "root-number",
) -> list[BracketTerm]:
    """The six summands of the main term, before the t-integral and the 1/sqrt(hk)."""
    _check_hk(h, k)
    a, b, g, d = sh.as_tuple()
    qbd = chi.q ** (-b - d)
    terms = [
        BracketTerm("Z", z_factor(sh, h, k, chi, 0), 0j),
        BracketTerm("Z_swap", qbd * z_factor(sh.swap(), h, k, chi, 0), sh.total),
        BracketTerm("Z_alpha_gamma", z_factor(sh.permuted("-g,b,-a,d"), h, k, chi, 0), a + g),
        BracketTerm("Z_beta_delta", qbd * z_factor(sh.permuted("a,-d,g,-b"), h, k, chi, 0), b + d),
    ]
    return terms + _lower_order_terms(h, k, sh, chi, normalization)


def _integrate_terms(terms: Sequence[BracketTerm], h: int, k: int, spec: WeightSpec) -> list[complex]:
    powers = power_integral([term.exponent for term in terms], spec)
    scale = 1 / math.sqrt(h * k)
    return [
        ensure_finite(term.coefficient * power * scale, term.label) for term, power in zip(terms, powers)
    ]


def main_term(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    spec: WeightSpec,
    normalization: NormalizationKind = "root-number",
    gap: float = MOMENT_GAP,
) -> MomentReport:
    """Six-term main-term side of the moment, with the other Z' normalization in details."""
    require_generic(sh, gap)
    start = time.perf_counter()
    terms = bracket_terms(h, k, sh, chi, normalization)
    per_term = _integrate_terms(terms, h, k, spec)
    other: NormalizationKind = "displayed" if normalization == "root-number" else "root-number"
    alternative = _integrate_terms(_lower_order_terms(h, k, sh, chi, other), h, k, spec)
    total = complex(sum(per_term))
    other_total = complex(sum(per_term[:4]) + sum(alternative))
    return MomentReport(
        h=h,
        k=k,
        T=spec.T,
        T0=spec.T0,
        main_term=total,
        per_term=per_term,
        timings={"main_term": time.perf_counter() - start},
        details={
            "normalization": normalization,
            "alternative_normalization": other,
            "alternative_main_term": [other_total.real, other_total.imag],
            "labels": [term.label for term in terms],
        },
    )


def compare(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    spec: WeightSpec,
    threads: int = 1,
    samples_path: str | Path | None = None,
    normalization: NormalizationKind = "root-number",
) -> MomentReport:
    """Oracle against main term for one (h, k)."""
    report = main_term(h, k, sh, chi, spec, normalization)
    start = time.perf_counter()
    run = _oracle(h, k, sh, chi, spec, threads, keep_samples=samples_path is not None)
    elapsed = time.perf_counter() - start
    if samples_path is not None:
        write_samples(samples_path, run.samples)

    scale = max(abs(run.value), 1e-300)
    residual = abs(run.value - report.main_term)
    other = complex(*report.details["alternative_main_term"])
    details = dict(report.details)
    details.update(
        oracle_nodes=run.nodes,
        oracle_spacing=run.spacing,
        alternative_relative_residual=abs(run.value - other) / scale,
    )
    logger.info("compare h=%d k=%d T=%.0f: relative residual %.3e", h, k, spec.T, residual / scale)
    return report.model_copy(
        update={
            "oracle": run.value,
            "residual": residual,
            "relative_residual": residual / scale,
            "timings": {**report.timings, "oracle": elapsed},
            "details": details,
        }
    )


# ---------------------------------------------------------------------------
# Diagonal
# ---------------------------------------------------------------------------


def _kernel_ratio(s: complex, kernel: KernelSpec) -> complex:
    return complex(kernel_value(s, kernel)) / s


def j_terms(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    spec: WeightSpec,
    kernel: KernelSpec = AFE_KERNEL,
) -> dict[str, complex]:
    """Residues of the two diagonal pieces at 2s = -alpha-gamma, -beta-delta and their reflections."""
    _check_hk(h, k)
    a, b, g, d = sh.as_tuple()
    q, hk = chi.q, h * k
    swap = sh.swap()
    out: dict[str, complex] = {}
    for label, pole, x in (("alpha_gamma", "alpha_gamma", a + g), ("beta_delta", "beta_delta", b + d)):
        residue = 0.5 * a_residue(sh, chi, pole) * b_factor(sh, h, k, chi, -x)
        out[f"J1_{label}"] = (
            q ** (-x / 2)
            * residue
            * hk ** (-0.5 + x / 2)
            * _kernel_ratio(-x / 2, kernel)
            * power_integral(x, spec)
        )
        residue = 0.5 * a_residue(swap, chi, pole) * b_factor(swap, h, k, chi, x)
        out[f"J2_{label}"] = (
            q ** (-b - d)
            * q ** (x / 2)
            * residue
            * hk ** (-0.5 - x / 2)
            * _kernel_ratio(x / 2, kernel)
            * power_integral(sh.total - x, spec)
        )
    return {key: ensure_finite(value, key) for key, value in out.items()}


def j_term_contour(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    spec: WeightSpec,
    which: str,
    kernel: KernelSpec = AFE_KERNEL,
    nodes: int = 64,
) -> complex:
    """The same residue as ``j_terms[which]`` by the trapezoidal rule on a small circle."""
    a, b, g, d = sh.as_tuple()
    q, hk = chi.q, h * k
    first, label = which.split("_", 1)
    x, other = (a + g, b + d) if label == "alpha_gamma" else (b + d, a + g)
    if first == "J1":
        center, neighbour = -x / 2, -other / 2
        shifts, prefactor, offset = sh, 1.0, 0j
    elif first == "J2":
        center, neighbour = x / 2, other / 2
        shifts, prefactor, offset = sh.swap(), q ** (-b - d), sh.total
    else:
        raise ValueError(f"unknown J term {which!r}")
    radius = min(abs(center), abs(center - neighbour)) / 3
    theta = 2 * math.pi * np.arange(nodes) / nodes
    points = center + radius * np.exp(1j * theta)
    powers = power_integral(offset - 2 * points, spec)
    values = [
        prefactor
        * _kernel_ratio(s, kernel)
        * q**s
        * hk ** (-s)
        * z_factor(shifts, h, k, chi, 2 * s)
        * power
        * (s - center)
        for s, power in zip(points, powers)
    ]
    return _fsum(np.asarray(values)) / nodes / math.sqrt(hk)


def diagonal_closed(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    spec: WeightSpec,
    kernel: KernelSpec = AFE_KERNEL,
) -> complex:
    """Z(0) and reflected Z(0) terms plus the four J residues."""
    require_generic(sh, MOMENT_GAP)
    _, b, _, d = sh.as_tuple()
    powers = power_integral([0j, sh.total], spec)
    base = (
        z_factor(sh, h, k, chi, 0) * powers[0]
        + chi.q ** (-b - d) * z_factor(sh.swap(), h, k, chi, 0) * powers[1]
    ) / math.sqrt(h * k)
    return complex(base + sum(j_terms(h, k, sh, chi, spec, kernel).values()))


def diagonal_l_max(t: float, h: int, k: int, q: int, kernel: KernelSpec = AFE_KERNEL) -> int:
    """Largest l with V(pi^2 h k l^2 / q) above the cutoff at height t."""
    return math.isqrt(default_mn_max(t, q, kernel) // (h * k)) + 1


def diagonal_brute(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    spec: WeightSpec,
    l_max: int | None = None,
    kernel: KernelSpec = AFE_KERNEL,
) -> complex:
    """The hn = km part of both AFE sums, integrated against w."""
    _check_hk(h, k)
    if not chi.primitive:
        raise PreconditionError("the diagonal sum uses the AFE and needs a primitive character")
    lo, hi = spec.support
    panels = max(16, int(math.ceil(4 * (hi - lo) / spec.T0)))
    t_nodes, weights = panel_nodes(lo, hi, panels, DIAGONAL_ORDER)
    mass = weights * weight_w(t_nodes, spec)
    top = l_max or diagonal_l_max(hi, h, k, chi.q, kernel)

    a, b, g, d = sh.as_tuple()
    ell = np.arange(1, top + 1)
    f1 = (
        shifted_divisor_table(a, b, chi, k * top)[k * ell]
        * shifted_divisor_table(g, d, chi.conj(), h * top)[h * ell]
        / ell
    )
    f2 = (
        shifted_divisor_table(-g, -d, chi, k * top)[k * ell]
        * shifted_divisor_table(-a, -b, chi.conj(), h * top)[h * ell]
        / ell
    )
    x = math.pi**2 * h * k * ell.astype(float) ** 2 / chi.q

    values = np.zeros(t_nodes.shape, dtype=complex)
    for i, (t, m) in enumerate(zip(t_nodes, mass)):
        if m == 0:
            continue
        n = min(top, diagonal_l_max(t, h, k, chi.q, kernel)) if l_max is None else top
        v1 = v_weight_many(x[:n], t, sh, chi.parity, kernel)
        v2 = v_weight_many(x[:n], t, sh.swap(), chi.parity, kernel)
        values[i] = m * (f1[:n] @ v1 + x_factor(t, sh, chi) * (f2[:n] @ v2))

    edge = abs(complex(v_weight_many(x[-1:], hi, sh, chi.parity, kernel)[0]))
    if edge > V_CUTOFF:
        logger.warning("diagonal l-sum cut at l=%d where |V| = %.2e", top, edge)
    logger.debug("diagonal brute h=%d k=%d: %d t-nodes, l <= %d", h, k, t_nodes.size, top)
    return _fsum(values) / math.sqrt(h * k)


# ---------------------------------------------------------------------------
# Off-diagonal main term and the R / J cancellation
# ---------------------------------------------------------------------------


def _r_value(b_arg: complex, h: int, k: int, sh: ShiftTuple, chi: DirichletCharacter, spec, kernel) -> complex:
    a, b, g, d = sh.as_tuple()
    q, hk = chi.q, h * k
    ratio = (
        dirichlet_l(1 - a + b, chi)
        * dirichlet_l(1 - g + d, chi.conj())
        * riemann_zeta(1 - a + b - g + d)
        / riemann_zeta(2 - a + b - g + d)
    )
    return (
        0.5
        * q**b_arg
        / math.sqrt(hk)
        * ratio
        * power_integral(a + g, spec)
        * _kernel_ratio(b_arg, kernel)
        * h**a
        * k**g
        * hk**b_arg
        * q_factor("Q11", sh, q, b_arg)
        * c_factor("C11", sh, h, k, chi, b_arg)
    )


def _r_prime_value(
    b_arg: complex, h: int, k: int, sh: ShiftTuple, chi: DirichletCharacter, spec, kernel
) -> complex:
    a, b, g, d = sh.as_tuple()
    q, hk = chi.q, h * k
    ratio = (
        dirichlet_l(1 + g - d, chi)
        * dirichlet_l(1 + a - b, chi.conj())
        * riemann_zeta(1 + a - b + g - d)
        / riemann_zeta(2 + a - b + g - d)
    )
    return (
        0.5
        * q ** (-b_arg - b - d)
        / math.sqrt(hk)
        * ratio
        * power_integral(b + d, spec)
        * _kernel_ratio(b_arg, kernel)
        * h**b
        * k**d
        * hk**b_arg
        * q_factor("Q22", sh, q, b_arg)
        * c_factor("C22", sh, h, k, chi, b_arg)
    )


def r_terms(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    spec: WeightSpec,
    kernel: KernelSpec = AFE_KERNEL,
) -> dict[str, complex]:
    """R and R' at -(alpha+gamma)/2 and -(beta+delta)/2."""
    _check_hk(h, k)
    require_generic(sh, MOMENT_GAP)
    a, b, g, d = sh.as_tuple()
    points = {"alpha_gamma": -(a + g) / 2, "beta_delta": -(b + d) / 2}
    out = {}
    for label, point in points.items():
        out[f"R_{label}"] = ensure_finite(_r_value(point, h, k, sh, chi, spec, kernel), f"R_{label}")
        out[f"Rp_{label}"] = ensure_finite(
            _r_prime_value(point, h, k, sh, chi, spec, kernel), f"Rp_{label}"
        )
    return out


# R term, J term, sign of R
CANCELLATIONS = (
    ("R_alpha_gamma", "J1_alpha_gamma", 1),
    ("Rp_beta_delta", "J1_beta_delta", 1),
    ("R_beta_delta", "J2_beta_delta", -1),
    ("Rp_alpha_gamma", "J2_alpha_gamma", -1),
)


def cancellation_residuals(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    spec: WeightSpec,
    kernel: KernelSpec = AFE_KERNEL,
) -> dict[str, float]:
    """Relative residuals of the four R = +-J identities."""
    rs = r_terms(h, k, sh, chi, spec, kernel)
    js = j_terms(h, k, sh, chi, spec, kernel)
    return {
        f"{r_name}={'+' if sign > 0 else '-'}{j_name}": abs(rs[r_name] - sign * js[j_name])
        / max(abs(js[j_name]), 1e-300)
        for r_name, j_name, sign in CANCELLATIONS
    }


def off_diagonal_main_term(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    spec: WeightSpec,
    kernel: KernelSpec = AFE_KERNEL,
) -> complex:
    """Main term of the U11 and U22 contributions, R and R' residues included."""
    _check_hk(h, k)
    require_generic(sh, MOMENT_GAP)
    a, b, g, d = sh.as_tuple()
    q, hk = chi.q, h * k
    powers = power_integral([a + g, b + d], spec)
    first = (
        powers[0]
        * a_factor(sh.permuted("-g,b,-a,d"), chi, 0)
        * h**a
        * k**g
        * c_factor("C11", sh, h, k, chi, 0)
    )
    second = (
        q ** (-b - d)
        * powers[1]
        * a_factor(sh.permuted("a,-d,g,-b"), chi, 0)
        * h**b
        * k**d
        * c_factor("C22", sh, h, k, chi, 0)
    )
    rs = r_terms(h, k, sh, chi, spec, kernel)
    residues = -rs["R_alpha_gamma"] + rs["R_beta_delta"] + rs["Rp_alpha_gamma"] - rs["Rp_beta_delta"]
    return complex((first + second) / math.sqrt(hk) + residues)


def off_diagonal_bridge_residual(
    h: int,
    k: int,
    sh: ShiftTuple,
    chi: DirichletCharacter,
    spec: WeightSpec,
    kernel: KernelSpec = AFE_KERNEL,
) -> float:
    """Relative gap between the off-diagonal main term and Z_alpha_gamma + Z_beta_delta minus all J terms."""
    per_term = _integrate_terms(bracket_terms(h, k, sh, chi)[2:4], h, k, spec)
    expected = sum(per_term) - sum(j_terms(h, k, sh, chi, spec, kernel).values())
    value = off_diagonal_main_term(h, k, sh, chi, spec, kernel)
    return abs(value - expected) / max(abs(expected), 1e-300)


# ---------------------------------------------------------------------------
# Mollified moment and the leading log^2 coefficient
# ---------------------------------------------------------------------------


Coefficients = Sequence[tuple[int, complex]]


def _mollifier_pairs(coeffs: Coefficients):
    """(weight, reduced h, reduced k, h, k) with weight a(h) conj(a(k)) / sqrt(hk)."""
    for h, ah in coeffs:
        for k, ak in coeffs:
            g = math.gcd(h, k)
            yield complex(ah) * complex(ak).conjugate() / math.sqrt(h * k), h // g, k // g, h, k


def _check_coeffs(coeffs: Coefficients, spec: WeightSpec) -> None:
    if not coeffs:
        raise PreconditionError("mollifier needs at least one coefficient")
    if any(n < 1 for n, _ in coeffs):
        raise PreconditionError("mollifier indices must be positive")
    X = max(n for n, _ in coeffs)
    if X * X > spec.T ** (2 / 11):
        logger.warning("mollifier length %d is outside the range hk <= T^(2/11) at T=%.0f", X, spec.T)


def mollified_main(
    coeffs: Coefficients,
    chi: DirichletCharacter,
    spec: WeightSpec,
    sh: ShiftTuple | None = None,
    normalization: NormalizationKind = "root-number",
) -> complex:
    """sum_{h,k} a(h) conj(a(k)) / sqrt(hk) times the main term at (h/g, k/g), g = (h, k)."""
    _check_coeffs(coeffs, spec)
    sh = sh or ShiftTuple.generic(spec.T)
    cache: dict[tuple[int, int], complex] = {}
    parts = []
    for weight, h, k, _, _ in _mollifier_pairs(coeffs):
        if (h, k) not in cache:
            cache[(h, k)] = main_term(h, k, sh, chi, spec, normalization).main_term
        parts.append(weight * cache[(h, k)])
    return _fsum(np.asarray(parts))


@dataclass(frozen=True)
class LeadingCoefficient:
    estimate: float
    expected: float
    per_scale: dict[float, float]

    @property
    def relative_error(self) -> float:
        return abs(self.estimate - self.expected) / abs(self.expected)


def _bracket_values(t: np.ndarray, pairs, sh: ShiftTuple, chi: DirichletCharacter) -> np.ndarray:
    logs = np.log(t / (2 * math.pi))
    total = np.zeros(t.shape, dtype=complex)
    for weight, h, k in pairs:
        for term in bracket_terms(h, k, sh, chi):
            total += weight / math.sqrt(h * k) * term.coefficient * np.exp(-term.exponent * logs)
    return total


def _extrapolated_log2(pairs, chi: DirichletCharacter, spec: WeightSpec, shift_scales) -> tuple[float, dict]:
    if len(shift_scales) != 2 or shift_scales[0] == shift_scales[1]:
        raise PreconditionError("need two distinct shift scales")
    lo, hi = spec.support
    t = np.geomspace(lo, hi, FIT_POINTS)
    per_scale = {}
    for scale in shift_scales:
        sh = ShiftTuple.generic(spec.T, scale)
        values = _bracket_values(t, pairs, sh, chi)
        per_scale[scale] = float(np.polyfit(np.log(t), values.real, 2)[0])
    s1, s2 = shift_scales
    estimate = (s1 * per_scale[s2] - s2 * per_scale[s1]) / (s1 - s2)
    return estimate, per_scale


def leading_coefficient(
    chi: DirichletCharacter,
    spec: WeightSpec,
    shift_scales: tuple[float, float] = DEFAULT_SHIFT_SCALES,
) -> LeadingCoefficient:
    """log^2 t coefficient of the h = k = 1 bracket, extrapolated to zero shifts."""
    estimate, per_scale = _extrapolated_log2([(1.0, 1, 1)], chi, spec, shift_scales)
    return LeadingCoefficient(estimate, corollary_c2(1, 1, chi), per_scale)


def mollified_leading_coefficient(
    coeffs: Coefficients,
    chi: DirichletCharacter,
    spec: WeightSpec,
    shift_scales: tuple[float, float] = DEFAULT_SHIFT_SCALES,
) -> LeadingCoefficient:
    """Same extrapolation for the mollified bracket, against sum c_2(h,k) a(h) conj(a(k)) (h,k) / hk."""
    _check_coeffs(coeffs, spec)
    pairs = [(weight, h, k) for weight, h, k, _, _ in _mollifier_pairs(coeffs)]
    estimate, per_scale = _extrapolated_log2(pairs, chi, spec, shift_scales)
    expected = 0j
    for h, ah in coeffs:
        for k, ak in coeffs:
            expected += (
                corollary_c2(h, k, chi)
                * complex(ah)
                * complex(ak).conjugate()
                * math.gcd(h, k)
                / (h * k)
            )
    return LeadingCoefficient(estimate, expected.real, per_scale)
