"""Exact-identity suite: every check here is closed form against a finite computation."""

from __future__ import annotations

import logging
import math

import numpy as np

from ..arith import (
    enumerate_pij,
    ramanujan_sum,
    ramanujan_sum_sterneck,
    twisted_ramanujan,
    twisted_ramanujan_closed,
    twisted_sigma,
    twisted_sigma_closed,
)
from ..characters import DirichletCharacter
from ..errors import NumericsError
from ..eulerprod import (
    b_factor,
    b_factor_series,
    b_prime_factor,
    b_prime_factor_series,
    functional_identity_residual,
    m_sum_reflection_residual,
)
from ..models import CheckResult, RunConfig, ShiftTuple
from ..moment import cancellation_residuals
from .base import SuiteRunner, coprime_pairs

logger = logging.getLogger(__name__)

UNCONDITIONAL = ("C11_fe", "C11_fe_perm", "bridge_c11_b", "bridge_c22_b", "r_alpha", "r_prime_beta")
NEED_Q_H = ("C12_fe", "bridge_c12_b_prime")
NEED_Q_K = ("C21_fe", "bridge_c21_b_prime")
AT_ZERO = {"bridge_c11_b", "bridge_c22_b", "bridge_c12_b_prime", "bridge_c21_b_prime", "r_alpha", "r_prime_beta"}


def _pairs_with_q(rng: np.random.Generator, q: int, count: int) -> list[tuple[int, int]]:
    """Coprime (h, k) with q | h, h <= 100."""
    out = []
    for h0, k in coprime_pairs(rng, 10 * count, top=max(2, 100 // q)):
        if math.gcd(q * h0, k) == 1:
            out.append((q * h0, k))
        if len(out) == count:
            break
    return out


class IdentitySuite(SuiteRunner):
    name = "identities"
    default_tolerance = 1e-10

    def checks(self, config: RunConfig, chi: DirichletCharacter) -> list[CheckResult]:
        rng = np.random.default_rng(config.seed)
        tol = self.tolerance(config)
        out: list[CheckResult] = []
        if chi.primitive and chi.q > 1:
            out.extend(self._gauss_checks(chi, tol))
            out.append(self._sigma_check(chi, tol))
            out.append(self._ramanujan_twisted_check(chi, tol))
        out.append(self._ramanujan_check())
        out.append(self._pij_check(chi, rng))
        shifts = [self.shifts(config, rng) for _ in range(3)]
        for sh in shifts:
            out.extend(self._euler_checks(sh, chi, rng, tol))
        out.extend(self._cancellation_checks(config, shifts[0], chi, rng, tol))
        return out

    def _gauss_checks(self, chi: DirichletCharacter, tol: float) -> list[CheckResult]:
        G = chi.gauss
        sign = (-1) ** chi.parity
        return [
            CheckResult.from_residual(
                "gauss_modulus", self.name, abs(abs(G) ** 2 - chi.q) / chi.q, tol, oracle="direct Gauss sum"
            ),
            CheckResult.from_residual(
                "gauss_product",
                self.name,
                abs(G * chi.conj().gauss - sign * chi.q) / chi.q,
                tol,
                oracle="direct Gauss sums of chi and chi-bar",
            ),
        ]

    def _sigma_check(self, chi: DirichletCharacter, tol: float) -> CheckResult:
        worst = 0.0
        alpha, beta = 0.03 + 0.01j, -0.02 + 0.04j
        for d in range(1, 2 * chi.q + 1):
            for c in {1, d - 1} - {0}:
                if math.gcd(c, d) != 1:
                    continue
                for n in range(1, 31):
                    direct = twisted_sigma(alpha, beta, n, c, d, chi)
                    closed = twisted_sigma_closed(alpha, beta, n, c, d, chi)
                    worst = max(worst, abs(direct - closed) / max(1.0, abs(direct)))
        return CheckResult.from_residual(
            "twisted_sigma_closed", self.name, worst, tol, oracle="direct sum over residues"
        )

    def _ramanujan_twisted_check(self, chi: DirichletCharacter, tol: float) -> CheckResult:
        q = chi.q
        worst = 0.0
        for d in (q, 2 * q, 3 * q, q * q):
            for r in range(1, 61):
                worst = max(worst, abs(twisted_ramanujan(d, r, chi) - twisted_ramanujan_closed(d, r, chi)))
        return CheckResult.from_residual(
            "twisted_ramanujan_closed", self.name, worst, tol, oracle="direct sum over units"
        )

    def _ramanujan_check(self) -> CheckResult:
        worst = max(
            abs(ramanujan_sum(d, r) - ramanujan_sum_sterneck(d, r)) for d in range(1, 61) for r in range(0, 61)
        )
        return CheckResult.from_residual("ramanujan_sterneck", self.name, worst, 0.5, oracle="direct sum")

    def _pij_check(self, chi: DirichletCharacter, rng: np.random.Generator) -> CheckResult:
        failures = []
        for h, k in coprime_pairs(rng, 3):
            for i in (1, 2, 3):
                for j in (1, 2, 3):
                    try:
                        enumerate_pij(i, j, h, k, chi.q, 600)
                    except NumericsError as exc:
                        failures.append(str(exc))
        return CheckResult.from_residual(
            "pij_generators",
            self.name,
            float(len(failures)),
            0.5,
            oracle="brute classification",
            details={"failures": failures[:5]},
        )

    def _euler_checks(
        self, sh: ShiftTuple, chi: DirichletCharacter, rng: np.random.Generator, tol: float
    ) -> list[CheckResult]:
        out = []
        s = complex(*rng.uniform(-0.2, 0.2, size=2))
        h, k = coprime_pairs(rng, 1)[0]
        series_s = 0.3 + 0.2j
        for label, closed, series in (
            ("B_closed", b_factor, b_factor_series),
            ("B_prime_closed", b_prime_factor, b_prime_factor_series),
        ):
            value = closed(sh, h, k, chi, series_s)
            reference = series(sh, h, k, chi, series_s)
            out.append(
                CheckResult.from_residual(
                    label,
                    self.name,
                    abs(value - reference) / max(1.0, abs(reference)),
                    tol,
                    value=value,
                    reference=reference,
                    oracle="truncated local series",
                    details={"h": h, "k": k},
                )
            )
        cases = [(kind, h, k) for kind in UNCONDITIONAL]
        if chi.q > 1:
            for hq, kk in _pairs_with_q(rng, chi.q, 1):
                cases += [(kind, hq, kk) for kind in NEED_Q_H]
                cases += [(kind, kk, hq) for kind in NEED_Q_K]
                out.append(
                    CheckResult.from_residual(
                        "m_sum_reflection",
                        self.name,
                        m_sum_reflection_residual(sh.alpha + sh.gamma + 2 * s, hq, chi.q),
                        tol,
                        oracle="divisor reflection",
                    )
                )
        for kind, hh, kk in cases:
            point = 0 if kind in AT_ZERO else s
            out.append(
                CheckResult.from_residual(
                    kind,
                    self.name,
                    functional_identity_residual(kind, sh, hh, kk, chi, point),
                    tol,
                    oracle="both sides from local factors",
                    details={"h": hh, "k": kk, "s": [complex(point).real, complex(point).imag]},
                )
            )
        return out

    def _cancellation_checks(
        self, config: RunConfig, sh: ShiftTuple, chi: DirichletCharacter, rng: np.random.Generator, tol: float
    ) -> list[CheckResult]:
        h, k = coprime_pairs(rng, 1, top=20)[0]
        residuals = cancellation_residuals(h, k, sh, chi, config.weight())
        return [
            CheckResult.from_residual(
                f"cancel:{name}", self.name, value, tol, oracle="R against J", details={"h": h, "k": k}
            )
            for name, value in residuals.items()
        ]
