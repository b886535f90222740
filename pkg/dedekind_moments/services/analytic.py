"""AFE, Voronoi and delta-symbol suites."""

from __future__ import annotations

import logging

import numpy as np

from ..afe import AFE_TOL, afe_terms, v_weight, v_weight_many, xi_symmetry_residual
from ..characters import DirichletCharacter
from ..errors import TruncationError
from ..models import CheckResult, KernelSpec, RunConfig, VoronoiTerms
from ..voronoi import (
    BumpFunction,
    delta_symbol_residual,
    delta_vanishes,
    functional_e_residual,
    voronoi_terms,
)
from .base import SuiteRunner

logger = logging.getLogger(__name__)

QUARTIC_KERNEL = KernelSpec(kind="quartic-damped", scale=4.0, quartic=200.0)
MUTATION_FLOOR = 1e-2
CONTOUR_TOL = 1e-9
CONTOUR_POINTS = (1.0, 250.0, 900.0)
DELTA_OMEGA = 20.0
DELTA_RANGE = 50


class AfeSuite(SuiteRunner):
    name = "afe"
    default_tolerance = AFE_TOL

    def checks(self, config: RunConfig, chi: DirichletCharacter) -> list[CheckResult]:
        tol = self.tolerance(config)
        sh = self.shifts(config, np.random.default_rng(config.seed))
        kernel = self.kernel()
        first = afe_terms(config.t, sh, chi, config.mnmax, kernel)
        if first.tail_bound > tol:
            raise TruncationError(
                f"mnmax={first.mn_max} leaves an estimated tail {first.tail_bound:.2e} above {tol:.0e}"
            )
        second = afe_terms(config.t, sh, chi, config.mnmax, QUARTIC_KERNEL)
        scale = max(1.0, abs(first.lhs))
        return [
            CheckResult.from_residual(
                "afe_identity",
                self.name,
                first.residual,
                tol,
                value=first.rhs,
                reference=first.lhs,
                oracle="Euler-Maclaurin zeta and L values",
                details={"t": config.t, "terms": first.model_dump(mode="json")},
            ),
            CheckResult.from_residual(
                "afe_kernel_independence",
                self.name,
                abs(first.rhs - second.rhs) / scale,
                tol,
                oracle="gaussian against quartic-damped kernel",
            ),
            CheckResult.from_residual(
                "xi_symmetry",
                self.name,
                xi_symmetry_residual(0.3 + 0.2j, config.t, sh, chi),
                1e-10,
                oracle="completed L-functions",
            ),
            self._contour_check(config.t, sh, chi, kernel),
        ]

    def _contour_check(self, t, sh, chi, kernel) -> CheckResult:
        x = np.array(CONTOUR_POINTS)
        batch = v_weight_many(x, t, sh, chi.parity, kernel)
        adaptive = [v_weight(float(xi), t, sh, chi.parity, kernel, self.quadrature()) for xi in x]
        worst = max(abs(b - a) for b, a in zip(batch, adaptive))
        return CheckResult.from_residual(
            "v_weight_contour", self.name, worst, CONTOUR_TOL, oracle="adaptive quadrature of V"
        )


def _voronoi_report(terms: VoronoiTerms) -> dict[str, object]:
    pieces = {
        "lhs": terms.lhs,
        "rhs_residue_term": terms.residue_term,
        "rhs_plus": terms.dual_plus,
        "rhs_minus": terms.dual_minus,
    }
    out: dict[str, object] = {key: [value.real, value.imag] for key, value in pieces.items()}
    out["residual"] = terms.residual
    return out


class VoronoiSuite(SuiteRunner):
    name = "voronoi"
    default_tolerance = 1e-6

    def checks(self, config: RunConfig, chi: DirichletCharacter) -> list[CheckResult]:
        tol = self.tolerance(config)
        sh = self.shifts(config, np.random.default_rng(config.seed))
        sh2 = (sh.alpha, sh.beta)
        center, width = config.window
        g = BumpFunction(center, width)
        terms = voronoi_terms(g, sh2, config.c, config.d, chi)
        out = [
            CheckResult.from_residual(
                "voronoi_summation",
                self.name,
                terms.residual / max(1.0, abs(terms.lhs)),
                tol,
                value=terms.rhs,
                reference=terms.lhs,
                oracle="direct divisor sum",
                details={"terms": _voronoi_report(terms), "dual_length": terms.dual_length, **terms.details},
            )
        ]
        for flag in ("drop_residue", "swap_kernels"):
            mutated = voronoi_terms(g, sh2, config.c, config.d, chi, **{flag: True})
            out.append(
                CheckResult.from_residual(
                    f"mutation:{flag}",
                    self.name,
                    mutated.residual / max(1.0, abs(mutated.lhs)),
                    MUTATION_FLOOR,
                    mode="above",
                    oracle="mutated right side must miss",
                )
            )
        if chi.primitive:
            s = complex(config.s)
            alpha_form = functional_e_residual(sh2, s, config.c, config.d, chi, "alpha")
            beta_form = functional_e_residual(sh2, s, config.c, config.d, chi, "beta")
            out.append(
                CheckResult.from_residual(
                    "e_functional_equation",
                    self.name,
                    alpha_form,
                    1e-9,
                    oracle="Hurwitz continuation of E and E~",
                    details={"theta_beta_residual": beta_form},
                )
            )
        return out


class DeltaSuite(SuiteRunner):
    name = "delta"
    default_tolerance = 1e-8

    def checks(self, config: RunConfig, chi: DirichletCharacter) -> list[CheckResult]:
        tol = self.tolerance(config)
        worst = max(delta_symbol_residual(n, DELTA_OMEGA) for n in range(-DELTA_RANGE, DELTA_RANGE + 1))
        nonzero = [
            (u, d)
            for u in range(0, int(DELTA_OMEGA**2) + 1, 37)
            for d in range(int(2 * DELTA_OMEGA), int(2 * DELTA_OMEGA) + 5)
            if not delta_vanishes(u, d, DELTA_OMEGA)
        ]
        return [
            CheckResult.from_residual(
                "delta_symbol", self.name, worst, tol, oracle="Kronecker delta", details={"Omega": DELTA_OMEGA}
            ),
            CheckResult.from_residual(
                "delta_support",
                self.name,
                float(len(nonzero)),
                0.5,
                oracle="Delta_d(u) = 0 for d >= 2 Omega",
                details={"nonzero": nonzero[:5]},
            ),
        ]
