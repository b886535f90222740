"""Off-diagonal sum formulas and the diagonal closed form."""

from __future__ import annotations

import logging

import numpy as np

from ..characters import DirichletCharacter
from ..models import CheckResult, RunConfig, ShiftTuple, SumTruncation
from ..moment import diagonal_brute, diagonal_closed, j_term_contour, j_terms
from ..offdiag import u_21_by_swap, u_ij_brute, u_ij_closed, u_ij_factors
from .base import SuiteRunner

logger = logging.getLogger(__name__)

SUM_FLOOR = 1e-5
DIAGONAL_TOLERANCE = 1e-2
CONTOUR_TOLERANCE = 1e-8


def _complex_pairs(values: dict[str, complex]) -> dict[str, list[float]]:
    return {name: [complex(v).real, complex(v).imag] for name, v in values.items()}


class SumsSuite(SuiteRunner):
    name = "sums"
    default_tolerance = SUM_FLOOR

    def checks(self, config: RunConfig, chi: DirichletCharacter) -> list[CheckResult]:
        i, j = config.ij
        sh = self.shifts(config, np.random.default_rng(config.seed))
        s = complex(config.s)
        trunc = SumTruncation(r_max=config.rmax, d_max=config.dmax)
        brute, used = u_ij_brute(i, j, config.h, config.k, chi, sh, s, trunc)
        closed = u_ij_closed(i, j, config.h, config.k, chi, sh, s)
        tol = max(self.tolerance(config), 10 * used.tail_bound)
        out = [
            CheckResult.from_residual(
                f"U{i}{j}",
                self.name,
                abs(brute - closed),
                tol,
                value=closed,
                reference=brute,
                oracle="truncated double sum over r and d",
                details={
                    "tail_bound": used.tail_bound,
                    "factors": _complex_pairs(u_ij_factors(i, j, config.h, config.k, chi, sh, s)),
                },
            )
        ]
        if (i, j) == (2, 1):
            swapped = u_21_by_swap(config.h, config.k, chi, sh, s)
            out.append(
                CheckResult.from_residual(
                    "U21_swap", self.name, abs(swapped - closed), 1e-10, oracle="U12 under the swap"
                )
            )
        return out


class DiagonalSuite(SuiteRunner):
    name = "diagonal"
    default_tolerance = DIAGONAL_TOLERANCE

    def checks(self, config: RunConfig, chi: DirichletCharacter) -> list[CheckResult]:
        spec = config.weight()
        sh = config.shifts or ShiftTuple.generic(config.T)
        h, k = config.h, config.k
        closed = diagonal_closed(h, k, sh, chi, spec)
        brute = diagonal_brute(h, k, sh, chi, spec)
        out = [
            CheckResult.from_residual(
                "diagonal_closed_form",
                self.name,
                abs(closed - brute) / max(abs(brute), 1e-300),
                self.tolerance(config),
                value=closed,
                reference=brute,
                oracle="diagonal of both AFE sums",
                details={"T": spec.T, "T0": spec.T0},
            )
        ]
        formulas = j_terms(h, k, sh, chi, spec)
        for name, value in formulas.items():
            contour = j_term_contour(h, k, sh, chi, spec, name)
            out.append(
                CheckResult.from_residual(
                    f"residue:{name}",
                    self.name,
                    abs(value - contour) / max(abs(value), 1e-300),
                    CONTOUR_TOLERANCE,
                    value=value,
                    reference=contour,
                    oracle="trapezoidal rule on a small circle",
                )
            )
        return out
