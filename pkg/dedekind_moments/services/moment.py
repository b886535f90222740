"""Oracle comparison, bridge checks and the mollified assembly."""

from __future__ import annotations

import json
import logging
from pathlib import Path

from ..characters import DirichletCharacter
from ..errors import ConfigError
from ..models import CheckResult, RunConfig, ShiftTuple
from ..moment import (
    cancellation_residuals,
    compare,
    mollified_leading_coefficient,
    mollified_main,
    off_diagonal_bridge_residual,
)
from .base import SuiteRunner

logger = logging.getLogger(__name__)

COMPARE_TOLERANCE = 0.15
LEADING_TOLERANCE = 0.10
BRIDGE_TOLERANCE = 1e-8


def load_coefficients(path: str | Path) -> list[tuple[int, complex]]:
    """Read [[n, a(n)], ...] or {"n": a(n)} where a(n) is a number or [re, im]."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"coeffs_path: {path} does not exist")
    data = json.loads(path.read_text(encoding="utf-8"))
    items = data.items() if isinstance(data, dict) else data
    coeffs = []
    for n, value in items:
        if isinstance(value, (list, tuple)):
            value = complex(value[0], value[1])
        coeffs.append((int(n), complex(value)))
    if not coeffs:
        raise ConfigError("coeffs_path: no coefficients")
    return coeffs


class MomentSuite(SuiteRunner):
    name = "moment"
    default_tolerance = COMPARE_TOLERANCE

    def checks(self, config: RunConfig, chi: DirichletCharacter) -> list[CheckResult]:
        if config.command == "mollified":
            return self._mollified(config, chi)
        spec = config.weight()
        sh = config.shifts or ShiftTuple.generic(config.T)
        h, k = config.h, config.k
        threads = config.threads or self.settings.threads
        report = compare(h, k, sh, chi, spec, threads=threads, samples_path=config.samples_path)
        out = [
            CheckResult.from_residual(
                "moment_main_term",
                self.name,
                report.relative_residual,
                self.tolerance(config),
                value=report.main_term,
                reference=report.oracle,
                oracle="Gauss-Legendre integral of zeta L zeta L",
                details={"report": report.model_dump(mode="json")},
            ),
            CheckResult.from_residual(
                "off_diagonal_bridge",
                self.name,
                off_diagonal_bridge_residual(h, k, sh, chi, spec),
                BRIDGE_TOLERANCE,
                oracle="Z terms minus J terms",
            ),
        ]
        for name, residual in cancellation_residuals(h, k, sh, chi, spec).items():
            out.append(CheckResult.from_residual(f"cancel:{name}", self.name, residual, 1e-10, oracle="R against J"))
        return out

    def _mollified(self, config: RunConfig, chi: DirichletCharacter) -> list[CheckResult]:
        coeffs = load_coefficients(config.coeffs_path)
        spec = config.weight()
        value = mollified_main(coeffs, chi, spec, config.shifts)
        lead = mollified_leading_coefficient(coeffs, chi, spec)
        return [
            CheckResult.from_residual(
                "mollified_leading_coefficient",
                self.name,
                lead.relative_error,
                config.tol if config.tol is not None else LEADING_TOLERANCE,
                value=lead.estimate,
                reference=lead.expected,
                oracle="sum of c_2(h, k) over the mollifier",
                details={
                    "mollified_main": [value.real, value.imag],
                    "per_scale": {str(scale): c for scale, c in lead.per_scale.items()},
                },
            )
        ]
