"""Shared plumbing for the verification suites."""

from __future__ import annotations

import json
import logging
import math
import time
from pathlib import Path

import numpy as np

from .. import __version__
from ..afe import AFE_KERNEL
from ..characters import (
    DirichletCharacter,
    character_from_table,
    is_fundamental_discriminant,
    kronecker_character,
    principal_character,
)
from ..config import Settings, get_settings
from ..errors import ConfigError
from ..models import CheckResult, KernelSpec, QuadratureSpec, RunConfig, ShiftTuple, SuiteReport

logger = logging.getLogger(__name__)


def resolve_character(config: RunConfig) -> DirichletCharacter:
    """Kronecker character of D, a table file, or the real primitive character mod q."""
    if config.D is not None:
        return kronecker_character(config.D)
    if config.table_path is not None:
        path = Path(config.table_path)
        if not path.exists():
            raise ConfigError(f"table_path: {path} does not exist")
        data = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(data, dict):
            return DirichletCharacter.from_json(data)
        return character_from_table(int(config.q), [complex(*v) if isinstance(v, list) else v for v in data])
    if config.q is None:
        raise ConfigError("q: give D, q, or q with table_path")
    if config.q == 1:
        return principal_character(1)
    for D in (-config.q, config.q):
        if is_fundamental_discriminant(D):
            return kronecker_character(D)
    raise ConfigError(f"q: no real primitive character mod {config.q}; pass a table")


def resolve_shifts(
    config: RunConfig, rng: np.random.Generator, scale: float = 0.05, gap: float = 0.0
) -> ShiftTuple:
    """The configured shifts, or a seeded draw at least ``gap`` away from every pole."""
    if config.shifts is not None:
        return config.shifts
    sh = ShiftTuple.random(rng, scale)
    while sh.pole_gap() < gap:
        sh = ShiftTuple.random(rng, scale)
    return sh


def coprime_pairs(rng: np.random.Generator, count: int, top: int = 100) -> list[tuple[int, int]]:
    """Seeded coprime pairs (h, k) with 1 <= h, k <= top."""
    pairs: list[tuple[int, int]] = []
    while len(pairs) < count:
        h, k = (int(x) for x in rng.integers(1, top + 1, size=2))
        if math.gcd(h, k) == 1:
            pairs.append((h, k))
    return pairs


class SuiteRunner:
    """Times a suite, stamps it with the version and logs failing checks."""

    name = "suite"
    default_tolerance = 1e-10

    def __init__(self, settings: Settings | None = None) -> None:
        self.settings = settings or get_settings()

    def tolerance(self, config: RunConfig) -> float:
        return config.tol if config.tol is not None else self.default_tolerance

    def shifts(self, config: RunConfig, rng: np.random.Generator) -> ShiftTuple:
        return resolve_shifts(config, rng, gap=self.settings.shift_gap)

    def kernel(self) -> KernelSpec:
        """The gaussian AFE kernel with its width scaled by ``settings.kernel_scale``."""
        return AFE_KERNEL.model_copy(update={"scale": AFE_KERNEL.scale * self.settings.kernel_scale})

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(
            abs_tol=self.settings.abs_tol,
            rel_tol=self.settings.rel_tol,
            max_subdivisions=self.settings.max_subdivisions,
        )

    def checks(self, config: RunConfig, chi: DirichletCharacter) -> list[CheckResult]:
        raise NotImplementedError

    def run(self, config: RunConfig) -> SuiteReport:
        chi = resolve_character(config)
        logger.info("running %s suite (q=%d)", self.name, chi.q)
        start = time.perf_counter()
        checks = self.checks(config, chi)
        report = SuiteReport(
            suite=self.name,
            version=__version__,
            config=config.model_dump(mode="json"),
            checks=checks,
            elapsed_seconds=time.perf_counter() - start,
        )
        for check in checks:
            if not check.passed:
                logger.error(
                    "%s/%s failed: residual %.3e > %.1e", self.name, check.name, check.residual, check.tolerance
                )
        logger.info("%s suite: %d/%d checks passed", self.name, sum(c.passed for c in checks), len(checks))
        return report
