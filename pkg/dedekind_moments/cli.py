"""Command-line front end: ``python -m dedekind_moments.cli <command> [flags]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from pydantic import ValidationError

from .config import Settings, get_settings
from .errors import ConfigError, NonConvergenceError, NumericsError
from .logging_config import setup_logging
from .models import RunConfig, SuiteReport
from .services import ReportWriter, SuiteRunner, build_suites

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICS = 3

COMMAND_SUITES = {
    "identities": ("identities",),
    "afe": ("afe",),
    "voronoi": ("voronoi", "delta"),
    "sums": ("sums", "diagonal"),
    "moment": ("moment",),
    "mollified": ("moment",),
    "all": ("identities", "afe", "voronoi", "delta", "sums", "diagonal", "moment"),
}


def _pair(kind):
    def parse(text: str):
        parts = [p for p in text.split(",") if p.strip()]
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {text!r}")
        return [kind(p) for p in parts]

    return parse


def _shifts(text: str) -> dict[str, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("--shifts takes alpha,beta,gamma,delta")
    return dict(zip(("alpha", "beta", "gamma", "delta"), parts))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dedekind-moments",
        description="Verify the twisted second moment of zeta(s)L(s, chi) against brute-force oracles.",
    )
    parser.add_argument("command", choices=sorted(COMMAND_SUITES), help="Suite group to run.")
    parser.add_argument("--config", type=Path, help="JSON config merged under the flags.")
    parser.add_argument("--D", type=int, help="Fundamental discriminant of a Kronecker character.")
    parser.add_argument("--q", type=int, help="Modulus (alone, or with --table).")
    parser.add_argument("--table", dest="table_path", help="JSON character table file.")
    parser.add_argument("--shifts", type=_shifts, help="alpha,beta,gamma,delta as complex literals (0.01+0.001j).")
    parser.add_argument("--T", type=float, help="Height parameter of the weight.")
    parser.add_argument("--T0", type=float, help="Transition width of the weight.")
    parser.add_argument("--h", type=int)
    parser.add_argument("--k", type=int)
    parser.add_argument("--t", type=float, help="Height for the AFE identity.")
    parser.add_argument("--s", help="Complex point for the sum formulas.")
    parser.add_argument("--d", type=int, help="Denominator for Voronoi summation.")
    parser.add_argument("--c", type=int, help="Numerator for Voronoi summation.")
    parser.add_argument("--window", type=_pair(float), help="center,width of the test window.")
    parser.add_argument("--ij", type=_pair(int), help="Which U_ij sum, e.g. 1,2.")
    parser.add_argument("--rmax", type=int, help="Brute-force r truncation.")
    parser.add_argument("--dmax", type=int, help="Brute-force d truncation.")
    parser.add_argument("--mnmax", type=int, help="AFE product truncation.")
    parser.add_argument("--tol", type=float, help="Override the suite tolerance.")
    parser.add_argument("--threads", type=int, help="Worker threads for the moment oracle.")
    parser.add_argument("--seed", type=int, help="Seed for random shifts and pairs.")
    parser.add_argument("--out", help="Report file, or a directory for per-suite JSON lines.")
    parser.add_argument("--fmt", choices=["json", "jsonl", "csv"], help="Report format.")
    parser.add_argument("--coeffs", dest="coeffs_path", help="Mollifier coefficients (JSON).")
    parser.add_argument("--samples", dest="samples_path", help="CSV of oracle integrand samples.")
    parser.add_argument("--log-level", default=None, help="Overrides LOG_LEVEL.")
    return parser


def merge_config(args: argparse.Namespace, settings: Settings) -> dict[str, Any]:
    """Settings defaults, then the --config file, then explicit flags."""
    merged: dict[str, Any] = {"threads": settings.threads, "seed": settings.default_seed}
    if args.config is not None:
        if not args.config.exists():
            raise ConfigError(f"config: {args.config} does not exist")
        data = json.loads(args.config.read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ConfigError("config: expected a JSON object")
        merged.update(data)
    flags = {
        key: value
        for key, value in vars(args).items()
        if value is not None and key not in {"config", "log_level"}
    }
    merged.update(flags)
    return merged


def run(
    config: RunConfig,
    settings: Settings | None = None,
    suites: dict[str, SuiteRunner] | None = None,
) -> tuple[int, list[SuiteReport]]:
    """Run every suite of ``config.command`` and return (exit status, reports)."""
    settings = settings or get_settings()
    suites = suites if suites is not None else build_suites(settings)
    reports: list[SuiteReport] = []
    for name in COMMAND_SUITES[config.command]:
        reports.append(suites[name].run(config))
    status = EXIT_OK if all(report.passed for report in reports) else EXIT_FAILED
    return status, reports


def emit(config: RunConfig, reports: list[SuiteReport], stream=None, settings: Settings | None = None) -> None:
    """Write reports to ``config.out`` (relative paths land under the report dir) or to stdout."""
    if config.out is not None:
        target = Path(config.out)
        if not target.is_absolute():
            target = (settings or get_settings()).report_path / target
        for path in ReportWriter(target, config.fmt).write(reports):
            logger.info("report written to %s", path)
        return
    stream = stream or sys.stdout
    if config.fmt == "csv":
        stream.write(ReportWriter.render_csv(reports))
    elif config.fmt == "jsonl":
        stream.write("".join(ReportWriter.render_lines(report) for report in reports))
    else:
        stream.write(ReportWriter.render_json(reports) + "\n")


def main(argv: Sequence[str] | None = None, suites: dict[str, SuiteRunner] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)
    settings = get_settings()

    try:
        config = RunConfig.model_validate(merge_config(args, settings))
    except ValidationError as exc:
        for error in exc.errors():
            field = ".".join(str(part) for part in error["loc"]) or "config"
            logger.error("invalid %s: %s", field, error["msg"])
        return EXIT_CONFIG
    except (ConfigError, json.JSONDecodeError) as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG

    try:
        status, reports = run(config, settings, suites)
    except NonConvergenceError as exc:
        logger.error("numerics did not converge: %s", exc)
        return EXIT_NUMERICS
    except ValueError as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG
    except NumericsError as exc:
        logger.error("numerics failed: %s", exc)
        return EXIT_NUMERICS

    emit(config, reports, settings=settings)
    return status


if __name__ == "__main__":
    sys.exit(main())
