"""Suite runners and the report writer."""

from .analytic import AfeSuite, DeltaSuite, VoronoiSuite
from .base import SuiteRunner, resolve_character
from .identities import IdentitySuite
from .moment import MomentSuite, load_coefficients
from .reports import ReportWriter
from .sums import DiagonalSuite, SumsSuite

SUITES = {
    "identities": IdentitySuite,
    "afe": AfeSuite,
    "voronoi": VoronoiSuite,
    "delta": DeltaSuite,
    "sums": SumsSuite,
    "diagonal": DiagonalSuite,
    "moment": MomentSuite,
}


def build_suites(settings=None) -> dict[str, SuiteRunner]:
    return {name: cls(settings) for name, cls in SUITES.items()}


__all__ = [
    "AfeSuite",
    "DeltaSuite",
    "DiagonalSuite",
    "IdentitySuite",
    "MomentSuite",
    "ReportWriter",
    "SumsSuite",
    "SuiteRunner",
    "VoronoiSuite",
    "SUITES",
    "build_suites",
    "load_coefficients",
    "resolve_character",
]
