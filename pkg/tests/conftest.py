import os

os.environ.setdefault("TESTING", "1")

import numpy as np
import pytest
from fastapi.testclient import TestClient

from dedekind_moments import __version__
from dedekind_moments.characters import character_from_table, kronecker_character
from dedekind_moments.config import Settings
from dedekind_moments.main import create_app
from dedekind_moments.models import CheckResult, ShiftTuple, SuiteReport


class StubSuite:
    """Returns a canned report; ``fail`` or ``error`` steer the outcome."""

    def __init__(self, name, fail=False, error=None):
        self.name = name
        self.fail = fail
        self.error = error
        self.calls = []

    def run(self, config):
        self.calls.append(config)
        if self.error is not None:
            raise self.error
        residual = 1.0 if self.fail else 1e-14
        return SuiteReport(
            suite=self.name,
            version=__version__,
            config=config.model_dump(mode="json"),
            checks=[CheckResult.from_residual(f"{self.name}_stub", self.name, residual, 1e-10, oracle="stub")],
        )


def stub_suites(**overrides):
    names = ("identities", "afe", "voronoi", "delta", "sums", "diagonal", "moment")
    suites = {name: StubSuite(name) for name in names}
    suites.update(overrides)
    return suites


@pytest.fixture(scope="session")
def chi_m3():
    return kronecker_character(-3)


@pytest.fixture(scope="session")
def chi_m4():
    return kronecker_character(-4)


@pytest.fixture(scope="session")
def chi_5():
    return kronecker_character(5)


@pytest.fixture(scope="session")
def chi_quartic():
    # 2 generates (Z/5)^*, chi(2) = i
    return character_from_table(5, [0, 1, 1j, -1j, -1], label="quartic mod 5")


@pytest.fixture()
def rng():
    return np.random.default_rng(42)


@pytest.fixture()
def shifts(rng):
    return [ShiftTuple.random(rng, 0.05) for _ in range(3)]


@pytest.fixture()
def generic_shift():
    return ShiftTuple.generic(1000.0)


@pytest.fixture()
def test_settings(tmp_path):
    return Settings(testing=True, report_dir=str(tmp_path / "reports"), threads=1)


@pytest.fixture()
def test_app(test_settings):
    os.environ["TESTING"] = "1"
    app = create_app(settings_override=test_settings, suites_override=stub_suites())
    with TestClient(app) as client:
        yield client


@pytest.fixture()
def make_stub():
    return StubSuite


@pytest.fixture()
def make_stub_suites():
    return stub_suites
