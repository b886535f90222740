import json

import numpy as np
import pytest

from dedekind_moments.cli import emit
from dedekind_moments.config import Settings
from dedekind_moments.errors import ConfigError, TruncationError
from dedekind_moments.models import RunConfig, ShiftTuple
from dedekind_moments.services import (
    AfeSuite,
    DeltaSuite,
    IdentitySuite,
    ReportWriter,
    SumsSuite,
    VoronoiSuite,
    build_suites,
    load_coefficients,
    resolve_character,
)
from dedekind_moments.services.base import coprime_pairs


def test_resolve_character_routes():
    assert resolve_character(RunConfig(D=-3)).q == 3
    assert resolve_character(RunConfig(q=4)).parity == 1
    assert resolve_character(RunConfig(q=5)).parity == 0
    assert resolve_character(RunConfig(q=1)).q == 1
    with pytest.raises(ConfigError):
        resolve_character(RunConfig(q=9))
    with pytest.raises(ConfigError):
        resolve_character(RunConfig())


def test_resolve_character_from_table(tmp_path):
    path = tmp_path / "quartic.json"
    path.write_text(json.dumps({"q": 5, "values": [0, 1, [0, 1], [0, -1], -1]}))
    chi = resolve_character(RunConfig(q=5, table_path=str(path)))
    assert not chi.is_real
    assert abs(chi(2) - 1j) < 1e-15
    with pytest.raises(ConfigError):
        resolve_character(RunConfig(q=5, table_path=str(tmp_path / "missing.json")))


def test_run_config_rejects_inconsistent_fields():
    with pytest.raises(ValueError):
        RunConfig(D=-3, q=4)
    with pytest.raises(ValueError):
        RunConfig(command="mollified", D=-3)
    with pytest.raises(ValueError):
        RunConfig(ij=(1, 3))


def test_coprime_pairs_are_seeded():
    first = coprime_pairs(np.random.default_rng(7), 5)
    second = coprime_pairs(np.random.default_rng(7), 5)
    assert first == second
    assert all(np.gcd(h, k) == 1 for h, k in first)


def test_load_coefficients(tmp_path):
    listed = tmp_path / "list.json"
    listed.write_text(json.dumps([[1, 1.0], [2, -1.0], [3, [0.5, 0.25]]]))
    assert load_coefficients(listed) == [(1, 1 + 0j), (2, -1 + 0j), (3, 0.5 + 0.25j)]
    mapped = tmp_path / "map.json"
    mapped.write_text(json.dumps({"1": 1, "6": -0.5}))
    assert load_coefficients(mapped) == [(1, 1 + 0j), (6, -0.5 + 0j)]
    with pytest.raises(ConfigError):
        load_coefficients(tmp_path / "nothing.json")


def test_build_suites_covers_every_group(test_settings):
    suites = build_suites(test_settings)
    assert set(suites) == {"identities", "afe", "voronoi", "delta", "sums", "diagonal", "moment"}
    assert all(suite.settings is test_settings for suite in suites.values())


@pytest.mark.parametrize("D", [-3, pytest.param(-4, marks=pytest.mark.slow), pytest.param(5, marks=pytest.mark.slow)])
def test_identity_suite_passes(D, test_settings):
    report = IdentitySuite(test_settings).run(RunConfig(D=D, seed=42))
    assert report.suite == "identities"
    assert report.config["D"] == D
    failed = [c.name for c in report.checks if not c.passed]
    assert not failed
    assert all(c.oracle for c in report.checks)


@pytest.mark.slow
def test_identity_suite_is_deterministic(test_settings):
    suite = IdentitySuite(test_settings)
    first = suite.run(RunConfig(D=-4, seed=3))
    second = suite.run(RunConfig(D=-4, seed=3))
    strip = lambda r: r.model_dump(mode="json", exclude={"elapsed_seconds"})  # noqa: E731
    assert strip(first) == strip(second)


def test_delta_suite_passes(test_settings):
    report = DeltaSuite(test_settings).run(RunConfig(q=3))
    assert report.passed


def test_afe_suite_passes(test_settings):
    report = AfeSuite(test_settings).run(RunConfig(q=5, t=50.0))
    assert report.passed
    assert {c.name for c in report.checks} == {
        "afe_identity",
        "afe_kernel_independence",
        "xi_symmetry",
        "v_weight_contour",
    }
    terms = report.checks[0].details["terms"]
    assert {"lhs", "first_sum", "second_sum", "x_factor", "mn_max", "tail_bound"} <= set(terms)
    assert len(terms["x_factor"]) == 2


def test_voronoi_suite_on_wide_window(test_settings):
    config = RunConfig(D=-3, d=3, s=0.3 + 2.0j, window=(500.0, 50.0), shifts=ShiftTuple(alpha=0.01, beta=0.03))
    report = VoronoiSuite(test_settings).run(config)
    assert report.passed
    summation = report.checks[0]
    assert summation.name == "voronoi_summation"
    terms = summation.details["terms"]
    assert set(terms) == {"lhs", "rhs_residue_term", "rhs_plus", "rhs_minus", "residual"}
    rhs = sum(complex(*terms[key]) for key in ("rhs_residue_term", "rhs_plus", "rhs_minus"))
    assert abs(rhs - complex(*terms["lhs"])) == pytest.approx(terms["residual"], abs=1e-8)


def test_afe_suite_reports_truncation(test_settings):
    with pytest.raises(TruncationError):
        AfeSuite(test_settings).run(RunConfig(q=5, t=50.0, mnmax=40))


@pytest.mark.slow
def test_sums_suite_u21_includes_swap_check(test_settings):
    config = RunConfig(D=-3, ij=(2, 1), h=1, k=3, s=1.5, rmax=3000, dmax=3000)
    report = SumsSuite(test_settings).run(config)
    names = [c.name for c in report.checks]
    assert names == ["U21", "U21_swap"]
    assert report.passed


def _report(make_stub, name="identities", fail=False):
    return make_stub(name, fail=fail).run(RunConfig(D=-3))


def test_report_writer_json_and_csv(tmp_path, make_stub):
    reports = [_report(make_stub), _report(make_stub, "afe", fail=True)]
    json_path = tmp_path / "out.json"
    ReportWriter(json_path, "json").write(reports)
    payload = json.loads(json_path.read_text())
    assert [r["suite"] for r in payload] == ["identities", "afe"]
    assert payload[1]["checks"][0]["passed"] is False

    csv_path = tmp_path / "out.csv"
    ReportWriter(csv_path, "csv").write(reports)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "suite,name,residual,tolerance,passed,oracle"
    assert lines[2].startswith("afe,afe_stub,")


def test_report_writer_appends_lines_per_suite(tmp_path, make_stub):
    target = tmp_path / "reports"
    writer = ReportWriter(target, "jsonl")
    writer.write([_report(make_stub)])
    writer.write([_report(make_stub)])
    lines = (target / "identities.jsonl").read_text().splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0])["name"] == "identities_stub"


def test_suite_runner_reads_settings(tmp_path):
    settings = Settings(report_dir=str(tmp_path), shift_gap=0.02, kernel_scale=0.5, abs_tol=1e-9)
    runner = AfeSuite(settings)
    assert runner.kernel().scale == 2.0
    assert runner.quadrature().abs_tol == 1e-9
    rng = np.random.default_rng(11)
    assert all(runner.shifts(RunConfig(), rng).pole_gap() >= 0.02 for _ in range(20))
    explicit = ShiftTuple.of(0.001, 0.0, -0.001, 0.0)
    assert runner.shifts(RunConfig(shifts=explicit), rng) == explicit


def test_relative_out_lands_in_report_dir(tmp_path, make_stub):
    settings = Settings(report_dir=str(tmp_path / "reports"))
    emit(RunConfig(D=-3, out="run.json"), [_report(make_stub)], settings=settings)
    payload = json.loads((tmp_path / "reports" / "run.json").read_text())
    assert payload["suite"] == "identities"
