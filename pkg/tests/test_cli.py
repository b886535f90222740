import json

from dedekind_moments.cli import EXIT_CONFIG, EXIT_FAILED, EXIT_NUMERICS, EXIT_OK, main
from dedekind_moments.errors import DomainError, NonConvergenceError, TruncationError


def test_passing_run_prints_json(make_stub_suites, capsys):
    suites = make_stub_suites()
    assert main(["identities", "--D", "-3"], suites=suites) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["suite"] == "identities"
    assert payload["checks"][0]["passed"] is True
    assert suites["identities"].calls[0].D == -3


def test_failed_check_sets_exit_status(make_stub, make_stub_suites, capsys):
    suites = make_stub_suites(delta=make_stub("delta", fail=True))
    assert main(["voronoi", "--D", "-4"], suites=suites) == EXIT_FAILED
    payload = json.loads(capsys.readouterr().out)
    assert [r["suite"] for r in payload] == ["voronoi", "delta"]


def test_command_groups_run_their_suites(make_stub_suites, capsys):
    suites = make_stub_suites()
    assert main(["all", "--q", "5", "--fmt", "csv"], suites=suites) == EXIT_OK
    rows = capsys.readouterr().out.splitlines()
    assert len(rows) == 8
    assert all(len(suite.calls) == 1 for suite in suites.values())


def test_invalid_config_exits_with_config_status(make_stub_suites, caplog):
    suites = make_stub_suites()
    assert main(["identities", "--D", "-3", "--q", "4"], suites=suites) == EXIT_CONFIG
    assert "invalid" in caplog.text
    assert main(["mollified", "--D", "-3"], suites=suites) == EXIT_CONFIG
    assert main(["sums", "--D", "-3", "--ij", "1,3"], suites=suites) == EXIT_CONFIG
    assert not suites["identities"].calls


def test_missing_config_file(make_stub_suites, tmp_path):
    argv = ["identities", "--config", str(tmp_path / "absent.json")]
    assert main(argv, suites=make_stub_suites()) == EXIT_CONFIG


def test_config_file_merges_under_flags(make_stub_suites, tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"D": -4, "T": 500.0, "h": 2, "k": 3}))
    suites = make_stub_suites()
    assert main(["moment", "--config", str(path), "--T", "800"], suites=suites) == EXIT_OK
    config = suites["moment"].calls[0]
    assert config.D == -4
    assert config.T == 800.0
    assert (config.h, config.k) == (2, 3)
    capsys.readouterr()


def test_shift_flag_is_parsed(make_stub_suites, capsys):
    suites = make_stub_suites()
    argv = ["moment", "--D", "-3", "--shifts", "0.01+0.001j,0.02,-0.01j,0.03"]
    assert main(argv, suites=suites) == EXIT_OK
    shifts = suites["moment"].calls[0].shifts
    assert shifts.alpha == 0.01 + 0.001j
    assert shifts.gamma == -0.01j
    capsys.readouterr()


def test_numeric_failures_exit_with_numerics_status(make_stub, make_stub_suites):
    for error in (NonConvergenceError("quadrature stalled"), TruncationError("mn_max too small")):
        suites = make_stub_suites(afe=make_stub("afe", error=error))
        assert main(["afe", "--q", "5"], suites=suites) == EXIT_NUMERICS


def test_precondition_failures_exit_with_config_status(make_stub, make_stub_suites):
    suites = make_stub_suites(afe=make_stub("afe", error=DomainError("t outside the window")))
    assert main(["afe", "--q", "5"], suites=suites) == EXIT_CONFIG


def test_out_directory_gets_suite_lines(make_stub_suites, tmp_path, capsys):
    target = tmp_path / "reports"
    argv = ["sums", "--D", "-3", "--out", str(target), "--fmt", "jsonl"]
    assert main(argv, suites=make_stub_suites()) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert sorted(p.name for p in target.iterdir()) == ["diagonal.jsonl", "sums.jsonl"]
    row = json.loads((target / "sums.jsonl").read_text().splitlines()[0])
    assert row["name"] == "sums_stub"
