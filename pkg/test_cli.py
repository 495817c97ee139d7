import json

import pytest

from chi_index.cli import (
    EXIT_CHECK_FAILED,
    EXIT_COMPUTATION,
    EXIT_OK,
    EXIT_USAGE,
    emit_report,
    main,
    parse_args,
    write_report,
)
from chi_index.checks import CheckResult
from chi_index.errors import PreconditionError, ReportWriteError, UsageError
from chi_index.fieldspec import quotient_structure, rational_field, real_cyclotomic_field
from chi_index.search import SearchConfig, build_report, full_run

SMALL = ["--ell-bound", "2000", "--n-max", "1", "--primes-per-level", "2", "--workers", "1"]


def test_parse_field_q():
    config = parse_args(["--field", "Q", "--p", "5", "--r", "3"])
    assert config.field == rational_field(5)
    assert config.field.degree == 1
    assert config.characters is None


def test_parse_conductor_and_subgroup():
    config = parse_args(["--conductor", "5", "--subgroup", "4", "--p", "3", "--r", "3"])
    assert config.field == real_cyclotomic_field(5, 3)
    assert config.field.degree == 2


def test_parse_real_cyclotomic_shorthand():
    config = parse_args(["--field", "real-cyclotomic:13", "--p", "3", "--r", "5", "--ell-bound", "500"])
    assert config.field.degree == 6
    assert config.search.ell_bound == 500


@pytest.mark.parametrize("argv, message", [
    (["--field", "Q", "--p", "2", "--r", "3"], "p must be an odd prime"),
    (["--field", "Q", "--p", "9", "--r", "3"], "p must be an odd prime"),
    (["--field", "Q", "--p", "3", "--r", "4"], "r must be odd"),
    (["--field", "Q", "--r", "3"], "--p and --r are required"),
    (["--field", "Q", "--conductor", "5", "--p", "3", "--r", "3"], "cannot be combined"),
    (["--field", "cubic", "--p", "3", "--r", "3"], "unknown field shorthand"),
    (["--p", "3", "--r", "3"], "give --field"),
])
def test_parse_errors(argv, message):
    with pytest.raises(UsageError, match=message):
        parse_args(argv)


def test_imaginary_subgroup_is_a_usage_error():
    with pytest.raises(UsageError):
        parse_args(["--conductor", "5", "--p", "3", "--r", "3"])


def test_level_precondition_is_a_usage_error():
    with pytest.raises(UsageError):
        parse_args(["--field", "real-cyclotomic:9", "--p", "3", "--r", "3", "--n-max", "1"])


def test_char_selection():
    config = parse_args(["--field", "real-cyclotomic:16", "--p", "3", "--r", "3", "--char", "1"])
    (chi,) = config.characters
    assert chi.order == 4
    with pytest.raises(UsageError):
        parse_args(["--field", "real-cyclotomic:16", "--p", "3", "--r", "3", "--char", "1,2"])


def test_emit_report_json_schema():
    field = real_cyclotomic_field(5, 3)
    reports = full_run(field, 3, SearchConfig(ell_bound=2000, n_max=1, primes_per_level=2, workers=1))
    document = json.loads(emit_report(reports, field, 3))
    assert document["p"] == 3 and document["r"] == 3
    assert len(document["classes"]) == 2
    for entry in document["classes"]:
        assert set(entry) == {"character", "upper_bound_valuation", "stabilized", "witness", "candidates"}
        assert set(entry["character"]) == {"order", "exponents", "qp_degree"}
        for record in entry["candidates"]:
            assert set(record) == {"ell", "n", "ire", "ima", "accepted"}
    rebuilt = quotient_structure(document["field"]["conductor"], document["field"]["subgroup"], 3)
    assert rebuilt == field


def test_emit_report_single_class():
    field = rational_field(3)
    reports = full_run(field, 3, SearchConfig(ell_bound=100, n_max=1, primes_per_level=3, workers=1))
    document = json.loads(emit_report(reports, field, 3))
    assert len(document["classes"]) == 1
    assert document["classes"][0]["upper_bound_valuation"] == 0
    assert document["classes"][0]["witness"] == {"ell": 7, "n": 1}


def test_emit_report_without_accepted_candidates():
    field = rational_field(3)
    (cls,) = [report.character_class for report in full_run(field, 3, SearchConfig(ell_bound=6, n_max=1))]
    document = json.loads(emit_report([build_report(cls, [], 2)], field, 3))
    entry = document["classes"][0]
    assert entry["upper_bound_valuation"] is None
    assert entry["stabilized"] is False
    assert entry["witness"] is None


def test_emit_report_table_and_unknown_format():
    field = rational_field(3)
    reports = full_run(field, 3, SearchConfig(ell_bound=100, n_max=1, primes_per_level=3, workers=1))
    table = emit_report(reports, field, 3, "table")
    assert "bound" in table and "ell=7 n=1" in table
    with pytest.raises(PreconditionError):
        emit_report(reports, field, 3, "yaml")


def test_write_report_error(tmp_path):
    with pytest.raises(ReportWriteError):
        write_report("{}", tmp_path / "missing" / "report.json")


def test_main_prints_json(capsys):
    code = main(["--field", "Q", "--p", "3", "--r", "3", "--json", *SMALL])
    assert code == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["classes"][0]["upper_bound_valuation"] == 0


def test_main_writes_the_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["--field", "real-cyclotomic:5", "--p", "3", "--r", "3", "--out", str(out), *SMALL])
    assert code == EXIT_OK
    assert "stabilized" in capsys.readouterr().out
    assert len(json.loads(out.read_text())["classes"]) == 2


def test_main_usage_error(capsys):
    assert main(["--field", "Q", "--p", "2", "--r", "3"]) == EXIT_USAGE
    assert "p must be an odd prime" in capsys.readouterr().err


def test_main_reports_write_failures(tmp_path, capsys):
    out = tmp_path / "missing" / "report.json"
    code = main(["--field", "Q", "--p", "3", "--r", "3", "--json", "--out", str(out), *SMALL])
    assert code == EXIT_COMPUTATION
    assert json.loads(capsys.readouterr().out)["kind"] == "ReportWriteError"


def test_main_check_exit_codes(monkeypatch, capsys):
    monkeypatch.setattr("chi_index.cli.run_checks", lambda: [CheckResult("dlog", True)])
    assert main(["--check"]) == EXIT_OK
    monkeypatch.setattr("chi_index.cli.run_checks", lambda: [CheckResult("dlog", False, "ell=7")])
    assert main(["--check"]) == EXIT_CHECK_FAILED
    assert "dlog: FAILED ell=7" in capsys.readouterr().out


def test_processes_flag():
    assert not parse_args(["--field", "Q", "--p", "3", "--r", "3"]).search.processes
    config = parse_args(["--field", "Q", "--p", "3", "--r", "3", "--processes", "--workers", "2"])
    assert config.search.processes and config.search.workers == 2
