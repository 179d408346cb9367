"""Command-line interface: exit codes, report text, config validation."""

import json
import os
import shutil

import pytest

from normtransport import cli, read_trace

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


def _cfg(name):
    return os.path.join(CONFIGS, name)


def test_check_code_passes(capsys):
    rc = cli.main(["check-code", "--config", _cfg("check_unary.json")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "unique" in out
    assert "self-avoiding" in out


def test_check_code_violation_exits_one(capsys):
    rc = cli.main(["check-code", "--config", _cfg("check_swap_pair.json")])
    out = capsys.readouterr().out
    assert rc == 1
    assert "VIOLATION" in out
    assert "witness replays: True" in out


def test_transport_forward_values(capsys):
    rc = cli.main(["transport", "--config", _cfg("transport_forward_unary_iid.json")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "0.40000000000000" in out
    assert "0.59999999999999" in out or "0.6" in out
    assert "canonicalized to start 1" in out
    assert "config: sha256=" in out


def test_transport_inverse_brackets(capsys):
    rc = cli.main(["transport", "--config", _cfg("transport_inverse_unary_iid.json")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "boundary" in out
    assert "0.4" in out


def test_transport_mixture_components(capsys):
    rc = cli.main(["transport", "--config", _cfg("transport_mixture.json")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "component" in out


def test_recurrence_command(capsys):
    rc = cli.main(["recurrence", "--config", _cfg("recurrence_two_state.json")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "P(C)" in out
    assert "0.1666666" in out
    assert "6.0" in out or "5.9999999" in out


def test_recurrence_trace_export(tmp_path, capsys):
    for name in ("recurrence_two_state.json", "model_two_state.json"):
        shutil.copy(_cfg(name), tmp_path / name)
    doc = json.loads((tmp_path / "recurrence_two_state.json").read_text())
    doc["trace_out"] = "trace.txt"
    doc["trace_gaps"] = 40
    (tmp_path / "cfg.json").write_text(json.dumps(doc))
    old = os.getcwd()
    os.chdir(tmp_path)
    try:
        rc = cli.main(["recurrence", "--config", str(tmp_path / "cfg.json")])
    finally:
        os.chdir(old)
    assert rc == 0
    trace, header = read_trace(str(tmp_path / "trace.txt"))
    assert trace.found_forward >= 41
    assert header["seed"] == "2026"


def test_suite_stationarity_passes(capsys):
    rc = cli.main(["suite", "--config", _cfg("suite_stationarity_markov3.json")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "PASS" in out


def test_suite_control_fails(capsys):
    rc = cli.main(["suite", "--config", _cfg("suite_control.json")])
    out = capsys.readouterr().out
    assert rc == 1
    assert "FAIL" in out


def test_out_file_matches_stdout(tmp_path, capsys):
    out_path = tmp_path / "report.txt"
    rc = cli.main(
        [
            "suite",
            "--config",
            _cfg("suite_stationarity_markov3.json"),
            "--out",
            str(out_path),
        ]
    )
    stdout = capsys.readouterr().out
    assert rc == 0
    assert out_path.read_text() == stdout


def test_reports_byte_identical_across_runs(tmp_path):
    paths = []
    for i in range(2):
        p = tmp_path / f"r{i}.txt"
        rc = cli.main(
            ["suite", "--config", _cfg("suite_stationarity_markov3.json"), "--out", str(p)]
        )
        assert rc == 0
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_seed_override_changes_report(tmp_path):
    base, alt = tmp_path / "a.txt", tmp_path / "b.txt"
    cfg = _cfg("recurrence_two_state.json")
    assert cli.main(["recurrence", "--config", cfg, "--out", str(base)]) == 0
    assert (
        cli.main(
            ["recurrence", "--config", cfg, "--seed", "7", "--out", str(alt)]
        )
        == 0
    )
    a, b = base.read_text(), alt.read_text()
    assert "seed: 7" in b and "seed: 2026" in a


def test_parse_error_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"format_version": 1,\n  "code": }\n')
    rc = cli.main(["check-code", "--config", str(bad)])
    err = capsys.readouterr().err
    assert rc == 2
    assert "parse error at line 2" in err


def test_unknown_key_reports_path(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"format_version": 1, "code": "x.json", "depht": 3}))
    rc = cli.main(["check-code", "--config", str(cfg)])
    err = capsys.readouterr().err
    assert rc == 2
    assert "$.depht" in err
    assert "unknown key" in err


def test_missing_config_is_usage_error(capsys):
    rc = cli.main(["check-code", "--config", "/nonexistent/cfg.json"])
    assert rc == 2


def test_unknown_suite_name(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    doc = {
        "format_version": 1,
        "suite": "nonsense",
        "code": os.path.abspath(_cfg("code_unary12.json")),
        "model": os.path.abspath(_cfg("model_iid_uniform12.json")),
    }
    cfg.write_text(json.dumps(doc))
    rc = cli.main(["suite", "--config", str(cfg)])
    err = capsys.readouterr().err
    assert rc == 2
    assert "suite" in err


def test_alphabet_mismatch_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    doc = {
        "format_version": 1,
        "suite": "stationarity",
        "code": os.path.abspath(_cfg("code_unary12.json")),
        "model": os.path.abspath(_cfg("model_markov3.json")),
    }
    cfg.write_text(json.dumps(doc))
    rc = cli.main(["suite", "--config", str(cfg)])
    assert rc == 2


def test_usage_error_without_config(capsys):
    rc = cli.main(["transport"])
    assert rc == 2
