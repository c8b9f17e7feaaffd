import json
import subprocess
import sys
from pathlib import Path

import pytest

from qlattice.cli import ConfigError, main, run_command, run_suite

ROOT = Path(__file__).resolve().parents[1]
SCHEMA_KEYS = {"name", "verdict", "residual_term_count", "cut", "details"}


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None), out


def test_serre_passes(capsys):
    code, rep, _ = _run(capsys, ["serre", "--preset", "sl3", "--sites", "2"])
    assert code == 0
    assert rep["command"] == "serre"
    assert len(rep["checks"]) == 1 and rep["checks"][0]["verdict"] == "pass"


def test_volkov_two_point_passes(capsys):
    code, rep, _ = _run(capsys, ["volkov", "two-point", "--order", "12"])
    assert code == 0
    names = {c["name"]: c["verdict"] for c in rep["checks"]}
    assert names["two-point-closed-equals-recursion"] == "pass"


def test_failing_check_exits_one(capsys):
    code, rep, _ = _run(capsys, ["volkov", "three-point", "--order", "3"])
    assert code == 1
    assert any(c["verdict"] == "fail" for c in rep["checks"])


@pytest.mark.parametrize(
    "argv",
    [
        ["serre", "--preset", "nope", "--sites", "2"],
        ["serre"],
        [],
        ["virasoro", "check", "--preset", "serre-compat-plus"],
        ["virasoro", "check", "--expr", "x1 +"],
        ["virasoro", "check", "--preset", "inverse-pair", "--expr", "x1"],
        ["nilpotency", "--N", "0", "--sites", "2"],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    code = main(argv)
    capsys.readouterr()
    assert code == 2


def test_report_schema(capsys):
    for argv in (["nilpotency", "--N", "3", "--sites", "2"], ["normalize", "--expr", "x1-x2"],
                 ["classical", "hw", "--expr", "x1^(1/2)*x2^(-1/2)*(x1+x2)^(-1/2)"]):
        _, rep, _ = _run(capsys, argv)
        assert set(rep) == {"command", "config_digest", "checks"}
        for c in rep["checks"]:
            assert set(c) == SCHEMA_KEYS
            assert c["verdict"] in ("pass", "fail")


def test_normalize_reports_parse_errors(capsys):
    code, rep, _ = _run(capsys, ["normalize", "--expr", "x1 + + x2"])
    assert code == 1
    d = rep["checks"][0]["details"]
    assert (d["line"], d["column"]) == (1, 6)


def test_reports_are_byte_stable(capsys):
    argv = ["virasoro", "check", "--preset", "inverse-pair", "--depth", "4"]
    _, _, a = _run(capsys, argv)
    _, _, b = _run(capsys, argv)
    assert a == b


def test_digest_tracks_semantic_fields():
    a = run_command("nilpotency", {"N": 2, "sites": 2})["config_digest"]
    b = run_command("nilpotency", {"N": 2, "sites": 2})["config_digest"]
    c = run_command("nilpotency", {"N": 2, "sites": 3})["config_digest"]
    assert a == b != c


def test_depth_from_environment(monkeypatch):
    monkeypatch.setenv("QLATTICE_DEPTH", "3")
    rep = run_command("virasoro-check", {"preset": "trivia-1"})
    assert rep["checks"][0]["details"]["depth"] == 3
    monkeypatch.setenv("QLATTICE_DEPTH", "x")
    with pytest.raises(ConfigError):
        run_command("virasoro-check", {"preset": "trivia-1"})


def test_suite_validation():
    with pytest.raises(ConfigError):
        run_suite({"runs": []})
    with pytest.raises(ConfigError):
        run_suite({"runs": [{"command": "serre", "preset": "sl3", "sites": 1}], "extra": 1})
    with pytest.raises(ConfigError):
        run_suite({"runs": [{"command": "serre", "preset": "sl3", "sites": 1, "bogus": 2}]})


def test_suite_depth_is_default(tmp_path, capsys):
    cfg = {"depth": 3, "runs": [{"command": "virasoro-check", "preset": "trivia-1"}]}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    code, rep, _ = _run(capsys, ["--config", str(path)])
    assert code == 0
    assert rep["checks"][0]["name"] == "virasoro-check/invariance-trivia-1"
    assert rep["checks"][0]["details"]["depth"] == 3


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qlattice", "serre", "--preset", "sl3", "--sites", "1"],
                          capture_output=True, text=True, cwd=ROOT)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["checks"][0]["verdict"] == "pass"
