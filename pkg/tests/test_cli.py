import csv
import io
import json
import subprocess
import sys

import pytest

from disc_confine import __version__
from disc_confine.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_critical(capsys):
    code, out, _ = _run(capsys, "classify", "--family", "critical", "--m", "-2..2")
    assert code == 0
    doc = json.loads(out)
    assert doc["version"] == __version__
    assert doc["report"]["aggregate"] == "EssentiallySelfAdjoint"
    assert doc["config"]["m"] == [-2, 2]


def test_config_replay_is_identical(capsys, tmp_path):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    assert run(["classify", "--family", "power", "--alpha", "0.7", "--m", "0..1",
                "--out", str(first)]) == 0
    assert run(["--config", str(first), "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert json.loads(first.read_text())["report"]["aggregate"] == "NotEssentiallySelfAdjoint"


def test_gauge_csv(capsys):
    code, out, _ = _run(capsys, "gauge", "--family", "power", "--alpha", "1.2",
                        "--points", "5", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["r", "B", "a", "r2a"]
    assert len(rows) == 6
    assert float(rows[-1][0]) == pytest.approx(1 - 1e-8)


def test_potential_csv(capsys):
    code, out, _ = _run(capsys, "potential", "--family", "critical", "--m", "-3",
                        "--points", "4", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["r", "qtilde"] and len(rows) == 5


def test_criteria_integral_and_bracket(capsys):
    code, out, _ = _run(capsys, "criteria", "--g", "loghalfloglog", "--test", "integral")
    assert code == 0 and json.loads(out)["report"]["outcome"] == "Satisfied"
    code, out, _ = _run(capsys, "criteria", "--g", "log", "--test", "bracket")
    assert code == 0 and json.loads(out)["report"]["bracket"]["holds"]


def test_criteria_subleading_carries_caveat(capsys):
    code, out, _ = _run(capsys, "criteria", "--test", "subleading")
    assert code == 0
    report = json.loads(out)["report"]
    assert report["outcome"] == "Satisfied"
    assert "certified only on the confining side" in report["caveat"]


def test_usage_errors_exit_2(capsys):
    assert _run(capsys, "classify", "--m", "x..y")[0] == 2
    assert _run(capsys)[0] == 2
    code, _, err = _run(capsys, "classify", "--family", "nosuch")
    assert code == 2
    code, _, err = _run(capsys, "classify", "--format", "csv", "--m", "0..0")
    assert code == 2 and json.loads(err)["exit_code"] == 2


def test_tabulated_needs_enough_samples(capsys, tmp_path):
    f = tmp_path / "tab.json"
    f.write_text(json.dumps([[0.5, 1.0]]))
    code, _, err = _run(capsys, "classify", "--file", str(f), "--m", "0..0")
    assert code == 2
    assert json.loads(err)["error"] in ("SpecError", "CallerError")


def test_hypothesis_violation_exits_3(capsys, tmp_path):
    f = tmp_path / "pert.json"
    f.write_text(json.dumps({
        "family": "critical", "params": {},
        "perturbation": {"kind": "separable", "amplitude": 1.0, "mode": 1, "radial_power": 1.0},
    }))
    code, _, err = _run(capsys, "classify", "--file", str(f), "--m", "0..0")
    assert code == 3
    assert json.loads(err)["error"] == "HypothesisViolation"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "disc_confine", "--version"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == __version__
