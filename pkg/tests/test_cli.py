import json
import subprocess
import sys

import pytest

from qpsi import harness
from qpsi.cli import run


def test_verify_thm_bns(capsys):
    assert run(["verify", "--id", "thm_bns", "--count", "100", "--seed", "7"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_unknown_id(capsys, monkeypatch):
    called = []
    monkeypatch.setattr(harness, "verify", lambda *a, **k: called.append(a))
    assert run(["verify", "--id", "nosuch"]) == 2
    assert "nosuch" in capsys.readouterr().err
    assert not called  # rejected before any computation


def test_orthogonality_cor2_exact():
    assert run(["orthogonality", "--pair", "cor2", "--window", "0", "6", "--mode", "exact"]) == 0


def test_bad_window():
    assert run(["orthogonality", "--pair", "cor1", "--window", "5", "2"]) == 2


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["verify"], ["verify", "--id", "1psi1", "--mode", "fuzzy"]])
def test_usage_errors(argv):
    assert run(argv) == 2


def test_list(capsys):
    assert run(["list"]) == 0
    out = capsys.readouterr().out
    assert "thm_bnsc" in out and "1psi1" in out


def test_list_json(capsys):
    assert run(["list", "--format", "json"]) == 0
    ids = [r["id"] for r in json.loads(capsys.readouterr().out)]
    assert "abel" in ids and len(ids) == len(set(ids))


def test_failure_exit_code(monkeypatch):
    rec = harness.registry.get("qgauss").perturbed(1e-6)
    real_verify = harness.verify
    monkeypatch.setattr(harness, "verify", lambda rid, spec=None, record=None: real_verify(rid, spec, rec))
    assert run(["verify", "--id", "qgauss", "--count", "5"]) == 1


def test_json_round_trip(tmp_path):
    out = tmp_path / "r.json"
    assert run(["verify", "--id", "thm_tnsc", "--count", "5", "--format", "json", "-o", str(out)]) == 0
    text = out.read_text()
    again = json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n"
    assert again == text


def test_exact_mode_flag(capsys):
    assert run(["verify", "--id", "curious_ps", "--mode", "exact", "--count", "2", "--format", "json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["curious_ps"]["mode"] == "exact"


def test_exact_mode_on_nonterminating_is_usage_error():
    assert run(["verify", "--id", "thm_bns", "--mode", "exact", "--count", "2"]) == 2


def test_precision_env(monkeypatch, capsys):
    monkeypatch.setenv("QPSI_PRECISION", "30")
    assert run(["verify", "--id", "1psi1", "--count", "3", "--format", "json"]) == 0
    samples = json.loads(capsys.readouterr().out)["1psi1"]["samples"]
    assert all(s["digits"] >= 30 for s in samples)


@pytest.mark.parametrize("value", ["8", "lots"])
def test_precision_env_rejected(monkeypatch, value):
    monkeypatch.setenv("QPSI_PRECISION", value)
    assert run(["verify", "--id", "1psi1", "--count", "3"]) == 2


def test_degenerations(capsys):
    assert run(["degenerations", "--count", "2"]) == 0


def test_probe_limit(capsys):
    assert run(["probe-limit", "--id", "thm_bns", "--format", "json"]) == 0
    d = json.loads(capsys.readouterr().out)["limits"]
    assert d["passed"] and abs(d["checks"][0]["detail"]["ratio"] - 0.5) < 0.05


def test_probe_limit_abel():
    assert run(["probe-limit", "--id", "hagen_rothe", "--B", "1000"]) == 0


def test_probe_limit_no_probe():
    assert run(["probe-limit", "--id", "qgauss"]) == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qpsi", "verify", "--id", "nosuch"], capture_output=True, text=True)
    assert r.returncode == 2
