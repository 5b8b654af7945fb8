import json

import pytest

from hardyaudit.cli import main
from hardyaudit.hardy import HARDY_OPTIMUM, hardy_score
from hardyaudit.serialize import ReportFile, config_to_dict, dumps, load_config, load_support


@pytest.fixture
def config_file(hardy, tmp_path):
    path = tmp_path / "hardy.json"
    path.write_text(dumps(config_to_dict(hardy, "canonical")))
    return path


def test_derive_writes_config_and_report(tmp_path, capsys):
    out, rep = tmp_path / "c.json", tmp_path / "r.json"
    assert main(["derive", "--seed", "3", "--restarts", "2", "--out", str(out), "--report", str(rep)]) == 0
    config = load_config(out)
    assert hardy_score(config) == pytest.approx(HARDY_OPTIMUM, abs=1e-4)
    report = ReportFile.loads(rep.read_text())
    assert report.kind == "condition" and report.decode().passed
    assert report.settings["seed"] == 3
    assert "q.iv" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["derive", "--restarts", "0"],
    ["derive", "--restarts", "x"],
    ["frobnicate"],
    [],
    ["audit", "c.json", "--which", "prop3"],
])
def test_usage_errors(argv):
    assert main(argv) == 64


def test_derive_unwritable(tmp_path):
    out = tmp_path / "missing" / "c.json"
    assert main(["derive", "--restarts", "1", "--out", str(out)]) == 1


def test_verify_ok(config_file, capsys):
    assert main(["verify", str(config_file)]) == 0
    assert "q.iii.b" in capsys.readouterr().out


def test_verify_b2_replaced_by_b1(config_file, capsys):
    doc = json.loads(config_file.read_text())
    doc["observables"][3]["matrix"] = doc["observables"][2]["matrix"]
    config_file.write_text(json.dumps(doc))
    assert main(["verify", str(config_file)]) == 3
    row = next(line for line in capsys.readouterr().out.splitlines() if line.lstrip().startswith("q.ii "))
    assert "FAIL" in row


def test_verify_truncated(config_file, capsys):
    config_file.write_text(config_file.read_text()[:150])
    assert main(["verify", str(config_file)]) == 1
    assert "line" in capsys.readouterr().err


def test_verify_missing_file(tmp_path):
    assert main(["verify", str(tmp_path / "nope.json")]) == 1


def test_verify_report(config_file, tmp_path):
    rep = tmp_path / "v.json"
    assert main(["verify", str(config_file), "--report", str(rep)]) == 0
    assert ReportFile.loads(rep.read_text()).decode().passed


def test_sample(config_file, tmp_path):
    out = tmp_path / "s.json"
    assert main(["sample", str(config_file), "--policy", "d1b2", "--n", "2000", "--seed", "7", "--out", str(out)]) == 0
    support = load_support(out)
    assert len(support) == 2000 and support.seed == 7
    stats = ReportFile.loads((tmp_path / "s.stats.json").read_text())
    assert stats.kind == "sample-stats"
    row = next(r for r in stats.payload["contexts"] if r["context"] == "D1/B2")
    pm = next(o for o in row["outcomes"] if o["outcome"] == [1, -1])
    assert pm["exact"] == pytest.approx(HARDY_OPTIMUM, abs=1e-9)
    assert abs(pm["frequency"] - pm["exact"]) < 0.03


def test_sample_none_policy(config_file, tmp_path):
    out = tmp_path / "s.json"
    assert main(["sample", str(config_file), "--policy", "none", "--n", "10", "--out", str(out)]) == 0
    assert all(not s.outcomes for s in load_support(out).specimens)
    stats = ReportFile.loads((tmp_path / "s.stats.json").read_text()).payload
    assert all(row["outcomes"] == [] for row in stats["contexts"])


def test_sample_weights(config_file, tmp_path):
    weights = ",".join(["0.125"] * 8 + ["0"])
    assert main(["sample", str(config_file), "--policy", weights, "--n", "50", "--out", str(tmp_path / "s.json")]) == 0


@pytest.mark.parametrize("policy", ["d3", "0.5,0.5", "a,b,c,d,e,f,g,h,i"])
def test_sample_bad_policy(config_file, tmp_path, policy):
    assert main(["sample", str(config_file), "--policy", policy, "--n", "5", "--out", str(tmp_path / "s.json")]) == 64


def test_sample_zero_n(config_file):
    assert main(["sample", str(config_file), "--policy", "d1b2", "--n", "0"]) == 64


def test_audit_all(config_file, capsys):
    assert main(["audit", str(config_file), "--which", "all"]) == 0
    out = capsys.readouterr().out
    assert "prop1: proof valid" in out and "prop2: proof invalid" in out and "contradiction derived" in out


def test_audit_prop2_machine(config_file, capsys):
    assert main(["audit", str(config_file), "--which", "prop2", "--format", "machine"]) == 0
    (report,) = ReportFile.loads(capsys.readouterr().out).decode()
    assert report.invalid_steps() == ["S.2", "S.3"]


def test_audit_corrupted(config_file):
    config_file.write_text("{not json")
    assert main(["audit", str(config_file)]) == 1


def test_audit_verdict_mismatch(hardy, tmp_path, capsys):
    from hardyaudit.hardy import HardyParams, build_config

    p = hardy.params
    meas = list(p.meas_angles)
    meas[2] += 0.3
    path = tmp_path / "bad.json"
    path.write_text(dumps(config_to_dict(build_config(HardyParams(p.state_angles, meas)))))
    assert main(["audit", str(path), "--which", "prop1"]) == 3
    assert "verdict mismatch" in capsys.readouterr().err


def test_audit_rejected_config(config_file):
    doc = json.loads(config_file.read_text())
    doc["observables"][3]["matrix"] = doc["observables"][2]["matrix"]
    config_file.write_text(json.dumps(doc))
    assert main(["audit", str(config_file)]) == 3
