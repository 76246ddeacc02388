import json
import subprocess
import sys

import pytest

from qmonodromy.cli import ConfigError, RunConfig, SUITES, main, run


def run_cli(argv, capsys):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_identities_suite_passes(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"params": "REF", "suites": ["identities"], "seed": 1}))
    code, out = run_cli(["verify", "--config", str(cfg)], capsys)
    assert code == 0 and out["suites"]["identities"]["pass"]


def test_report_deterministic(tmp_path):
    cfg = RunConfig.from_dict({"suites": ["samples", "cubic", "identities"], "seed": 4,
                               "samples": 5})
    a, b = run(cfg), run(cfg)
    a.pop("timing"), b.pop("timing")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_suite_independence():
    both = run(RunConfig.from_dict({"suites": ["samples", "cubic"], "seed": 2, "samples": 4}))
    one = run(RunConfig.from_dict({"suites": ["cubic"], "seed": 2, "samples": 4}))
    assert both["suites"]["cubic"] == one["suites"]["cubic"]


def test_every_suite_reported():
    rep = run(RunConfig.from_dict({"seed": 0, "samples": 3}))
    assert sorted(rep["suites"]) == sorted(SUITES)
    assert rep["convention"] == "rowclass"
    assert rep["convention_selection"]["reading"] == "corrected"


def test_validation_failure(capsys, tmp_path):
    bad = {"params": {"q": [0.2, 0], "rho": [[2, 0], [-0.5, 0]], "sigma": [[0.7, 0], [1.1, 0]],
                      "x": [[0.9, 0], [0.18, 0], [1.5, 0.5]]}, "suites": ["identities"]}
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(bad))
    code, out = run_cli(["verify", "--config", str(cfg)], capsys)
    assert code != 0 and not out["ok"]
    assert out["validation"]["nr_pairs"]["x"] == [[1, 2]]
    code, _ = run_cli(["validate", "--config", str(cfg)], capsys)
    assert code == 1


def test_malformed_config(tmp_path, capsys):
    cfg = tmp_path / "x.json"
    cfg.write_text("{not json")
    assert main(["verify", "--config", str(cfg)]) == 2
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"suites": ["nope"]})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"samples": 0})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"tol": {"cubic": -1}})


def test_unwritable_out(capsys):
    assert main(["validate", "--out", "/nonexistent/dir/r.json"]) == 2


def test_out_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["coeffs", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert set(data["quadric_1"]) == set("ABCDEF")


def test_sample_and_lines(capsys):
    code, out = run_cli(["sample", "-n", "2", "--constraint", "rho_2=inf", "--seed", "3"], capsys)
    assert code == 0 and len(out["samples"]) == 2
    code, out = run_cli(["lines", "--seed", "1"], capsys)
    assert code == 0 and len(out["lines"]) == 16


def test_omega_flag(capsys):
    code, out = run_cli(["report", "--omega", "0.8", "--omega", "1.3"], capsys)
    assert "pencil" in out["suites"]
    assert out["suites"]["pencil"]["omega0"] == [0.8, 0.0]


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "qmonodromy.cli", "validate"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["validation"]["ok"]


def test_precision_env(monkeypatch, capsys):
    monkeypatch.setenv("QMONODROMY_PRECISION", "extended:30")
    code, out = run_cli(["coeffs"], capsys)
    monkeypatch.delenv("QMONODROMY_PRECISION")
    code2, out2 = run_cli(["coeffs"], capsys)
    a, b = out["quadric_1"]["A"], out2["quadric_1"]["A"]
    assert abs(complex(*a) - complex(*b)) < 1e-10 * abs(complex(*b))
