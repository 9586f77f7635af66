"""CLI behavior: exit codes, printed verdict lines, and sweeps."""

import json

import pytest

from extnls.cli import main
from extnls.experiments.manifest import RunManifest


BASE = {
    "scenario": "RadialGlobal",
    "n": 3,
    "p": 10.0,
    "r_max": 20.0,
    "num_radial": 400,
    "dt": 5e-3,
    "t_final": 0.5,
    "sample_stride": 10,
    "initial_data": {"profile": "gaussian_ring", "amplitude": 1.0,
                     "power": 2, "width": 1.0},
}


def _manifest_file(tmp_path, overrides=None):
    data = {**BASE, **(overrides or {})}
    path = tmp_path / "manifest.json"
    RunManifest.from_dict(data).save(path)
    return path


def test_run_prints_verdicts_and_exits_zero(tmp_path, capsys):
    path = _manifest_file(tmp_path)
    code = main(["run", str(path), "--out", str(tmp_path / "out")])
    out = capsys.readouterr().out
    assert code == 0
    lines = [l for l in out.splitlines() if ": PASS" in l or ": FAIL" in l]
    assert lines and all(l.endswith("PASS") for l in lines)
    assert (tmp_path / "out" / "report.json").exists()


def test_run_failure_exit_code(tmp_path, capsys):
    path = _manifest_file(tmp_path,
                          {"thresholds": {"mass_drift_max": 1e-18}})
    code = main(["run", str(path), "--out", str(tmp_path / "out")])
    assert code == 2
    assert "FAIL" in capsys.readouterr().out


def test_bad_manifest_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({**BASE, "scenario": "Nope"}))
    code = main(["run", str(path)])
    assert code == 2
    assert "manifest error" in capsys.readouterr().err


def test_report_rereads_run_dir(tmp_path, capsys):
    path = _manifest_file(tmp_path)
    main(["run", str(path), "--out", str(tmp_path / "out")])
    capsys.readouterr()
    code = main(["report", str(tmp_path / "out")])
    out = capsys.readouterr().out
    assert code == 0
    assert "scenario: RadialGlobal" in out


def test_sweep_runs_each_value(tmp_path, capsys):
    path = _manifest_file(tmp_path)
    code = main(["sweep", str(path), "dt", "--values", "[0.005, 0.0025]",
                 "--out", str(tmp_path / "sweep")])
    out = capsys.readouterr().out
    assert code == 0
    assert "dt=0.005" in out and "dt=0.0025" in out
    assert (tmp_path / "sweep" / "dt_0" / "report.json").exists()
    assert (tmp_path / "sweep" / "dt_1" / "report.json").exists()


def test_compat_subcommand(tmp_path, capsys):
    spec = {
        "n": 3, "p": 11.0, "r_max": 12.0, "num_radial": 4096,
        "initial_data": {"profile": "gaussian_ring", "amplitude": 1.0,
                         "power": 3, "width": 1.0},
    }
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    code = main(["compat", str(path), "--order", "2"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["passed"]
