import json
import math

import numpy as np
import pytest

from hgf import calculus, cli, solutions
from hgf.calculus import SpaceGrid


def run_cli(argv, capsys):
    code = cli.dispatch(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eval_fisher_single_point(capsys):
    code, out, _ = run_cli(["eval", "--family", "fisher", "--t", "0",
                            "--xmin", "0", "--xmax", "0", "--n", "1"],
                           capsys)
    assert code == 0
    assert out.splitlines() == ["t,x,u,v,w", "0,0,0.25,,"]


def test_catalog_lists_all_families(capsys):
    code, out, _ = run_cli(["catalog"], capsys)
    assert code == 0
    for key in solutions.CATALOG:
        assert key in out
    assert "case 12" in out


def test_symmetry_list_generic(capsys):
    code, out, _ = run_cli(
        ["symmetry", "list", "--a1", "0.3", "--a2", "0.7", "--a3", "0.9",
         "--a4", "1.1", "--a5", "0.2"], capsys)
    assert code == 0
    report = json.loads(out)
    cli.validate_report(report)
    assert report["results"]["operators"] == ["Pt", "Px"]


def test_residual_report_schema_and_orders(tmp_path, capsys):
    out_file = tmp_path / "rep.json"
    code, _, _ = run_cli(
        ["residual", "--family", "tf63", "--a1", "0.1", "--delta", "0.35",
         "--a3", "1", "--d3", "3", "--refine",
         "--h-seq", "8e-3", "4e-3", "2e-3", "--window", "-15", "15",
         "--out", str(out_file)], capsys)
    assert code == 0
    report = json.loads(out_file.read_text())
    cli.validate_report(report)
    assert all(1.8 <= o <= 2.2 for o in report["residual"]["order"])
    assert len(report["residual"]["history"]) == 3
    assert any("advisory" in w for w in report["warnings"])


def test_eval_csv_roundtrip_reproduces_residual(tmp_path, tf63_std):
    # residual computed from re-read CSV samples must equal the in-process
    # one bit for bit (17 significant digits round-trip float64 exactly)
    grid = SpaceGrid(-5.0, 5.0, 501)
    t, dt = 0.3, 0.01
    states = [calculus.sample(tf63_std, grid, tt)
              for tt in (t - dt, t, t + dt)]
    path = tmp_path / "snaps.csv"
    cli.write_snapshots_csv(path, states)
    reread = cli.read_snapshots_csv(path)
    direct = calculus.residual_from_states(tf63_std.params, *states, dt=dt)
    reloaded = calculus.residual_from_states(tf63_std.params, *reread, dt=dt)
    assert direct.linf == reloaded.linf
    assert direct.l2 == reloaded.l2


def test_simulate_speed_pipeline(tmp_path, capsys):
    config = {
        "family": {"key": "tf63", "a1": 0.1, "delta": 0.35, "a3": 1.0,
                   "d3": 3.0},
        "grid": {"x_min": -15.0, "x_max": 20.0, "n": 351},
        "time": {"t_end": 1.5, "cfl_safety": 0.4, "snapshot_every": 400},
        "seed": 3,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    rundir = tmp_path / "run"
    code, _, _ = run_cli(["simulate", "--config", str(cfg_path), "--out",
                          str(rundir), "--quiet"], capsys)
    assert code == 0
    report = json.loads((rundir / "report.json").read_text())
    cli.validate_report(report)
    assert (rundir / "snapshots.csv").exists()

    out_file = tmp_path / "speed.json"
    code, _, _ = run_cli(["speed", "--run", str(rundir), "--component", "w",
                          "--level", "0.5", "--out", str(out_file)], capsys)
    assert code == 0
    sp = json.loads(out_file.read_text())
    cli.validate_report(sp)
    assert sp["speed"]["speed"] == pytest.approx(2.05740, rel=0.02)


def test_reduce_with_oracle(tmp_path, capsys):
    out_file = tmp_path / "red.json"
    traj = tmp_path / "traj.csv"
    code, _, _ = run_cli(
        ["reduce", "--system", "R38", "--case", "i", "--a1", "0.5",
         "--a4", "0.7", "--beta", "0.3", "--delta1", "1.3",
         "--delta2", "0.4", "--span", "0", "3", "--verify",
         "--traj-out", str(traj), "--out", str(out_file)], capsys)
    assert code == 0
    report = json.loads(out_file.read_text())
    cli.validate_report(report)
    assert report["results"]["oracle_max_deviation"] < 1e-6
    header = traj.read_text().splitlines()[0]
    assert header == "t,U,V,W"


def test_exit_1_on_constraint_violation(capsys):
    code, _, err = run_cli(
        ["residual", "--family", "tf63", "--a1", "2.0", "--delta", "1.0"],
        capsys)
    assert code == 1
    assert "complex" in err


def test_exit_2_on_numerical_failure(tmp_path, capsys):
    # pulse-shaped component has two crossings -> numerical failure
    config = {
        "family": {"key": "tf65", "d": 1.0},
        "grid": {"x_min": -15.0, "x_max": 15.0, "n": 151},
        "time": {"t_end": 0.5, "snapshot_every": 10},
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    rundir = tmp_path / "run"
    assert run_cli(["simulate", "--config", str(cfg_path), "--out",
                    str(rundir), "--quiet"], capsys)[0] == 0
    code, _, err = run_cli(["speed", "--run", str(rundir), "--component",
                            "w", "--level", "0.1"], capsys)
    assert code == 2
    assert "multiple" in err


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps({"family": {"key": "fisher"},
                                    "surprise": 1}))
    code, _, err = run_cli(["eval", "--config", str(cfg_path), "--t", "0",
                            "--xmin", "0", "--xmax", "1", "--n", "3"],
                           capsys)
    assert code == 1
    assert "surprise" in err


def test_flags_override_config_with_warning(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(
        {"family": {"key": "tf63", "a1": 0.2, "delta": 0.35}}))
    out_file = tmp_path / "rep.json"
    code, _, _ = run_cli(
        ["residual", "--family", "tf63", "--a1", "0.1", "--config",
         str(cfg_path), "--window", "-5", "5", "--h", "0.01",
         "--out", str(out_file)], capsys)
    assert code == 0
    report = json.loads(out_file.read_text())
    assert any("overrides config" in w for w in report["warnings"])
    assert report["inputs"]["family_params"]["a1"] == 0.1


def test_byte_identical_reports(tmp_path, capsys):
    argv = ["residual", "--family", "fisher", "--window", "-8", "8",
            "--h", "0.01"]
    paths = []
    for i in (0, 1):
        p = tmp_path / f"r{i}.json"
        assert run_cli(argv + ["--out", str(p)], capsys)[0] == 0
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]


def test_semi_family_via_cli(tmp_path, capsys):
    out_file = tmp_path / "semi.json"
    code, _, _ = run_cli(
        ["residual", "--family", "semi50", "--a4", "0.5", "--beta", "0.3",
         "--gamma", "0.1", "--profile-lo", "-16", "--profile-hi", "16",
         "--anchor", "-16", "--window", "-10", "12", "--t", "0.4",
         "--h", "5e-3", "--out", str(out_file)], capsys)
    assert code == 0
    report = json.loads(out_file.read_text())
    cli.validate_report(report)
    assert max(v for v in report["residual"]["linf"]) < 1e-4
