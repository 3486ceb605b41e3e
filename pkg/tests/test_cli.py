import csv
import json
import math
import os

import numpy as np
import pytest

import kerrwra.spacetime
from kerrwra import cli
from kerrwra.wigner import antisymmetry_residual, lambda_matrix

from conftest import build_point

MINKOWSKI_INI = """\
[scenario]
preset = minkowski

[analysis]
set = wra, time_reversal, azimuth_flip
"""


def _write(tmp_path, text, name="scenario.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def test_serialize_round_trips(tmp_path):
    cfg = cli.ScenarioConfig(
        mass=0.00443, spin=0.001, family="polar_orbit",
        quantization="orbit_orthogonal", orbit_radius=6.671e6,
        r_launch=6.671e6, r_stop=4.2371e7, plane="polar",
        ratios=(0.8, -0.8), analyses=("wra", "pt_check"), tol=1e-11)
    path = _write(tmp_path, cli.serialize_config(cfg))
    back = cli.scenario_config(cli.load_config(path), path)
    assert back == cfg


def test_trace_writes_csvs_and_manifest(tmp_path):
    cfg_path = _write(tmp_path, MINKOWSKI_INI)
    out = str(tmp_path / "out")
    rc = cli.main(["trace", "--config", cfg_path, "--out", out])
    assert rc == 0
    traj = _read_csv(os.path.join(out, "trace_trajectory.csv"))
    assert len(traj) == 513
    assert float(traj[0]["r"]) == pytest.approx(1e7)
    wra = _read_csv(os.path.join(out, "trace_wra.csv"))
    # flat spacetime with the global inertial frame: no rotation
    assert abs(float(wra[-1]["psi_cumulative_rad"])) < 1e-10
    with open(os.path.join(out, "manifest.json")) as fh:
        manifest = json.load(fh)
    assert manifest["status"] == "success"
    assert set(manifest["outputs"]) >= {"trace_trajectory.csv",
                                        "trace_wra.csv"}
    assert manifest["config_sha256"]


def test_sweep_has_symmetry_columns_and_is_deterministic(tmp_path):
    cfg_path = _write(tmp_path, MINKOWSKI_INI)
    outs = {}
    for jobs, sub in ((1, "a"), (2, "b")):
        out = str(tmp_path / sub)
        rc = cli.main(["sweep", "--config", cfg_path, "--out", out,
                       "--jobs", str(jobs)])
        assert rc == 0
        with open(os.path.join(out, "sweep_summary.csv")) as fh:
            outs[jobs] = fh.read()
    assert outs[1] == outs[2]
    rows = _read_csv(os.path.join(str(tmp_path / "a"), "sweep_summary.csv"))
    assert [float(r["ratio"]) for r in rows] == [0.5, -0.5]
    for r in rows:
        assert abs(float(r["psi_total_rad"])) < 1e-10
        assert abs(float(r["delta_psi_t_rad"])) < 1e-10
    assert abs(float(rows[0]["delta_psi_flip_rad"])) < 1e-10
    assert rows[1]["delta_psi_flip_rad"] == ""


def test_out_env_var_fallback(tmp_path, monkeypatch):
    cfg_path = _write(tmp_path, MINKOWSKI_INI)
    out = str(tmp_path / "env_out")
    monkeypatch.setenv("KERRWRA_OUT", out)
    rc = cli.main(["trace", "--config", cfg_path])
    assert rc == 0
    assert os.path.exists(os.path.join(out, "manifest.json"))


def test_missing_config_exits_2(tmp_path, capsys):
    rc = cli.main(["sweep", "--config", str(tmp_path / "nope.ini")])
    assert rc == 2
    assert "config error" in capsys.readouterr().err


def test_unknown_preset_exits_2(tmp_path, capsys):
    cfg_path = _write(tmp_path, "[scenario]\npreset = narnia\n")
    rc = cli.main(["sweep", "--config", cfg_path])
    assert rc == 2
    assert "unknown preset" in capsys.readouterr().err


def test_empty_grid_exits_2(tmp_path, capsys):
    text = ("[scenario]\nmass = 0.00443\nr_launch = 6.7e6\n"
            "r_stop = 4.2e7\n")
    rc = cli.main(["sweep", "--config", _write(tmp_path, text)])
    assert rc == 2
    assert "empty launch grid" in capsys.readouterr().err


def test_bad_number_exits_2(tmp_path, capsys):
    text = ("[scenario]\nmass = heavy\nr_launch = 6.7e6\n"
            "r_stop = 4.2e7\nratios = 1.0\n")
    rc = cli.main(["sweep", "--config", _write(tmp_path, text)])
    assert rc == 2


def test_interferometer_needs_section(tmp_path, capsys):
    cfg_path = _write(tmp_path, MINKOWSKI_INI)
    rc = cli.main(["interferometer", "--config", cfg_path])
    assert rc == 2
    assert "interferometer" in capsys.readouterr().err


def test_validate_passes(capsys):
    rc = cli.main(["validate"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "all checks passed" in out
    assert "[FAIL]" not in out


def test_validate_reports_failures_under_tight_tolerance(capsys):
    rc = cli.main(["validate", "--tol-scale", "1e-12"])
    out = capsys.readouterr().out
    assert rc == 1
    assert "[FAIL]" in out


def test_antisymmetry_check_catches_connection_mutation(monkeypatch):
    """Corrupting one Christoffel component must trip the generator
    antisymmetry invariant; this guards the check itself against going
    silent."""
    traj, field = build_point("earth_polar", 1.0)
    ev = traj.event_at(0.5 * traj.xi_end)
    k = traj.momentum_at(0.5 * traj.xi_end)
    clean = antisymmetry_residual(lambda_matrix(field, ev, k))
    assert clean < 1e-8

    true_christoffel = kerrwra.spacetime.christoffel_at

    def corrupted(params, event):
        gam = np.array(true_christoffel(params, event), copy=True)
        gam[2, 1, 2] = -gam[2, 1, 2]
        return gam

    monkeypatch.setattr(kerrwra.spacetime, "christoffel_at", corrupted)
    broken = antisymmetry_residual(lambda_matrix(field, ev, k))
    assert broken > 1e-8
