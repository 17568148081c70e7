import json

import numpy as np
import pytest

from bathyhom.cli import main
from bathyhom.errors import ConfigError
from bathyhom.harness import io
from bathyhom.harness.config import load_bundled_config, parse_config
from bathyhom.harness.experiment import run_experiment
from bathyhom.harness.metrics import (compare_fields, fold_onto, peak_position,
                                      solitary_fits, track_peak_speed, y_average)
from bathyhom.traveling_wave import sech2_profile

SMALL = """
[experiment]
name = small
solvers = homogenized, {solver}
x_min = {x_min}
x_max = {x_max}
t_end = {t_end}
snapshot_times = {snaps}

[bathymetry]
{bathy}

[initial]
amplitude = 0.05
width = 2.0
center = {center}

[homogenized]
nx = 256
x_min = -20
x_max = 20

[spectral2d]
nx = 128
ny = 8

[fv2d]
nx = 100
ny = 8
bc_x = periodic
"""

SIN = "kind = sinusoidal\nb0 = -1.0\namplitude = 0.3"
PWC = "kind = piecewise_constant\nlevels = -0.5:-0.4, 0.0:-1.6"


def small_config(solver="spectral2d", bathy=SIN, t_end=0.0, snaps="", x_min=-20, x_max=20,
                 center=0.0):
    return parse_config(SMALL.format(solver=solver, bathy=bathy, t_end=t_end, snaps=snaps,
                                     x_min=x_min, x_max=x_max, center=center))


# {{{ config

def test_bundled_configs_load():
    for name in ("sinusoidal_desk", "pwc_desk"):
        cfg = load_bundled_config(name)
        assert cfg.t_end == 30.0 and cfg.times == (0.0, 10.0, 20.0, 30.0)
    pwc = load_bundled_config("pwc_desk")
    assert pwc.fv2d.nx == 2000 and pwc.fv2d.ny == 64 and pwc.fv2d.switch_time is None
    assert pwc.homogenized_domain() == (-200.0, 200.0)


def test_config_rejects_unknown_entries():
    text = SMALL.format(solver="fv2d", bathy=PWC, t_end=1, snaps="", x_min=0, x_max=10,
                        center=0)
    with pytest.raises(ConfigError):
        parse_config(text + "\n[extra]\na = 1\n")
    with pytest.raises(ConfigError):
        parse_config(text.replace("nx = 100", "nx = 100\nweno = yes"))
    with pytest.raises(ConfigError):
        parse_config(text.replace("nx = 100", "nx = lots"))


def test_config_rejects_spectral_on_step():
    with pytest.raises(ConfigError):
        small_config("spectral2d", PWC)


def test_config_validation():
    with pytest.raises(ConfigError):
        small_config(t_end=1.0, snaps="2.0")
    with pytest.raises(ConfigError):
        small_config(x_min=5, x_max=5)
    with pytest.raises(ConfigError):
        parse_config("[experiment]\nsolvers = homogenized\n")


# }}}


# {{{ io

def test_snapshot_round_trip(tmp_path):
    x = np.linspace(0, 1, 7)
    eta = np.sin(x) / 3
    q = np.cos(x) * np.pi
    p = io.write_snapshot_1d(tmp_path / "a" / "s.csv", x, eta, q, {"t": 1.5})
    x2, eta2, q2, meta = io.read_snapshot_1d(p)
    np.testing.assert_array_equal(x2, x)
    np.testing.assert_array_equal(eta2, eta)
    np.testing.assert_array_equal(q2, q)
    assert meta == {"t": 1.5}
    assert p.read_text().splitlines()[0] == "x,eta_bar,q_bar"


def test_field_round_trip(tmp_path):
    x, y = np.linspace(0, 1, 5), np.linspace(-0.5, 0.5, 4)
    f = np.arange(20.0).reshape(5, 4) / 7
    p = io.write_field_2d(tmp_path / "f.npz", x, y, {"eta": f}, 2.0, {"solver": "x"})
    x2, y2, fields, header = io.read_field_2d(p)
    np.testing.assert_array_equal(fields["eta"], f)
    assert header["nx"] == 5 and header["ny"] == 4 and header["t"] == 2.0
    assert header["solver"] == "x" and header["variables"] == ["eta"]
    with pytest.raises(ValueError):
        io.write_field_2d(tmp_path / "g.npz", x, y, {"eta": f.T}, 0.0)


def test_read_missing_file(tmp_path):
    with pytest.raises(OSError):
        io.read_snapshot_1d(tmp_path / "nope.csv")


# }}}


# {{{ metrics

def test_y_average():
    f = np.arange(12.0).reshape(3, 4)
    np.testing.assert_array_equal(y_average(f), [1.5, 5.5, 9.5])
    y = -0.5 + (np.arange(4) + 0.5) / 4
    np.testing.assert_array_equal(y_average(f, y, 1.0), [1.5, 5.5, 9.5])
    with pytest.raises(ValueError):
        y_average(f, y[:3], 1.0)
    with pytest.raises(ValueError):
        y_average(f, y, 2.0)


def test_compare_fields_examples():
    x = np.linspace(0, 10, 101)
    a = np.exp(-(x - 5) ** 2)
    m = compare_fields(x, a, x, a)
    assert m["linf"] == 0.0 and m["rel_l2"] == 0.0
    m = compare_fields(x, a, x, 1.1 * a)
    assert m["rel_linf"] == pytest.approx(0.1, rel=1e-12)
    assert m["rel_l2"] == pytest.approx(0.1, rel=1e-12)
    with pytest.raises(ValueError):
        compare_fields(x, a, x + 20, a)


def test_peak_tracking():
    x = np.linspace(0, 50, 1001)
    times = [0.0, 1.0, 2.0, 3.0]
    fields = [sech2_profile(x, 0.1, 1.0, 10 + 3.2 * t) for t in times]
    speed, rms = track_peak_speed(times, x, fields)
    assert speed == pytest.approx(3.2, rel=1e-3) and rms < 1e-3
    twin = sech2_profile(x, 0.1, 1.0, 10) + sech2_profile(x, 0.099, 1.0, 30)
    with pytest.raises(ValueError):
        peak_position(x, twin)
    assert peak_position(x, twin, (20, 40)) == pytest.approx(30, abs=0.01)


def test_fold_onto():
    x = np.linspace(-50, 250, 3001)
    f = np.exp(-(x - 130) ** 2)
    folded = fold_onto(x, f, 0.0, 100.0)
    assert folded(np.array([30.0]))[0] == pytest.approx(1.0, rel=1e-6)
    # content left of the wall is dropped
    g = fold_onto(x, np.exp(-(x + 30) ** 2), 0.0, 100.0)
    assert abs(g(np.array([70.0]))[0]) < 1e-12


def test_solitary_fits_finds_crests():
    x = np.linspace(0, 100, 4001)
    eta = sech2_profile(x, 0.05, 1.2, 70) + sech2_profile(x, 0.03, 1.0, 40)
    fits = solitary_fits(x, eta)
    assert [round(f["x"]) for f in fits] == [70, 40]
    assert fits[0]["A"] == pytest.approx(0.05, rel=1e-3)


# }}}


# {{{ experiment and CLI

def test_run_experiment_t0_agrees():
    cfg = small_config("spectral2d", SIN, t_end=0.0)
    report = run_experiment(cfg, write=False)
    m = report.comparisons["spectral2d"][0]
    # only the spline transfer between the two x-grids contributes
    assert m["t"] == 0.0 and m["rel_linf"] < 1e-4


def test_run_experiment_fv_writes_artifacts(tmp_path):
    cfg = small_config("fv2d", PWC, t_end=0.5, snaps="0.25", x_min=-20, x_max=20)
    report = run_experiment(cfg, output_dir=tmp_path)
    assert [c["t"] for c in report.comparisons["fv2d"]] == [0.0, 0.25, 0.5]
    assert report.comparisons["fv2d"][-1]["rel_linf"] < 0.2
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["name"] == "small" and "runtimes" not in data
    again = run_experiment(cfg, write=False)
    assert again.to_dict()["comparisons"] == data["comparisons"]


def test_cli_bathy_info(capsys, tmp_path):
    assert main(["bathy-info", "--profile", "pwc", "--out", str(tmp_path), "--ny", "8"]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["mu"] == pytest.approx(3 / 256)
    table = np.loadtxt(tmp_path / "brH.csv", delimiter=",", skiprows=1, ndmin=2)
    assert table.shape == (8, 2)
    assert abs(table[:, 1].mean()) < 1e-15


def test_cli_traveling_wave(capsys, tmp_path):
    out = tmp_path / "tw.csv"
    assert main(["traveling-wave", "--V", "3.2", "--out", str(out)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["A"] == pytest.approx(0.04416, rel=1e-3)
    assert out.exists() and out.with_suffix(".json").exists()


def test_cli_simulate_reconstruct_compare(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(SMALL.format(solver="spectral2d", bathy=SIN, t_end=0.5, snaps="",
                                x_min=-20, x_max=20, center=0))
    assert main(["simulate-1d", str(cfg), "--out", str(tmp_path)]) == 0
    files = json.loads(capsys.readouterr().out)["files"]
    snap = [f for f in files if f.endswith("0000.500.csv")][0]
    rec = tmp_path / "rec.npz"
    assert main(["reconstruct", snap, "--config", str(cfg), "--ny", "16",
                 "--cell-average", "--out", str(rec)]) == 0
    assert json.loads(capsys.readouterr().out)["ny"] == 16
    assert main(["compare", snap, str(rec)]) == 0
    assert json.loads(capsys.readouterr().out)["rel_linf"] < 1e-12


def test_cli_errors_are_json(capsys):
    assert main(["traveling-wave", "--V", "2.0"]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "TravelingWaveError"
    assert main(["simulate-1d", "no_such_config"]) == 1
    assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"

# }}}
