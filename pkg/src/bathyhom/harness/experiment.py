"""Run configured solvers and compare their transversely averaged output."""
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from bathyhom import sw2d_fv, sw2d_spectral
from bathyhom.bathymetry import effective_coefficients
from bathyhom.errors import SimulationError
from bathyhom.harness import io
from bathyhom.harness.metrics import (compare_fields, fold_onto, solitary_fits,
                                      track_peak_speed)
from bathyhom.homogenized1d import HomogenizedParams, State1D, simulate_1d
from bathyhom.spectral_core import PeriodicGrid1D
from bathyhom.traveling_wave import TravelingWaveParams, integrate_homoclinic


@dataclass
class MeanSeries:
    """y-averaged output of one solver: ``eta[i]`` and ``q[i]`` at ``times[i]``."""
    x: np.ndarray
    times: list
    eta: list
    q: list
    periodic_length: float = None


@dataclass
class ComparisonReport:
    name: str
    times: list
    coefficients: dict
    comparisons: dict = field(default_factory=dict)
    peak_speeds: dict = field(default_factory=dict)
    solitary_waves: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    runtimes: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict, repr=False)

    def to_dict(self):
        # runtimes are left out so reports of identical runs are identical
        return {
            "name": self.name,
            "times": list(self.times),
            "coefficients": self.coefficients,
            "comparisons": self.comparisons,
            "peak_speeds": self.peak_speeds,
            "solitary_waves": self.solitary_waves,
            "artifacts": [str(p) for p in self.artifacts],
        }


def initial_mean_fields(config, coeffs, x):
    """``(eta_bar, q_bar)`` of the configured initial condition."""
    ic = config.initial
    if ic.kind == "gaussian":
        eta = ic.amplitude * np.exp(-((x - ic.center) / ic.width) ** 2)
        return eta, np.zeros_like(eta)
    sol = integrate_homoclinic(TravelingWaveParams.from_coeffs(ic.speed, coeffs))
    return sol.sample(x, ic.center)


def _switch_time(config, coeffs):
    fv = config.fv2d
    if fv.bc_x != "reflecting_then_periodic":
        return None
    if fv.switch_time is not None:
        return fv.switch_time
    return sw2d_fv.default_switch_time(config.initial.width, coeffs.g, coeffs.mean_H)


def run_homogenized(config, coeffs, times):
    x_min, x_max = config.homogenized_domain()
    grid = PeriodicGrid1D.from_bounds(config.homogenized.nx, x_min, x_max)
    eta, q = initial_mean_fields(config, coeffs, grid.x)
    params = HomogenizedParams(coeffs, cfl=config.homogenized.cfl,
                               dealias_on=config.homogenized.dealias)
    res = simulate_1d(State1D(grid, eta, q), config.t_end, params, snapshot_times=times)
    snaps = res.snapshots if times else []
    return MeanSeries(grid.x, [s.t for s in snaps], [s.eta for s in snaps],
                      [s.q for s in snaps], grid.length), snaps


def run_spectral2d(config, profile, coeffs, times):
    sp = config.spectral2d
    grid = sw2d_spectral.Grid2D.from_bounds(sp.nx, config.x_min, config.x_max, sp.ny,
                                            profile.y0, profile.y0 + profile.period)
    eta_bar, q_bar = initial_mean_fields(config, coeffs, grid.x)
    u0 = q_bar / coeffs.mean_H
    init = sw2d_spectral.planar_initial_state(grid, profile, lambda _: eta_bar, lambda _: u0)
    cfg = sw2d_spectral.SpectralConfig(g=coeffs.g, cfl=sp.cfl, dealias_on=sp.dealias)
    res = sw2d_spectral.simulate_2d_spectral(init, config.t_end, profile, cfg,
                                             snapshot_times=times)
    b = sw2d_spectral.sample_bathymetry(profile, grid)
    etas = [s.eta.mean(axis=1) - profile.eta0 for s in res.snapshots]
    qs = [((s.eta - b) * s.u).mean(axis=1) for s in res.snapshots]
    return MeanSeries(grid.x, [s.t for s in res.snapshots], etas, qs,
                      config.x_max - config.x_min), res.snapshots


def run_fv2d(config, profile, coeffs, times):
    fv = config.fv2d
    grid = sw2d_fv.CellGrid2D(fv.nx, config.x_min, config.x_max, fv.ny,
                              profile.y0, profile.y0 + profile.period)
    eta_bar, q_bar = initial_mean_fields(config, coeffs, grid.x)
    u0 = q_bar / coeffs.mean_H
    init = sw2d_fv.planar_initial_state(grid, profile, lambda _: eta_bar, lambda _: u0)
    cfg = sw2d_fv.FVConfig(cfl=fv.cfl, limiter=fv.limiter, bc_x=fv.bc_x,
                           switch_time=_switch_time(config, coeffs), g=coeffs.g)
    res = sw2d_fv.simulate_fv(init, config.t_end, cfg, snapshot_times=times,
                              eta0=profile.eta0)
    etas = [s.eta.mean(axis=1) - profile.eta0 for s in res.snapshots]
    qs = [s.hu.mean(axis=1) for s in res.snapshots]
    return MeanSeries(grid.x, [s.t for s in res.snapshots], etas, qs,
                      config.x_max - config.x_min), res.snapshots


def _folded(config, hom):
    """True when the 2D run uses a wall at ``x_min`` and a shorter domain."""
    same_domain = (hom.x[0] == config.x_min
                   and abs(hom.x[0] + hom.periodic_length - config.x_max) < 1e-12)
    return "fv2d" in config.solvers and config.fv2d.bc_x != "periodic" and not same_domain


def _compare(config, hom, other):
    rows = []
    fold = _folded(config, hom)
    for i, t in enumerate(other.times):
        if fold:
            ref = fold_onto(hom.x, hom.eta[i], config.x_min, config.x_max - config.x_min)
            row = compare_fields(other.x, ref(other.x), other.x, other.eta[i])
        else:
            row = compare_fields(hom.x, hom.eta[i], other.x, other.eta[i])
        row["t"] = t
        rows.append(row)
    return rows


def _speed(series, center):
    """Speed of the tallest crest to the right of the initial center."""
    if len(series.times) < 3:
        return None
    try:
        speed, resid = track_peak_speed(series.times, series.x, series.eta,
                                        x_window=(center, series.x[-1]))
    except ValueError:
        return None
    return {"speed": speed, "fit_rms": resid}


def _write_artifacts(out, name, snaps, series, profile):
    paths = []
    for i, t in enumerate(series.times):
        p = out / f"{name}_mean_t{t:09.3f}.csv"
        io.write_snapshot_1d(p, series.x, series.eta[i], series.q[i],
                             {"t": t, "solver": name})
        paths.append(p)
    for s in snaps:
        if name == "spectral2d":
            fields = {"eta": s.eta, "u": s.u, "p": s.p}
            x, y = s.grid.x, s.grid.y
        elif name == "fv2d":
            fields = {"h": s.h, "hu": s.hu, "hv": s.hv, "b": s.b}
            x, y = s.grid.x, s.grid.y
        else:
            continue
        p = out / f"{name}_t{s.t:09.3f}.npz"
        io.write_field_2d(p, x, y, fields, s.t, {"solver": name, "eta0": profile.eta0})
        paths.append(p)
    return paths


def run_experiment(config, output_dir=None, write=True):
    """Run every configured solver and compare against the homogenized one.

    The homogenized solver is the reference; each 2D solver's y-averaged
    surface is compared at the snapshot times.  Artifacts go to
    ``output_dir`` (default: the config's ``output_dir``) when ``write``.
    """
    profile = config.profile()
    coeffs = effective_coefficients(profile, delta=config.delta, g=config.g)
    times = list(config.times)
    report = ComparisonReport(config.name, times, coeffs.as_dict())
    runners = {
        "homogenized": lambda: run_homogenized(config, coeffs, times),
        "spectral2d": lambda: run_spectral2d(config, profile, coeffs, times),
        "fv2d": lambda: run_fv2d(config, profile, coeffs, times),
    }
    snaps = {}
    for name in config.solvers:
        t0 = time.perf_counter()
        try:
            report.series[name], snaps[name] = runners[name]()
        except SimulationError as exc:
            raise type(exc)(f"experiment {config.name!r}, solver {name}: {exc}",
                            t=exc.t, step=exc.step) from exc
        report.runtimes[name] = time.perf_counter() - t0

    hom = report.series.get("homogenized")
    for name, series in report.series.items():
        report.peak_speeds[name] = _speed(series, config.initial.center)
        report.solitary_waves[name] = solitary_fits(series.x, series.eta[-1]) \
            if series.times else []
        if hom is not None and name != "homogenized":
            report.comparisons[name] = _compare(config, hom, series)

    out = output_dir if output_dir is not None else config.output_dir
    if write and out is not None:
        out = Path(out)
        for name in config.solvers:
            report.artifacts += _write_artifacts(out, name, snaps[name],
                                                 report.series[name], profile)
        report_path = out / "report.json"
        report.artifacts.append(report_path)
        io.write_report(report_path, report)
    return report
