"""Command-line interface.

Every subcommand prints a JSON summary on stdout and exits 0 on success.
Failures exit nonzero with ``{"error": ..., "message": ...}`` on stderr.
"""
import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from bathyhom import shape2d
from bathyhom.bathymetry import G, effective_coefficients, pwc_setup, sinusoidal_setup
from bathyhom.errors import BathyhomError
from bathyhom.harness import io
from bathyhom.harness.config import bundled_config_path, load_config
from bathyhom.harness.experiment import (run_experiment, run_fv2d, run_homogenized,
                                         run_spectral2d)
from bathyhom.harness.metrics import compare_fields
from bathyhom.homogenized1d import State1D
from bathyhom.spectral_core import PeriodicGrid1D
from bathyhom.traveling_wave import TravelingWaveParams, integrate_homoclinic

PRESETS = {"pwc": pwc_setup, "sinusoidal": sinusoidal_setup}


def _emit(data):
    print(json.dumps(io._jsonable(data), indent=2, sort_keys=True))


def _config_arg(value):
    path = Path(value)
    if not path.exists() and not value.endswith(".cfg"):
        return bundled_config_path(value)
    return path


def _profile_and_coeffs(args):
    if getattr(args, "config", None):
        cfg = load_config(_config_arg(args.config))
        profile = cfg.profile()
        return profile, effective_coefficients(profile, cfg.delta, cfg.g)
    profile = PRESETS[args.profile]()
    return profile, effective_coefficients(profile, args.delta, args.g)


def cmd_bathy_info(args):
    profile, coeffs = _profile_and_coeffs(args)
    info = coeffs.as_dict()
    info["kind"] = profile.kind
    if args.out:
        y = profile.y0 + profile.period * np.arange(args.ny) / args.ny
        for name, func in (("brH", coeffs.brH), ("brHinvbrH", coeffs.brHinvbrH)):
            values = func(y) if callable(func) else np.full(y.shape, float(func))
            path = Path(args.out) / f"{name}.csv"
            io.write_profile_csv(path, {"y": y, "value": values})
            info[f"{name}_table"] = str(path)
    _emit(info)


def _override(cfg, args):
    if args.t_end is not None:
        cfg.t_end = args.t_end
        cfg.snapshot_times = tuple(t for t in cfg.snapshot_times if t <= args.t_end)
    cfg.validate()
    return cfg


def _simulate(args, name, runner):
    cfg = _override(load_config(_config_arg(args.config)), args)
    profile = cfg.profile()
    coeffs = effective_coefficients(profile, cfg.delta, cfg.g)
    times = list(cfg.times)
    if name == "homogenized":
        series, snaps = runner(cfg, coeffs, times)
    else:
        series, snaps = runner(cfg, profile, coeffs, times)
    out = Path(args.out)
    written = []
    for i, t in enumerate(series.times):
        p = out / f"{name}_mean_t{t:09.3f}.csv"
        io.write_snapshot_1d(p, series.x, series.eta[i], series.q[i],
                             {"t": t, "solver": name, "config": cfg.name})
        written.append(str(p))
    for s in snaps:
        if name == "spectral2d":
            fields = {"eta": s.eta, "u": s.u, "p": s.p}
        elif name == "fv2d":
            fields = {"h": s.h, "hu": s.hu, "hv": s.hv, "b": s.b}
        else:
            continue
        p = out / f"{name}_t{s.t:09.3f}.npz"
        io.write_field_2d(p, s.grid.x, s.grid.y, fields, s.t, {"solver": name})
        written.append(str(p))
    _emit({"solver": name, "t_end": cfg.t_end, "files": written,
           "max_eta_bar": float(np.max(series.eta[-1])) if series.eta else None})


def cmd_simulate_1d(args):
    _simulate(args, "homogenized", run_homogenized)


def cmd_simulate_2d_spectral(args):
    _simulate(args, "spectral2d", run_spectral2d)


def cmd_simulate_2d_fv(args):
    _simulate(args, "fv2d", run_fv2d)


def cmd_traveling_wave(args):
    _, coeffs = _profile_and_coeffs(args)
    params = TravelingWaveParams.from_coeffs(args.V, coeffs)
    sol = integrate_homoclinic(params, eps=args.eps, n_samples=args.samples)
    record = {"V": sol.V, "A": sol.amplitude, "alpha": sol.alpha,
              "residual": sol.residual, "energy_drift": sol.energy_drift,
              "q_peak": sol.q_peak}
    if args.out:
        io.write_profile_csv(args.out, {"xi": sol.xi, "q": sol.q, "eta": sol.eta})
        io.write_json(Path(args.out).with_suffix(".json"), record)
        record["file"] = args.out
    _emit(record)


def cmd_reconstruct(args):
    cfg = load_config(_config_arg(args.config))
    profile = cfg.profile()
    coeffs = effective_coefficients(profile, cfg.delta, cfg.g)
    x, eta, q, meta = io.read_snapshot_1d(args.snapshot)
    dx = np.diff(x)
    grid = PeriodicGrid1D(x.size, dx[0] * x.size, x[0])
    if not np.allclose(dx, grid.dx, rtol=1e-9):
        raise ValueError("snapshot x-grid must be uniform")
    state = State1D(grid, eta, q, meta.get("t", 0.0))
    y = profile.y0 + profile.period * (np.arange(args.ny) + 0.5) / args.ny
    rec = shape2d.reconstruct(state, coeffs, y, direction=args.direction,
                              cell_average=args.cell_average, eta0=profile.eta0)
    io.write_field_2d(args.out, rec.x, rec.y, {"eta": rec.eta, "u": rec.u, "p": rec.p},
                      state.t, {"source": str(args.snapshot), "direction": args.direction})
    _emit({"file": args.out, "nx": int(rec.x.size), "ny": int(rec.y.size),
           "max_abs_p": float(np.max(np.abs(rec.p)))})


def _mean_field(path):
    path = Path(path)
    if path.suffix == ".npz":
        x, _, fields, header = io.read_field_2d(path)
        eta0 = header.get("eta0", 0.0)
        if "eta" in fields:
            return x, fields["eta"].mean(axis=1) - eta0
        return x, (fields["h"] + fields["b"]).mean(axis=1) - eta0
    x, eta, _, _ = io.read_snapshot_1d(path)
    return x, eta


def cmd_compare(args):
    xa, a = _mean_field(args.reference)
    xb, b = _mean_field(args.other)
    metrics = compare_fields(xa, a, xb, b)
    if args.out:
        io.write_json(args.out, metrics)
    _emit(metrics)


def _run_one(path, out_root):
    cfg = load_config(path)
    out = Path(out_root) / cfg.name if out_root else cfg.output_dir
    report = run_experiment(cfg, output_dir=out)
    return report.to_dict()


def cmd_run(args):
    paths = [_config_arg(c) for c in args.configs]
    if args.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run_one, paths, [args.out] * len(paths)))
    else:
        reports = [_run_one(p, args.out) for p in paths]
    _emit(reports if len(reports) > 1 else reports[0])


def _add_profile_args(p):
    p.add_argument("--config", help="experiment config file or bundled config name")
    p.add_argument("--profile", choices=sorted(PRESETS), default="pwc",
                   help="preset bathymetry when no config is given (default: pwc)")
    p.add_argument("--delta", type=float, default=1.0, help="scale parameter (default: 1)")
    p.add_argument("--g", type=float, default=G, help="gravity in m/s^2 (default: 9.81)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bathyhom",
        description="Homogenized shallow-water waves over y-periodic bathymetry.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bathy-info", help="effective coefficients of a bathymetry")
    _add_profile_args(p)
    p.add_argument("--out", default=None,
                   help="directory for the [[H]] and [[H^-1[[H]]]] tables (y, value)")
    p.add_argument("--ny", type=int, default=256, help="table rows (default: 256)")
    p.set_defaults(func=cmd_bathy_info)

    for name, func, helptext in (
            ("simulate-1d", cmd_simulate_1d, "homogenized 1D solver"),
            ("simulate-2d-spectral", cmd_simulate_2d_spectral, "2D pseudospectral solver"),
            ("simulate-2d-fv", cmd_simulate_2d_fv, "2D finite-volume solver")):
        p = sub.add_parser(name, help=f"run the {helptext} from a config")
        p.add_argument("config", help="config file or bundled config name")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--t-end", type=float, default=None, help="override t_end")
        p.set_defaults(func=func)

    p = sub.add_parser("traveling-wave", help="solitary wave of the homogenized system")
    p.add_argument("--V", type=float, required=True, help="wave speed in m/s")
    p.add_argument("--eps", type=float, default=1e-8,
                   help="initial offset relative to the center equilibrium (default: 1e-8)")
    p.add_argument("--samples", type=int, default=4001, help="profile samples (default: 4001)")
    p.add_argument("--out", default=None, help="profile CSV (xi, q, eta)")
    _add_profile_args(p)
    p.set_defaults(func=cmd_traveling_wave)

    p = sub.add_parser("reconstruct", help="2D fields from a 1D mean snapshot")
    p.add_argument("snapshot", help="1D snapshot CSV (x, eta_bar, q_bar)")
    p.add_argument("--config", required=True, help="config with the bathymetry")
    p.add_argument("--ny", type=int, default=64, help="y cells (default: 64)")
    p.add_argument("--direction", type=int, choices=(1, -1), default=1,
                   help="+1 right-going, -1 left-going (default: 1)")
    p.add_argument("--cell-average", action="store_true",
                   help="use y-profiles averaged over each cell")
    p.add_argument("--out", default="reconstruction.npz", help="output .npz")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("compare", help="compare two mean surfaces (CSV or .npz)")
    p.add_argument("reference")
    p.add_argument("other")
    p.add_argument("--out", default=None, help="write metrics JSON here")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("run", help="full experiment(s) with comparison report")
    p.add_argument("configs", nargs="+", help="config files or bundled config names")
    p.add_argument("--out", default="out", help="output root (default: out)")
    p.add_argument("--jobs", type=int, default=1, help="experiments run in parallel")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (BathyhomError, ValueError, OSError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
