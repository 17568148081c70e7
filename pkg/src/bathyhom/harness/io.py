"""Snapshot and report serialization.

* 1D snapshots: CSV with columns ``x, eta_bar, q_bar`` written with 17
  significant digits (exact round trip) and a JSON sidecar of metadata.
* 2D snapshots: ``.npz`` holding the field arrays, the coordinate vectors
  and a JSON ``header`` (``nx``, ``ny``, bounds, ``t``, variable names).
* Reports: plain JSON.
"""
import json
from pathlib import Path

import numpy as np

ONE_D_COLUMNS = ("x", "eta_bar", "q_bar")


def _sidecar(path):
    return Path(path).with_suffix(".json")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _write_text(path, text):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_json(path, data):
    _write_text(path, json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc


def write_snapshot_1d(path, x, eta, q, meta=None):
    """Write ``x, eta_bar, q_bar`` columns and ``meta`` to a JSON sidecar."""
    path = Path(path)
    data = np.column_stack([np.asarray(x, float), np.asarray(eta, float), np.asarray(q, float)])
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header=",".join(ONE_D_COLUMNS),
                   comments="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    if meta is not None:
        write_json(_sidecar(path), meta)
    return path


def read_snapshot_1d(path):
    """Return ``(x, eta_bar, q_bar, meta)``; ``meta`` is ``{}`` without a sidecar."""
    path = Path(path)
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    side = _sidecar(path)
    meta = read_json(side) if side.exists() else {}
    return data[:, 0], data[:, 1], data[:, 2], meta


def write_state_1d(path, state, meta=None):
    meta = dict(meta or {})
    meta.setdefault("t", state.t)
    return write_snapshot_1d(path, state.grid.x, state.eta, state.q, meta)


def write_field_2d(path, x, y, fields, t, meta=None):
    """Write named 2D arrays sampled on ``x`` (rows) by ``y`` (columns)."""
    path = Path(path)
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    header = {
        "nx": int(x.size), "ny": int(y.size),
        "x_bounds": [float(x[0]), float(x[-1])],
        "y_bounds": [float(y[0]), float(y[-1])],
        "t": float(t),
        "variables": sorted(fields),
    }
    header.update(_jsonable(meta or {}))
    for name, arr in fields.items():
        if np.shape(arr) != (x.size, y.size):
            raise ValueError(f"field {name!r} has shape {np.shape(arr)}, "
                             f"expected {(x.size, y.size)}")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as fh:
            np.savez(fh, x=x, y=y, header=np.array(json.dumps(header, sort_keys=True)),
                     **{f"field_{k}": np.asarray(v, float) for k, v in fields.items()})
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def read_field_2d(path):
    """Return ``(x, y, fields, header)``."""
    try:
        with np.load(path) as data:
            header = json.loads(str(data["header"]))
            fields = {k[len("field_"):]: data[k] for k in data.files if k.startswith("field_")}
            return data["x"], data["y"], fields, header
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc


def write_report(path, report):
    data = report.to_dict() if hasattr(report, "to_dict") else report
    write_json(path, data)
    return Path(path)


def write_profile_csv(path, columns):
    """Write named equal-length columns (used for traveling-wave profiles)."""
    path = Path(path)
    names = list(columns)
    data = np.column_stack([np.asarray(columns[n], float) for n in names])
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, data, fmt="%.17g", delimiter=",", header=",".join(names), comments="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path
