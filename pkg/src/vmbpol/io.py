"""Serialisation of artifacts: CSV tables, time series and JSON records.

Every artifact starts with provenance metadata (config hash, seed, toolkit
version).  CSV files carry it as ``# key=value`` comment lines, JSON files as
a ``"meta"`` block.  Floats are written with 17 significant digits so that a
read-back is bit-exact.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from ._version import __version__
from .exceptions import DataIOError
from .synthesis import TimeSeries

__all__ = [
    "artifact_meta",
    "write_csv",
    "read_csv",
    "write_timeseries",
    "read_timeseries",
    "write_json",
    "read_json",
    "TIME_COLUMNS",
]

TIME_COLUMNS = {"A": ("t_s", "i_A"), "relative": ("t_s", "i_over_Iout")}


def artifact_meta(config_sha256: str | None = None, seed: int | None = None, **extra) -> dict:
    meta = {"toolkit": "vmbpol", "version": __version__, "config_sha256": config_sha256, "seed": seed}
    meta.update(extra)
    return meta


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def _meta_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def write_csv(path, columns, rows, meta: dict | None = None) -> Path:
    """Write a table with a ``# key=value`` metadata preamble."""
    path = Path(path)
    lines = []
    for k, v in (meta or {}).items():
        lines.append(f"# {k}={json.dumps(_jsonable(v))}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path) -> tuple[dict, list[str], np.ndarray]:
    """Inverse of :func:`write_csv` for numeric tables: ``(meta, columns, data)``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataIOError(f"cannot read {path}: {exc}") from exc
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if sep:
                meta[key.strip()] = _meta_value(value.strip())
        elif line.strip():
            body.append(line)
    if not body:
        raise DataIOError(f"{path} has no header row")
    columns = body[0].split(",")
    try:
        data = np.array([[float(x) for x in line.split(",")] for line in body[1:]], dtype=float)
    except ValueError as exc:
        raise DataIOError(f"{path}: malformed numeric row ({exc})") from exc
    if data.size == 0:
        data = np.zeros((0, len(columns)))
    if data.shape[1] != len(columns):
        raise DataIOError(f"{path}: {data.shape[1]} values per row for {len(columns)} columns")
    return meta, columns, data


def write_timeseries(path, ts: TimeSeries, meta: dict | None = None) -> Path:
    m = dict(meta or {})
    m.update(
        {
            "sample_rate_Hz": ts.sample_rate,
            "t0_s": ts.t0,
            "units": ts.units,
            "i_out": ts.i_out,
            "seed": ts.seed,
            "n_samples": len(ts.samples),
            "chunk_layout": ts.chunk_layout,
        }
    )
    t = ts.times()
    return write_csv(path, TIME_COLUMNS[ts.units], zip(t, ts.samples), m)


def read_timeseries(path) -> TimeSeries:
    meta, columns, data = read_csv(path)
    units = meta.get("units", "A")
    if units not in TIME_COLUMNS or tuple(columns) != TIME_COLUMNS[units]:
        raise DataIOError(f"{path}: not a time-series file (columns {columns})")
    fs = meta.get("sample_rate_Hz")
    if fs is None:
        if len(data) < 2:
            raise DataIOError(f"{path}: cannot infer the sample rate")
        fs = 1.0 / float(np.median(np.diff(data[:, 0])))
    return TimeSeries(
        sample_rate=float(fs),
        samples=data[:, 1].copy(),
        t0=float(meta.get("t0_s", data[0, 0] if len(data) else 0.0)),
        seed=meta.get("seed"),
        units=units,
        i_out=meta.get("i_out"),
    )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path, payload: dict, meta: dict | None = None) -> Path:
    path = Path(path)
    record = {"meta": meta or {}}
    record.update(payload)
    text = json.dumps(_jsonable(record), sort_keys=True, indent=2, allow_nan=False)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc}") from exc
    return path


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataIOError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataIOError(f"{path} is not valid JSON: {exc}") from exc
