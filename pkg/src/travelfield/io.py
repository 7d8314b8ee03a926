"""File formats: TFLD binary frames, JSON sidecars, PGM and CSV exports.

TFLD layout (little endian): ``b"TFLD"``, version ``u16``, ``n1 u32``,
``n2 u32``, then ``n1 * n2`` float64 values in row-major order.
"""
from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .grid import Grid2D, SpaceTimeField

MAGIC = b"TFLD"
VERSION = 1
_HEADER = struct.Struct("<4sHII")
SIDECAR_NAME = "sidecar.json"

SIDECAR_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "travelfield space-time field sidecar",
    "type": "object",
    "required": ["format_version", "grid", "dt", "T", "seed", "scenario_hash", "frames"],
    "properties": {
        "format_version": {"type": "integer", "minimum": 1},
        "name": {"type": "string"},
        "grid": {
            "type": "object",
            "required": ["n1", "n2", "spacing", "origin"],
            "properties": {
                "n1": {"type": "integer", "minimum": 1},
                "n2": {"type": "integer", "minimum": 1},
                "spacing": {"type": "number", "exclusiveMinimum": 0},
                "origin": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            },
        },
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "T": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "scenario_hash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "generator": {"type": "string"},
        "plan": {"type": ["object", "null"]},
        "extended_grid": {"type": ["object", "null"]},
        "embedding": {"type": ["object", "null"]},
        "metadata": {"type": "object"},
        "frames": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["index", "time", "file"],
                "properties": {
                    "index": {"type": "integer", "minimum": 0},
                    "time": {"type": "number"},
                    "file": {"type": "string"},
                    "pgm": {
                        "type": "object",
                        "required": ["file", "min", "max"],
                        "properties": {"file": {"type": "string"}, "min": {"type": "number"},
                                       "max": {"type": "number"}},
                    },
                    "csv": {"type": "string"},
                    "velocity": {"type": "array", "items": {"type": "number"}},
                    "center": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                    "thetas": {"type": "array", "items": {"type": "number"}},
                    "weights": {"type": "array", "items": {"type": "number"}},
                    "weights_raw": {"type": "array", "items": {"type": "number"}},
                    "velocity_grid": {
                        "type": "object",
                        "required": ["v1", "v2"],
                        "properties": {"v1": {"type": "string"}, "v2": {"type": "string"}},
                    },
                },
            },
        },
    },
}


def write_tfld(path, values) -> None:
    a = np.ascontiguousarray(values, dtype="<f8")
    if a.ndim != 2:
        raise ValueError("TFLD stores 2-D arrays")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, a.shape[0], a.shape[1]))
        fh.write(a.tobytes(order="C"))


def read_tfld(path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) < _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, n1, n2 = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != n1 * n2:
        raise ValueError(f"{path}: expected {n1 * n2} values, found {data.size}")
    return data.reshape(n1, n2).astype(float)


def write_pgm(path, values) -> tuple[float, float]:
    """8-bit binary PGM, min-max scaled.  Returns ``(min, max)``."""
    a = np.asarray(values, dtype=float)
    lo, hi = float(a.min()), float(a.max())
    span = hi - lo
    q = np.zeros(a.shape, np.uint8) if span == 0 else np.rint((a - lo) / span * 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{a.shape[1]} {a.shape[0]}\n255\n".encode("ascii"))
        fh.write(q.tobytes())
    return lo, hi


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError(f"{path}: only 8-bit PGM supported")
    return np.frombuffer(parts[4][: w * h], dtype=np.uint8).reshape(h, w)


def unscale_pgm(q, lo: float, hi: float) -> np.ndarray:
    return lo + np.asarray(q, dtype=float) / 255.0 * (hi - lo)


def write_csv(path, values) -> None:
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerows(np.asarray(values).tolist())


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items() if not isinstance(v, np.ndarray) or v.ndim <= 2}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    return x


def write_spacetime(out_dir, field: SpaceTimeField, *, config=None, plan=None, big_grid=None,
                    embedding=None, formats=("bin",)) -> dict:
    """Write frames and the JSON sidecar into ``out_dir``; return the sidecar."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = dict(field.metadata)
    per_frame = meta.pop("frames", None)
    vgrids = meta.pop("velocity_grids", None)
    frames = []
    for k, frame in enumerate(field.frames):
        entry = {"index": k, "time": k * field.dt, "file": f"frame_{k:03d}.tfld"}
        write_tfld(out / entry["file"], frame)
        if "pgm" in formats:
            name = f"frame_{k:03d}.pgm"
            lo, hi = write_pgm(out / name, frame)
            entry["pgm"] = {"file": name, "min": lo, "max": hi}
        if "csv" in formats:
            entry["csv"] = f"frame_{k:03d}.csv"
            write_csv(out / entry["csv"], frame)
        if per_frame is not None:
            entry.update(_jsonable(per_frame[k]))
        if vgrids is not None:
            names = {c: f"velocity_{k:03d}_{c}.tfld" for c in ("v1", "v2")}
            write_tfld(out / names["v1"], vgrids[k, 0])
            write_tfld(out / names["v2"], vgrids[k, 1])
            entry["velocity_grid"] = names
        frames.append(entry)
    sidecar = {
        "format_version": VERSION,
        "name": getattr(config, "name", "field"),
        "grid": field.grid.to_dict(),
        "dt": field.dt,
        "T": field.epochs,
        "seed": int(getattr(config, "seed", 0)),
        "scenario_hash": config.scenario_hash() if config is not None else "0" * 64,
        "generator": meta.get("generator", "unknown"),
        "plan": None if plan is None else _jsonable(plan.to_dict()),
        "extended_grid": None if big_grid is None else {"N": big_grid.n1, "origin": list(big_grid.origin)},
        "embedding": None if embedding is None else embedding.to_dict(),
        "metadata": _jsonable(meta),
        "frames": frames,
    }
    with open(out / SIDECAR_NAME, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
    return sidecar


def read_spacetime(out_dir) -> SpaceTimeField:
    out = Path(out_dir)
    with open(out / SIDECAR_NAME, encoding="utf-8") as fh:
        side = json.load(fh)
    frames = np.stack([read_tfld(out / f["file"]) for f in side["frames"]])
    return SpaceTimeField(Grid2D.from_dict(side["grid"]), frames, side["dt"], {"sidecar": side})
