"""Serialization of frames, fields, trajectories, and reports.

Formats, chosen per consumer:
  * fields    -> NDJSON, one header line then one record per stored frame
  * worldlines-> CSV, one row per (trajectory, stored time)
  * reports   -> flat JSON
  * chain sweep -> CSV, one row per (energy, site)

All numeric output goes through repr-exact JSON floats, so a fixed config and
seed reproduce files byte for byte; the only timestamp lives in the NDJSON
header line.
"""

from __future__ import annotations

import csv
import json
import math
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .core import ConfigError, PotentialSpec
from .trajectories import TrajectoryEnsemble

FRAMES_SCHEMA = "bohmflow/frames-v1"


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json(data: dict, path) -> None:
    path = Path(path)
    try:
        path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def read_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc


def export_fields(frames, fieldsets, path, potential: PotentialSpec | None = None) -> None:
    """NDJSON dump: a schema header line, then {t, x, re_psi, ..., mask} per frame.

    The header is the only place a timestamp appears; frame records are pure
    functions of the data, and exported values round-trip bit-exactly.
    """
    frames = list(frames)
    fieldsets = list(fieldsets)
    if len(frames) != len(fieldsets):
        raise ConfigError(f"{len(frames)} frames but {len(fieldsets)} field sets")
    barrier = None
    if potential is not None and potential.variant == "rectangular_barrier":
        barrier = [potential.a, potential.b]
    header = {
        "schema_version": FRAMES_SCHEMA,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "n_frames": len(frames),
        "barrier": barrier,
    }
    path = Path(path)
    try:
        with path.open("w") as fh:
            fh.write(json.dumps(header) + "\n")
            for frame, fs in zip(frames, fieldsets):
                record = {
                    "t": frame.time,
                    "x": frame.grid.x.tolist(),
                    "re_psi": frame.values.real.tolist(),
                    "im_psi": frame.values.imag.tolist(),
                    "P": fs.P.tolist(),
                    "p_R": fs.p_R.tolist(),
                    "p_I": fs.p_I.tolist(),
                    "v_r": fs.v_r.tolist(),
                    "V_qu": fs.V_qu.tolist(),
                    "J": fs.J.tolist(),
                    "mask": [int(v) for v in fs.valid_mask],
                }
                fh.write(json.dumps(record) + "\n")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def read_fields(path) -> tuple[dict, list[dict]]:
    """Read an NDJSON fields file back into (header, records with numpy arrays)."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise ConfigError(f"{path}: empty file, expected a schema header")
    header = json.loads(lines[0])
    if header.get("schema_version") != FRAMES_SCHEMA:
        raise ConfigError(f"{path}: unexpected schema {header.get('schema_version')!r}")
    records = []
    for line in lines[1:]:
        raw = json.loads(line)
        rec = {"t": raw["t"]}
        for key in ("x", "re_psi", "im_psi", "P", "p_R", "p_I", "v_r", "V_qu", "J"):
            rec[key] = np.asarray(raw[key], dtype=float)
        rec["mask"] = np.asarray(raw["mask"], dtype=bool)
        records.append(rec)
    return header, records


def write_trajectories_csv(ensemble: TrajectoryEnsemble, path) -> None:
    """One row per (trajectory, stored time): traj_id, t, x, flag."""
    path = Path(path)
    flags = ensemble.flags()
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["traj_id", "t", "x", "flag"])
            for i in range(ensemble.n_trajectories):
                flag = flags[i]
                for k, t in enumerate(ensemble.times):
                    writer.writerow([i, repr(float(t)),
                                     repr(float(ensemble.positions[i, k])), flag])
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def write_negf_csv(points, path) -> None:
    """Sweep output: energy, site, magnitude, theta, v, J per row.

    J is the bond current on (site, site+1); the final site repeats the last
    bond so every row stays complete.
    """
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["energy", "site", "magnitude", "theta", "v", "J"])
            for pt in points:
                n = pt.row.magnitude.size
                for j in range(n):
                    bond = pt.current[min(j, n - 2)]
                    writer.writerow([
                        repr(float(pt.energy)), j,
                        repr(float(pt.row.magnitude[j])),
                        repr(float(pt.row.theta[j])),
                        repr(float(pt.velocity[j])),
                        repr(float(bond)),
                    ])
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc
