"""On-disk formats: fields and traces as CSV, configs and verdicts as JSON.

Everything written here is deterministic for a fixed input: floats go
through repr (JSON) or %.17g (CSV), JSON keys are sorted, and no
timestamps or other ambient state are recorded.  Identical runs therefore
produce byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
import os

import numpy as np

from .dynamics import SolverConfig, Trajectory
from .grid import Field, SpectralGrid
from .invariants import NormTrace

__all__ = [
    "save_field",
    "load_field",
    "save_trace",
    "load_trace",
    "save_trajectory",
    "load_trajectory",
    "write_json",
    "read_json",
]


def save_field(u: Field, path: str):
    """CSV column format: header '# n=<int> L=<float>', one sample per row."""
    header = f"n={u.grid.n_points} L={u.grid.half_length!r}"
    np.savetxt(path, u.values, fmt="%.17g", header=header, comments="# ")


def load_field(path: str) -> Field:
    with open(path) as fh:
        header = fh.readline()
    if not header.startswith("# "):
        raise ValueError(f"{path}: missing field header")
    meta = dict(item.split("=") for item in header[2:].split())
    grid = SpectralGrid(int(meta["n"]), float(meta["L"]))
    return Field(grid, np.loadtxt(path))


def save_trace(trace: NormTrace, path: str):
    """CSV 'time,value' rows with a '# name=... run=...' header."""
    header = f"name={trace.name} run={trace.run_id}\ntime,value"
    data = np.column_stack([trace.times, trace.values])
    np.savetxt(path, data, fmt="%.17g", delimiter=",", header=header, comments="# ")


def load_trace(path: str) -> NormTrace:
    with open(path) as fh:
        header = fh.readline()
    meta = dict(item.split("=") for item in header[2:].split())
    data = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
    return NormTrace(meta["name"], data[:, 0], data[:, 1], meta.get("run", ""))


def write_json(obj: dict, path: str):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _config_dict(cfg: SolverConfig) -> dict:
    return dataclasses.asdict(cfg)


def save_trajectory(traj: Trajectory, directory: str):
    """Directory layout: meta.json plus one snap_<index>.csv per snapshot."""
    os.makedirs(directory, exist_ok=True)
    grid = traj.grid
    meta = {
        "n": grid.n_points,
        "L": grid.half_length,
        "times": list(traj.times),
        "config": _config_dict(traj.config),
        "snapshots": [f"snap_{i:05d}.csv" for i in range(len(traj.snapshots))],
    }
    write_json(meta, os.path.join(directory, "meta.json"))
    for name, snap in zip(meta["snapshots"], traj.snapshots):
        save_field(snap, os.path.join(directory, name))


def load_trajectory(directory: str) -> Trajectory:
    meta = read_json(os.path.join(directory, "meta.json"))
    snaps = [load_field(os.path.join(directory, name)) for name in meta["snapshots"]]
    cfg = SolverConfig(**meta["config"])
    return Trajectory(np.array(meta["times"]), snaps, cfg)
