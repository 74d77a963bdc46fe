"""CSV and JSON emission helpers.

Floats are written with 17 significant digits (full double round trip)
and the C locale formatting that Python guarantees, so files are
bit-stable across platforms and worker counts.  Non-finite values become
null in JSON output.
"""

from __future__ import annotations

import json
import math
from typing import IO, Iterable

import numpy as np

from .dynamics import DynState
from .picard import GridFunctionPair
from .radial import RadialTrajectory


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_rows(fh: IO[str], header: str, columns: Iterable[np.ndarray]) -> None:
    cols = [np.asarray(c, dtype=float) for c in columns]
    fh.write(header + "\n")
    for row in zip(*cols):
        fh.write(",".join(fmt(x) for x in row) + "\n")


def write_trajectory_csv(traj: RadialTrajectory, path: str) -> None:
    with open(path, "w") as fh:
        _write_rows(fh, "r,u,du,v,dv,P,Q",
                    (traj.r, traj.u, traj.du, traj.v, traj.dv, traj.P, traj.Q))


def write_picard_csv(pair: GridFunctionPair, path: str) -> None:
    with open(path, "w") as fh:
        _write_rows(fh, "r,u,du,v", (pair.grid, pair.u_vals, pair.du_vals, pair.v_vals))


def write_dyn_csv(states: list[DynState], path: str) -> None:
    with open(path, "w") as fh:
        fh.write("t,X,Y,Z,W\n")
        for st in states:
            fh.write(",".join(fmt(x) for x in (st.t, st.X, st.Y, st.Z, st.W)) + "\n")


def write_ratio_csv(r: np.ndarray, u_ratio: np.ndarray, v_ratio: np.ndarray, path: str) -> None:
    with open(path, "w") as fh:
        _write_rows(fh, "r,u_ratio,v_ratio", (r, u_ratio, v_ratio))


def json_ready(obj):
    """Recursively convert to plain JSON types; non-finite floats -> null."""
    if isinstance(obj, dict):
        return {key: json_ready(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(val) for val in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, complex):
        return [json_ready(obj.real), json_ready(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        val = float(obj)
        return val if math.isfinite(val) else None
    return obj


def dump_json(obj, fh: IO[str]) -> None:
    json.dump(json_ready(obj), fh, indent=2, sort_keys=True)
    fh.write("\n")
