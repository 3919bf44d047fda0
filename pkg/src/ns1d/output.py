"""Delimited persistence: diagnostic time series, snapshots, violations.

Floats are written with 17 significant digits, which round-trips binary64
exactly, and the writers are deterministic byte-for-byte for identical
inputs.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .core import Grid, State, make_grid
from .diagnostics import DIAG_FIELDS


def _fmt(x) -> str:
    return "%.17g" % float(x)


def emit_timeseries(records, path) -> Path:
    """Write diagnostic records as CSV with the fixed field order."""
    if not records:
        raise ValueError("no records to write")
    path = Path(path)
    lines = [",".join(DIAG_FIELDS)]
    for rec in records:
        lines.append(",".join(_fmt(v) for v in rec.as_tuple()))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_timeseries(path) -> dict:
    """Read a time-series CSV back into {field: array} (NaNs preserved)."""
    path = Path(path)
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    cols = {name: [] for name in header}
    for line in lines[1:]:
        for name, val in zip(header, line.split(",")):
            cols[name].append(float(val))
    return {name: np.asarray(vals) for name, vals in cols.items()}


def emit_snapshot(state: State, grid: Grid, path) -> Path:
    """Write one state as CSV: x_center, rho, x_face, u, m.

    Faces outnumber centers by one, so the final row leaves the center
    columns empty.  The file holds exactly header + (N + 1) rows and
    round-trips losslessly through :func:`load_snapshot`.
    """
    path = Path(path)
    n = grid.n_cells
    m = state.m
    lines = ["x_center,rho,x_face,u,m"]
    for i in range(n):
        lines.append(
            ",".join(
                (
                    _fmt(grid.centers[i]),
                    _fmt(state.rho[i]),
                    _fmt(grid.faces[i]),
                    _fmt(state.u[i]),
                    _fmt(m[i]),
                )
            )
        )
    lines.append(",," + ",".join((_fmt(grid.faces[n]), _fmt(state.u[n]), _fmt(m[n]))))
    path.write_text("\n".join(lines) + "\n")
    return path


def load_snapshot(path, t: float = 0.0) -> State:
    """Read a snapshot CSV back into a State; rejects non-finite entries."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0] != "x_center,rho,x_face,u,m":
        raise ValueError("%s: not a snapshot file" % path)
    rho, u = [], []
    for row, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise ValueError("%s: row %d malformed" % (path, row))
        try:
            vals = [float(p) if p != "" else math.nan for p in parts]
        except ValueError as err:
            raise ValueError("%s: row %d: %s" % (path, row, err)) from err
        if parts[0] != "":
            if not math.isfinite(vals[1]):
                raise ValueError("%s: row %d has non-finite density" % (path, row))
            rho.append(vals[1])
        if not math.isfinite(vals[3]):
            raise ValueError("%s: row %d has non-finite velocity" % (path, row))
        u.append(vals[3])
    return State(t=t, rho=np.asarray(rho), u=np.asarray(u))


def write_violations(path, violations) -> Path:
    """Machine-readable violation list (JSON)."""
    path = Path(path)
    payload = [
        {
            "t": v.t,
            "step": v.step,
            "kind": v.kind,
            "value": None if not math.isfinite(v.value) else v.value,
            "tolerance": None if not math.isfinite(v.tolerance) else v.tolerance,
            "message": v.message,
        }
        for v in violations
    ]
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
