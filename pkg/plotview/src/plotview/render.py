"""CSV parsing, gauge-spec evaluation, and the two renderers."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from typing import Dict, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


class SchemaError(ValueError):
    """Input CSV or overlay spec does not match the trajectory contract."""


@dataclass
class TrajectoryTable:
    """One trajectory's columns, parsed from the CSV."""

    t: np.ndarray
    x: np.ndarray  # (k, n)
    u: np.ndarray  # (k, m)
    V: np.ndarray


@dataclass
class PlotSpec:
    csv_path: str
    out_png: str
    overlay_cvs: Optional[dict] = None  # gauge spec, optionally with a "box" entry
    dpi: int = 150
    axis_ranges: Optional[dict] = None  # {"x": [lo, hi], "y": [lo, hi]}


def _parse_header(header):
    if len(header) < 4 or header[:2] != ["traj_id", "t"] or header[-1] != "V":
        raise SchemaError(f"header must be traj_id,t,x1..,u1..,V; got {header}")
    middle = header[2:-1]
    n = m = 0
    for col in middle:
        match = re.fullmatch(r"([xu])(\d+)", col)
        if not match:
            raise SchemaError(f"unexpected column '{col}'")
        kind, idx = match.group(1), int(match.group(2))
        if kind == "x":
            if m > 0 or idx != n + 1:
                raise SchemaError(f"state column '{col}' out of order")
            n += 1
        else:
            if idx != m + 1:
                raise SchemaError(f"control column '{col}' out of order")
            m += 1
    if n == 0 or m == 0:
        raise SchemaError("need at least one state column and one control column")
    return n, m


def load_trajectories(csv_path: str) -> Dict[int, TrajectoryTable]:
    """Parse the trajectory CSV, keyed by traj_id in file order."""
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("CSV is empty") from None
        n, m = _parse_header(header)
        rows: Dict[int, list] = {}
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2 + n + m + 1:
                raise SchemaError(f"line {lineno}: expected {3 + n + m} fields, "
                                  f"got {len(row)}")
            try:
                tid = int(row[0])
                values = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise SchemaError(f"line {lineno}: {exc}") from exc
            rows.setdefault(tid, []).append(values)
    if not rows:
        raise SchemaError("CSV has a header but no data rows")
    tables = {}
    for tid, recs in rows.items():
        arr = np.asarray(recs)
        tables[tid] = TrajectoryTable(
            t=arr[:, 0],
            x=arr[:, 1:1 + n],
            u=arr[:, 1 + n:1 + n + m],
            V=arr[:, -1],
        )
    return tables


def gauge_value(spec: dict, u: np.ndarray) -> float:
    """Evaluate a gauge-spec JSON at a control point."""
    variant = spec.get("variant")
    if variant == "triangle":
        s3 = np.sqrt(3.0)
        return float(max(u[1], (s3 * u[0] - u[1]) / 2.0,
                         (-s3 * u[0] - u[1]) / 2.0, 0.0))
    if variant == "weighted_l1":
        return float(np.asarray(spec["weights"]) @ np.abs(u))
    if variant == "ellipsoid":
        Q = np.asarray(spec["Q"])
        return float(np.sqrt(max(u @ Q @ u, 0.0)))
    if variant == "polytope":
        return float(max(np.max(np.asarray(spec["normals"]) @ u), 0.0))
    if variant == "box":
        lo, hi = np.asarray(spec["lower"]), np.asarray(spec["upper"])
        return float(np.max(np.abs(u) / np.where(u >= 0, hi, lo)))
    raise SchemaError(f"unknown gauge variant '{variant}'")


def gauge_boundary(spec: dict, num_points: int = 512) -> np.ndarray:
    """Sample the phi = 1 curve by radially scaling unit directions (2-d)."""
    theta = np.linspace(0.0, 2.0 * np.pi, num_points)
    pts = []
    for th in theta:
        d = np.array([np.cos(th), np.sin(th)])
        p = gauge_value(spec, d)
        if p > 0:
            pts.append(d / p)
    return np.asarray(pts)


def render_portrait(spec: PlotSpec) -> int:
    """One curve per traj_id in the (x1, x2) plane; returns the curve count."""
    tables = load_trajectories(spec.csv_path)
    first = next(iter(tables.values()))
    if first.x.shape[1] < 2:
        raise SchemaError("portrait needs at least two state columns")
    fig, ax = plt.subplots(figsize=(7, 7))
    for tid, table in tables.items():
        ax.plot(table.x[:, 0], table.x[:, 1], lw=0.9)
        ax.plot(table.x[0, 0], table.x[0, 1], marker=".", ms=4, color="k")
    ax.plot(0.0, 0.0, marker="o", ms=7, color="k")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(f"phase portrait ({len(tables)} trajectories)")
    if spec.axis_ranges:
        ax.set_xlim(*spec.axis_ranges["x"])
        ax.set_ylim(*spec.axis_ranges["y"])
    ax.set_aspect("equal", adjustable="box")
    fig.savefig(spec.out_png, dpi=spec.dpi)
    plt.close(fig)
    return len(tables)


@dataclass
class ControlSetReport:
    num_points: int
    max_gauge_value: float
    outside_count: int  # points with phi > 1 + 1e-9


def render_control_set(spec: PlotSpec) -> ControlSetReport:
    """Control samples scattered against the CVS boundary and box outline."""
    if spec.overlay_cvs is None:
        raise SchemaError("control-set rendering needs an overlay gauge spec")
    tables = load_trajectories(spec.csv_path)
    first = next(iter(tables.values()))
    if first.u.shape[1] != 2:
        raise SchemaError("control-set rendering needs exactly two control columns")

    overlay = dict(spec.overlay_cvs)
    box = overlay.pop("box", None)
    fig, ax = plt.subplots(figsize=(6, 6))

    boundary = gauge_boundary(overlay)
    ax.plot(boundary[:, 0], boundary[:, 1], color="tab:blue", lw=1.5,
            label="CVS boundary")
    if box is not None:
        lo = np.asarray(box["lower"], dtype=float)
        hi = np.asarray(box["upper"], dtype=float)
        xs = [-lo[0], hi[0], hi[0], -lo[0], -lo[0]]
        ys = [-lo[1], -lo[1], hi[1], hi[1], -lo[1]]
        ax.plot(xs, ys, color="tab:gray", lw=1.0, ls="--", label="box")

    controls = np.vstack([t.u for t in tables.values()])
    ax.scatter(controls[:, 0], controls[:, 1], s=3, color="tab:red", alpha=0.5)
    ax.set_xlabel("u1")
    ax.set_ylabel("u2")
    ax.set_aspect("equal", adjustable="box")
    ax.legend(loc="upper right", fontsize=8)
    fig.savefig(spec.out_png, dpi=spec.dpi)
    plt.close(fig)

    vals = np.array([gauge_value(overlay, u) for u in controls])
    return ControlSetReport(
        num_points=controls.shape[0],
        max_gauge_value=float(vals.max()),
        outside_count=int(np.sum(vals > 1.0 + 1e-9)),
    )
