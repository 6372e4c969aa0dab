"""Plot specifications and CSV ingestion.

This package is a pure CSV-to-image transform: it never recomputes any
simulation quantity, and every figure footer carries a hash of its input
files so a figure can be traced back to the exact data it was drawn from.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CDF_COLUMNS = ["run_label", "throughput_bps", "cdf_fraction"]
SURFACE_COLUMNS = ["x_reduction_db", "y_bias_db", "gain_5pct_percent",
                   "gain_50pct_percent", "coverage_fraction"]

PLOT_KINDS = ("cdf_overlay", "gain_surface", "gain_vs_bias")


class PlotDataError(ValueError):
    """Input CSV is missing, malformed, ragged, or lacks a requested label."""


@dataclass(frozen=True)
class PlotSpec:
    """One batch figure: input CSVs, plot kind, label selection, output path."""

    input_csvs: tuple[str, ...]
    kind: str
    output_path: str
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise PlotDataError(
                f"unknown plot kind {self.kind!r}; legal kinds are {PLOT_KINDS}"
            )
        if not self.input_csvs:
            raise PlotDataError("a plot spec needs at least one input CSV")


def input_hash(paths) -> str:
    """Joint sha256 over the raw bytes of all input files (short form)."""
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return h.hexdigest()[:12]


def footer_text(paths) -> str:
    names = ", ".join(Path(p).name for p in paths)
    return f"inputs: {names} | sha256 {input_hash(paths)}"


def _read_rows(path, expected_columns):
    path = Path(path)
    if not path.exists():
        raise PlotDataError(f"input CSV not found: {path}")
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise PlotDataError(f"{path} is empty (no header)")
        if header != expected_columns:
            raise PlotDataError(
                f"{path} has columns {header}; expected {expected_columns}"
            )
        rows = list(reader)
    if not rows:
        raise PlotDataError(f"{path} carries no data rows")
    return rows


def load_cdf(paths, labels=()):
    """Per-label sorted (throughput, cdf) curves from one or more CDF CSVs."""
    curves: dict[str, list] = {}
    for path in paths:
        for label, tput, frac in _read_rows(path, CDF_COLUMNS):
            curves.setdefault(label, []).append((float(tput), float(frac)))
    out = {label: np.array(points) for label, points in curves.items()}
    if labels:
        missing = [l for l in labels if l not in out]
        if missing:
            raise PlotDataError(
                f"run labels {missing} not in the input; available labels: "
                f"{sorted(out)}"
            )
        out = {l: out[l] for l in labels}
    return out


def load_surface(paths):
    """Complete (x, y) gain grid from a surface CSV; ragged grids are errors."""
    rows = []
    for path in paths:
        for vals in _read_rows(path, SURFACE_COLUMNS):
            rows.append([float(v) for v in vals])
    data = np.array(rows)
    xs = np.unique(data[:, 0])
    ys = np.unique(data[:, 1])
    if len(rows) != xs.size * ys.size:
        raise PlotDataError(
            f"ragged grid: {len(rows)} rows cannot fill a "
            f"{xs.size} x {ys.size} (x, y) grid"
        )
    grids = {}
    for col, name in ((2, "gain_5pct_percent"), (3, "gain_50pct_percent"),
                      (4, "coverage_fraction")):
        grid = np.full((xs.size, ys.size), np.nan)
        for row in data:
            i = int(np.searchsorted(xs, row[0]))
            j = int(np.searchsorted(ys, row[1]))
            if not np.isnan(grid[i, j]):
                raise PlotDataError(
                    f"duplicate grid cell (x={row[0]:g}, y={row[1]:g})"
                )
            grid[i, j] = row[col]
        grids[name] = grid
    return xs, ys, grids
