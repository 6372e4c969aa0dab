"""Deterministic CSV emission and the run manifest.

All writers produce byte-stable output for a given input: rows are emitted
in a fixed order and floats are formatted with ``repr`` (shortest exact
round-trip), so rerunning with the same seed reproduces identical files.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

import numpy as np

from .errors import OutputExistsError
from .metrics import ThroughputDistribution, cdf_points

TOOL_VERSION = "0.1.0"

CDF_HEADER = "run_label,throughput_bps,cdf_fraction"
SURFACE_HEADER = ("x_reduction_db,y_bias_db,gain_5pct_percent,"
                  "gain_50pct_percent,coverage_fraction")
PC_HEADER = ("strategy,bias_db,served_class,p0_dbm,alpha,p_max_dbm,"
             "p5_bps,p50_bps,gain5_pct,feasible,fallback")
COVERAGE_HEADER = "x_reduction_db,y_bias_db,coverage_fraction"


def _fmt(x) -> str:
    return repr(float(x))


def check_overwrite(paths, overwrite: bool) -> None:
    """Refuse to clobber existing outputs unless explicitly allowed."""
    if overwrite:
        return
    existing = [str(p) for p in paths if Path(p).exists()]
    if existing:
        raise OutputExistsError(
            "refusing to overwrite existing output (pass overwrite): "
            + ", ".join(existing)
        )


def write_cdf_csv(path, runs) -> None:
    """CDF samples for one or more labelled runs.

    ``runs`` is a list of (label, samples) pairs; each run's samples are
    sorted and paired with empirical CDF fractions.
    """
    lines = [CDF_HEADER]
    for label, samples in runs:
        if len(samples) == 0:
            continue
        dist = ThroughputDistribution.from_samples(samples, label)
        values, fracs = cdf_points(dist)
        for v, fr in zip(values, fracs):
            lines.append(f"{label},{_fmt(v)},{_fmt(fr)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_surface_csv(path, surface) -> None:
    """Gain surface rows, x-major then y; undefined gains appear as nan."""
    lines = [SURFACE_HEADER]
    for i, x in enumerate(surface.x_values):
        for j, y in enumerate(surface.y_values):
            lines.append(",".join([
                _fmt(x), _fmt(y),
                _fmt(surface.gain5_pct[i, j]),
                _fmt(surface.gain50_pct[i, j]),
                _fmt(surface.coverage[i, j]),
            ]))
    Path(path).write_text("\n".join(lines) + "\n")


def write_pc_csv(path, strategy, results) -> None:
    """Chosen power-control configurations per bias point."""
    lines = [PC_HEADER]
    for r in results:
        for cls, t in (("macro_served", r.pc.macro_served),
                       ("rn_served", r.pc.rn_served)):
            lines.append(",".join([
                str(strategy.value), _fmt(r.bias_db), cls,
                _fmt(t.p0_dbm), _fmt(t.alpha), _fmt(t.p_max_dbm),
                _fmt(r.p5_bps), _fmt(r.p50_bps), _fmt(r.gain5_pct),
                str(int(r.feasible)), str(int(r.fallback)),
            ]))
    Path(path).write_text("\n".join(lines) + "\n")


def write_coverage_csv(path, rows) -> None:
    """Coverage fractions; rows are (x_reduction_db, y_bias_db, fraction)."""
    lines = [COVERAGE_HEADER]
    for x, y, frac in rows:
        lines.append(f"{_fmt(x)},{_fmt(y)},{_fmt(frac)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_resolved_config(out_dir, run_config) -> Path:
    path = Path(out_dir) / "resolved_config.json"
    path.write_text(json.dumps(run_config.to_resolved_dict(), indent=2,
                               sort_keys=True) + "\n")
    return path


def write_manifest(out_dir, run_config, output_names) -> Path:
    """Reproducibility manifest: config hash, seed, tool version, outputs."""
    manifest = {
        "config_hash": run_config.config_hash(),
        "seed": run_config.scenario.rng_seed,
        "tool_version": TOOL_VERSION,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "outputs": sorted(str(n) for n in output_names),
    }
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
