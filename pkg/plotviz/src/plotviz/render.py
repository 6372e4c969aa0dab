"""Figure rendering: CDF overlays, gain-surface heatmaps, gain-vs-bias lines.

All output is byte-deterministic for a given input: fixed figure geometry,
the Agg backend, and scrubbed image metadata.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .spec import PlotSpec, footer_text, load_cdf, load_surface

_SAVE_KWARGS = dict(dpi=110, metadata={"Software": None})


def _finish(fig, spec: PlotSpec):
    fig.text(0.99, 0.01, footer_text(spec.input_csvs), ha="right",
             va="bottom", fontsize=6, color="0.45")
    fig.savefig(spec.output_path, **_SAVE_KWARGS)
    plt.close(fig)


def render_cdf(spec: PlotSpec):
    """Throughput CDF overlay, one monotone curve per run label.

    Returns the plotted curves ({label: (n, 2) array}) so callers and tests
    can check the rendered data without decoding pixels.
    """
    curves = load_cdf(spec.input_csvs, spec.labels)
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    for label in curves:
        pts = curves[label][np.lexsort((curves[label][:, 1],
                                        curves[label][:, 0]))]
        curves[label] = pts
        ax.plot(pts[:, 0] / 1e6, pts[:, 1], label=label, linewidth=1.4)
    for q in (0.05, 0.5):
        ax.axhline(q, color="0.7", linewidth=0.8, linestyle="--", zorder=0)
    ax.set_xlabel("throughput [Mbps]")
    ax.set_ylabel("CDF")
    ax.set_ylim(0.0, 1.0)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right", fontsize=8)
    ax.set_title("user throughput CDF")
    _finish(fig, spec)
    return curves


def render_surface(spec: PlotSpec):
    """Gain heatmap over (power reduction, bias) or its per-bias line plot.

    ``gain_surface`` draws an annotated heatmap of the 5%-ile gains;
    ``gain_vs_bias`` draws gain-vs-bias lines, one per power-reduction
    value. Returns (x_values, y_values, gain grid).
    """
    xs, ys, grids = load_surface(spec.input_csvs)
    gain = grids["gain_5pct_percent"]
    if spec.kind == "gain_vs_bias":
        fig, ax = plt.subplots(figsize=(7.0, 4.6))
        for i, x in enumerate(xs):
            ax.plot(ys, gain[i], marker="o", markersize=3.5,
                    label=f"power reduction {x:g} dB")
        ax.set_xlabel("selection bias [dB]")
        ax.set_ylabel("5%-ile throughput gain [%]")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
        ax.set_title("cell-edge gain vs bias")
    else:
        fig, ax = plt.subplots(figsize=(7.0, 4.6))
        masked = np.ma.masked_invalid(gain)
        im = ax.imshow(masked.T, origin="lower", aspect="auto",
                       cmap="viridis",
                       extent=(-0.5, xs.size - 0.5, -0.5, ys.size - 0.5))
        ax.set_xticks(range(xs.size), [f"{x:g}" for x in xs])
        ax.set_yticks(range(ys.size), [f"{y:g}" for y in ys])
        for i in range(xs.size):
            for j in range(ys.size):
                if not np.isnan(gain[i, j]):
                    ax.text(i, j, f"{gain[i, j]:.0f}", ha="center",
                            va="center", fontsize=7, color="w")
        ax.set_xlabel("power reduction X [dB]")
        ax.set_ylabel("selection bias Y [dB]")
        ax.set_title("5%-ile throughput gain [%] vs macro-only")
        fig.colorbar(im, ax=ax, label="gain [%]")
    _finish(fig, spec)
    return xs, ys, gain
