"""Rasterizes PlotSpec documents to SVG via matplotlib (CLI side only)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .plots import PlotSpec

# at most this many markers per scatter so huge samples stay legible
_MAX_MARKERS = 2000


def _thin(xs, ys):
    if len(xs) <= _MAX_MARKERS:
        return xs, ys
    idx = np.linspace(0, len(xs) - 1, _MAX_MARKERS).astype(int)
    return np.asarray(xs)[idx], np.asarray(ys)[idx]


def _pairs(series: dict) -> list[str]:
    return sorted(n[:-2] for n in series if n.endswith("_x"))


def render_plotspec(spec: PlotSpec, out_path) -> Path:
    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    series = spec.series

    if "edges" in series:
        edges = np.asarray(series["edges"])
        counts = np.asarray(series["counts"])
        ax.stairs(counts, edges, fill=True, alpha=0.45, label="data")

    for prefix in _pairs(series):
        xs = series[f"{prefix}_x"]
        ys = series[f"{prefix}_y"]
        if prefix in ("fit", "ref"):
            style = "--" if prefix == "ref" else "-"
            ax.plot(xs, ys, style, label=prefix)
        elif prefix == "knot":
            ax.plot(xs, ys, "s", markersize=5, label="knots")
        elif spec.kind in ("qq", "pp", "cdf_fit", "spline_cdf"):
            tx, ty = _thin(xs, ys)
            ax.plot(tx, ty, "o", markersize=3, alpha=0.6, label=prefix)
        elif spec.kind == "ecdf":
            ax.step(xs, ys, where="post", label=prefix)
        else:
            ax.plot(xs, ys, label=prefix)

    ax.set_xscale(spec.x_scale)
    ax.set_yscale(spec.y_scale)
    labels = spec.labels
    ax.set_title(labels.get("title", spec.kind))
    ax.set_xlabel(labels.get("x", ""))
    ax.set_ylabel(labels.get("y", ""))
    if len(series) > 1:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, format="svg")
    plt.close(fig)
    return out_path
