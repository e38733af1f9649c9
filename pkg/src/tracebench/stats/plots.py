"""Declarative plot documents.

Analysis code emits PlotSpec JSON; rasterization happens in the CLI (SVG)
or the web console.  Paired series share a name prefix (``data_x`` with
``data_y``); histograms carry ``edges`` with one more entry than ``counts``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import TracebenchError

SCHEMA_VERSION = 1

PLOT_KINDS = (
    "density_fit",
    "cdf_fit",
    "qq",
    "pp",
    "ecdf",
    "log_histogram",
    "spline_cdf",
    "timeseries",
)

_SCALES = ("linear", "log")


@dataclass
class PlotSpec:
    kind: str
    series: dict
    labels: dict = field(default_factory=dict)
    x_scale: str = "linear"
    y_scale: str = "linear"
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise TracebenchError(f"unknown plot kind {self.kind!r}")
        if self.x_scale not in _SCALES or self.y_scale not in _SCALES:
            raise TracebenchError("axis scales must be 'linear' or 'log'")
        self.series = {
            name: [float(v) for v in values] for name, values in self.series.items()
        }
        for name, values in self.series.items():
            if name.endswith("_x"):
                mate = name[:-2] + "_y"
                if mate not in self.series:
                    raise TracebenchError(f"series {name!r} has no {mate!r} mate")
                if len(self.series[mate]) != len(values):
                    raise TracebenchError(f"series {name!r}/{mate!r} length mismatch")
        if "edges" in self.series or "counts" in self.series:
            edges = self.series.get("edges", [])
            counts = self.series.get("counts", [])
            if len(edges) != len(counts) + 1:
                raise TracebenchError("histogram needs len(edges) == len(counts) + 1")

    def to_json(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "series": self.series,
            "labels": dict(self.labels),
            "x_scale": self.x_scale,
            "y_scale": self.y_scale,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PlotSpec":
        return cls(
            kind=doc["kind"],
            series=doc["series"],
            labels=doc.get("labels", {}),
            x_scale=doc.get("x_scale", "linear"),
            y_scale=doc.get("y_scale", "linear"),
            schema_version=doc.get("schema_version", SCHEMA_VERSION),
        )


def _grid(lo: float, hi: float, n: int = 257) -> np.ndarray:
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, n)


def density_fit_plot(values: np.ndarray, dist, name: str) -> PlotSpec:
    counts, edges = np.histogram(values, bins="fd", density=True)
    grid = _grid(float(values.min()), float(values.max()))
    return PlotSpec(
        "density_fit",
        {
            "edges": edges,
            "counts": counts,
            "fit_x": grid,
            "fit_y": dist.pdf(grid),
        },
        labels={"title": f"density vs fitted {name}", "x": "value", "y": "density"},
    )


def cdf_fit_plot(values: np.ndarray, dist, name: str) -> PlotSpec:
    xs = np.sort(values)
    ys = np.arange(1, xs.size + 1) / xs.size
    grid = _grid(float(xs[0]), float(xs[-1]))
    return PlotSpec(
        "cdf_fit",
        {"data_x": xs, "data_y": ys, "fit_x": grid, "fit_y": dist.cdf(grid)},
        labels={"title": f"CDF vs fitted {name}", "x": "value", "y": "F(x)"},
    )


def qq_plot(values: np.ndarray, dist, name: str) -> PlotSpec:
    xs = np.sort(values)
    p = (np.arange(1, xs.size + 1) - 0.5) / xs.size
    theo = dist.quantile(p)
    lo = float(min(theo[0], xs[0]))
    hi = float(max(theo[-1], xs[-1]))
    return PlotSpec(
        "qq",
        {"data_x": theo, "data_y": xs, "ref_x": [lo, hi], "ref_y": [lo, hi]},
        labels={
            "title": f"Q-Q vs {name}",
            "x": "theoretical quantiles",
            "y": "sample quantiles",
        },
    )


def pp_plot(values: np.ndarray, dist, name: str) -> PlotSpec:
    xs = np.sort(values)
    p = (np.arange(1, xs.size + 1) - 0.5) / xs.size
    return PlotSpec(
        "pp",
        {"data_x": dist.cdf(xs), "data_y": p, "ref_x": [0.0, 1.0], "ref_y": [0.0, 1.0]},
        labels={
            "title": f"P-P vs {name}",
            "x": "fitted probability",
            "y": "empirical probability",
        },
    )


def make_gof_plots(values: np.ndarray, dist, name: str) -> list[PlotSpec]:
    return [
        density_fit_plot(values, dist, name),
        cdf_fit_plot(values, dist, name),
        qq_plot(values, dist, name),
        pp_plot(values, dist, name),
    ]


def ecdf_plot(values: np.ndarray) -> PlotSpec:
    xs = np.sort(values)
    ys = np.arange(1, xs.size + 1) / xs.size
    return PlotSpec(
        "ecdf",
        {"data_x": xs, "data_y": ys},
        labels={"title": "empirical CDF", "x": "value", "y": "F(x)"},
    )


def spline_cdf_plot(values: np.ndarray, spline) -> PlotSpec:
    xs = np.sort(values)
    ys = np.arange(1, xs.size + 1) / xs.size
    grid = _grid(float(spline.knots[0]), float(spline.knots[-1]))
    return PlotSpec(
        "spline_cdf",
        {
            "data_x": xs,
            "data_y": ys,
            "fit_x": grid,
            "fit_y": spline.cdf(grid),
            "knot_x": spline.knots,
            "knot_y": spline.cdf_values,
        },
        labels={"title": "spline-fitted CDF", "x": "value", "y": "F(x)"},
    )


def log_histogram_plot(edges, counts, axes: str) -> PlotSpec:
    return PlotSpec(
        "log_histogram",
        {"edges": edges, "counts": counts},
        labels={"title": "log histogram", "x": "value", "y": "count"},
        x_scale="log" if "x" in axes else "linear",
        y_scale="log" if "y" in axes else "linear",
    )


def timeseries_plot(times, named_series: dict, title: str) -> PlotSpec:
    series = {}
    for name, values in named_series.items():
        series[f"{name}_x"] = times
        series[f"{name}_y"] = values
    return PlotSpec(
        "timeseries",
        series,
        labels={"title": title, "x": "time (s)", "y": "value"},
    )


def regression_plot(x, y, fit_x, fit_y, degree: int) -> PlotSpec:
    return PlotSpec(
        "timeseries",
        {"data_x": x, "data_y": y, "fit_x": fit_x, "fit_y": fit_y},
        labels={"title": f"degree-{degree} polynomial fit", "x": "x", "y": "y"},
    )
