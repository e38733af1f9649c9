"""Column-level analysis operations over in-memory tables.

These back the scripted commands: column extraction, elementwise maps,
grouped aggregation, filtering, row differencing, distribution fits,
ECDF, log histograms and polynomial regression.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FitError
from ..expr import compile_predicate, compile_unary
from ..storage.core import FLOAT64, INT64, TEXT, ColumnMeta, Table
from ..storage.mapreduce import _sorted_keys
from . import plots
from .fitting import (
    Empirical,
    Exponential,
    LogNormal,
    SplineCdf,
    fit_exponential_params,
    fit_lognormal_params,
    fit_spline_cdf_params,
)


@dataclass(frozen=True)
class NumericVector:
    values: np.ndarray
    source: tuple | None = None

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise FitError("vector contains non-finite values")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    def tolist(self) -> list:
        return self.values.tolist()


def _numeric_vector(x) -> NumericVector:
    # text columns come back as Tables; fitting them is a caller mistake
    if not isinstance(x, NumericVector):
        raise FitError("operation needs a numeric column, not a text column or table")
    return x


def _check_index(table: Table, index: int) -> int:
    if not 1 <= index <= len(table.columns):
        raise FitError(
            f"column index {index} out of range for {len(table.columns)} columns"
        )
    return index - 1


def get_column(table: Table, index: int, source: str | None = None):
    """1-based column extraction: numeric columns become vectors, text
    columns a single-column table."""
    i = _check_index(table, index)
    col = table.columns[i]
    if col.dtype == TEXT:
        return Table((col,), [(row[i],) for row in table.rows])
    cells = []
    for r, row in enumerate(table.rows):
        if row[i] is None:
            raise FitError(
                f"column {col.name!r} has a null at row {r + 1}; filter nulls first"
            )
        cells.append(float(row[i]))
    return NumericVector(np.array(cells, dtype=np.float64), source=(source, index))


def apply_1col(vec: NumericVector, fn) -> NumericVector:
    vec = _numeric_vector(vec)
    if isinstance(fn, str):
        fn = compile_unary(fn)
    out = []
    for v in vec.values:
        r = fn(float(v))
        if r is None or isinstance(r, str):
            raise FitError("element expression produced a non-numeric value")
        out.append(float(r))
    return NumericVector(np.array(out, dtype=np.float64), source=vec.source)


def difference_between_rows(vec: NumericVector) -> NumericVector:
    vec = _numeric_vector(vec)
    if len(vec) < 2:
        raise FitError("need at least two rows to difference")
    return NumericVector(np.diff(vec.values), source=vec.source)


def filter_rows(table: Table, condition) -> Table:
    pred = compile_predicate(condition) if isinstance(condition, str) else condition
    return Table(table.columns, [row for row in table.rows if pred(row)])


_REDUCERS = ("count", "sum", "mean", "min", "max")


def aggregate_rows(table: Table, group_col: int, condition: str, fn: str) -> Table:
    if fn not in _REDUCERS:
        raise FitError(f"unknown reducer {fn!r} (choose from {', '.join(_REDUCERS)})")
    gi = _check_index(table, group_col)
    pred = compile_predicate(condition) if isinstance(condition, str) else condition

    value_idx = None
    if fn != "count":
        for j, col in enumerate(table.columns):
            if j != gi:
                value_idx = j
                break
        if value_idx is None:
            raise FitError(f"reducer {fn!r} needs a value column besides the group")
        if table.columns[value_idx].dtype == TEXT and fn in ("sum", "mean"):
            raise FitError(f"reducer {fn!r} needs a numeric value column")

    groups: dict = {}
    for row in table.rows:
        if pred(row):
            groups.setdefault(row[gi], []).append(row)

    def reduce_group(rows: list):
        if fn == "count":
            return len(rows)
        cells = [r[value_idx] for r in rows if r[value_idx] is not None]
        if not cells:
            return None
        if fn == "sum":
            return sum(cells)
        if fn == "mean":
            return sum(cells) / len(cells)
        return min(cells) if fn == "min" else max(cells)

    if fn == "count":
        out_dtype = INT64
    elif fn == "mean":
        out_dtype = FLOAT64
    else:
        out_dtype = table.columns[value_idx].dtype
    out_cols = (table.columns[gi], ColumnMeta(fn, out_dtype))
    rows = [(key, reduce_group(groups[key])) for key in _sorted_keys(groups)]
    return Table(out_cols, rows)


def compute_ecdf(vec: NumericVector):
    vec = _numeric_vector(vec)
    if len(vec) < 1:
        raise FitError("ECDF needs at least one sample")
    dist = Empirical(vec.values)
    return dist, plots.ecdf_plot(vec.values)


def fit_exponential(vec: NumericVector):
    vec = _numeric_vector(vec)
    dist = fit_exponential_params(vec.values)
    return dist, plots.make_gof_plots(vec.values, dist, "exponential")


def fit_lognormal(vec: NumericVector):
    vec = _numeric_vector(vec)
    dist = fit_lognormal_params(vec.values)
    return dist, plots.make_gof_plots(vec.values, dist, "lognormal")


def fit_spline_cdf(vec: NumericVector, n_intervals: int):
    vec = _numeric_vector(vec)
    dist = fit_spline_cdf_params(vec.values, n_intervals)
    return dist, plots.spline_cdf_plot(vec.values, dist)


def make_gof_plots(vec: NumericVector, dist):
    vec = _numeric_vector(vec)
    if isinstance(dist, Exponential):
        name = "exponential"
    elif isinstance(dist, LogNormal):
        name = "lognormal"
    elif isinstance(dist, SplineCdf):
        name = "spline CDF"
    else:
        name = "empirical"
    return plots.make_gof_plots(vec.values, dist, name)


@dataclass(frozen=True)
class PolyFit:
    degree: int
    coefficients: tuple  # c0..cn, ascending powers

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.polynomial.polynomial.polyval(x, np.asarray(self.coefficients))

    def to_json(self) -> dict:
        return {"degree": self.degree, "coefficients": list(self.coefficients)}


def polynomial_regression(
    y: NumericVector, degree: int, x: NumericVector | None = None
):
    """Least-squares fit; with no x the 1-based row index is the regressor."""
    if degree < 0:
        raise FitError("degree must be nonnegative")
    yv = _numeric_vector(y).values
    xv = np.arange(1, yv.size + 1, dtype=np.float64) if x is None else _numeric_vector(x).values
    if xv.size != yv.size:
        raise FitError(f"x and y lengths differ ({xv.size} vs {yv.size})")
    if yv.size < degree + 1:
        raise FitError(f"degree {degree} needs at least {degree + 1} points")
    design = np.vander(xv, degree + 1, increasing=True)
    coeffs, _, rank, _ = np.linalg.lstsq(design, yv, rcond=None)
    if rank < degree + 1:
        raise FitError(
            f"design matrix is rank deficient (rank {rank} < {degree + 1}); "
            "x values repeat"
        )
    fit = PolyFit(degree, tuple(float(c) for c in coeffs))
    grid = np.linspace(float(xv.min()), float(xv.max()), 257)
    plot = plots.regression_plot(xv, yv, grid, fit(grid), degree)
    return fit, plot


def log_histogram(vec: NumericVector, log_step: float, axes: str = "none"):
    vec = _numeric_vector(vec)
    if axes not in ("none", "x", "y", "xy"):
        raise FitError(f"axes must be one of none/x/y/xy, got {axes!r}")
    if log_step <= 0:
        raise FitError("log_step must be positive")
    if len(vec) == 0:
        raise FitError("log histogram needs at least one sample")
    if float(vec.values.min()) <= 0:
        raise FitError("log-spaced bins need strictly positive values")
    lo = np.log10(vec.values.min()) / log_step
    hi = np.log10(vec.values.max()) / log_step
    k_min = int(np.floor(lo))
    k_max = int(np.floor(hi)) + 1
    edges = 10.0 ** (np.arange(k_min, k_max + 1) * log_step)
    while edges[0] > vec.values.min():  # guard against float rounding
        k_min -= 1
        edges = 10.0 ** (np.arange(k_min, k_max + 1) * log_step)
    counts, edges = np.histogram(vec.values, bins=edges)
    return plots.log_histogram_plot(edges, counts, axes)
