from .analysis import (
    NumericVector,
    PolyFit,
    aggregate_rows,
    apply_1col,
    compute_ecdf,
    difference_between_rows,
    filter_rows,
    fit_exponential,
    fit_lognormal,
    fit_spline_cdf,
    get_column,
    log_histogram,
    make_gof_plots,
    polynomial_regression,
)
from .fitting import (
    Empirical,
    Exponential,
    LogNormal,
    SplineCdf,
    dist_from_json,
    fc_slopes,
    fit_exponential_params,
    fit_lognormal_params,
    fit_spline_cdf_params,
)
from .plots import SCHEMA_VERSION, PlotSpec, timeseries_plot

__all__ = [
    "Empirical",
    "Exponential",
    "LogNormal",
    "NumericVector",
    "PlotSpec",
    "PolyFit",
    "SCHEMA_VERSION",
    "SplineCdf",
    "aggregate_rows",
    "apply_1col",
    "compute_ecdf",
    "difference_between_rows",
    "dist_from_json",
    "fc_slopes",
    "filter_rows",
    "fit_exponential",
    "fit_exponential_params",
    "fit_lognormal",
    "fit_lognormal_params",
    "fit_spline_cdf",
    "fit_spline_cdf_params",
    "get_column",
    "log_histogram",
    "make_gof_plots",
    "polynomial_regression",
    "timeseries_plot",
]
