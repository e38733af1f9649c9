"""Distribution fitting: exponential and lognormal MLE, spline-fitted
CDFs, and empirical distributions.

Every distribution exposes cdf/quantile (vectorized over numpy arrays)
plus JSON round-tripping so fitted results can parameterize workload
generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, ndtri

from .. import kernels
from ..errors import FitError

_SQRT2 = math.sqrt(2.0)


def _as_positive(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise FitError("expected a 1-d sample vector")
    if not np.all(np.isfinite(arr)):
        raise FitError("sample contains non-finite values")
    if arr.size and float(arr.min()) <= 0.0:
        raise FitError("sample contains nonpositive values")
    return arr


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise FitError(f"exponential rate must be positive, got {self.rate}")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x < 0, 0.0, self.rate * np.exp(-self.rate * x))

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x < 0, 0.0, -np.expm1(-self.rate * x))

    def quantile(self, p):
        p = np.asarray(p, dtype=np.float64)
        return -np.log1p(-p) / self.rate

    def to_json(self) -> dict:
        return {"family": "exponential", "rate": self.rate}


@dataclass(frozen=True)
class LogNormal:
    mu: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise FitError("lognormal parameters must be finite")
        if self.sigma <= 0:
            raise FitError(f"lognormal sigma must be positive, got {self.sigma}")

    def pdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros_like(x)
        pos = x > 0
        z = (np.log(x, where=pos, out=np.ones_like(x)) - self.mu) / self.sigma
        out[pos] = np.exp(-0.5 * z[pos] ** 2) / (
            x[pos] * self.sigma * math.sqrt(2 * math.pi)
        )
        return out

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        pos = x > 0
        z = (np.log(x, where=pos, out=np.ones_like(x)) - self.mu) / self.sigma
        out = np.zeros_like(x)
        out[pos] = 0.5 * (1.0 + erf(z[pos] / _SQRT2))
        return out

    def quantile(self, p):
        p = np.asarray(p, dtype=np.float64)
        return np.exp(self.mu + self.sigma * ndtri(p))

    def to_json(self) -> dict:
        return {"family": "lognormal", "mu": self.mu, "sigma": self.sigma}


def fc_slopes(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Fritsch-Carlson tangents: the cubic Hermite through (x, y) with
    these slopes is monotone wherever y is."""
    n = x.size
    if n < 2:
        raise FitError("need at least two knots")
    h = np.diff(x)
    if np.any(h <= 0):
        raise FitError("knots must be strictly increasing")
    d = np.diff(y) / h
    m = np.empty(n)
    m[0] = d[0]
    m[-1] = d[-1]
    for k in range(1, n - 1):
        if d[k - 1] * d[k] <= 0:
            m[k] = 0.0
        else:
            m[k] = 0.5 * (d[k - 1] + d[k])
    # clamp tangents so each interval stays monotone
    for k in range(n - 1):
        if d[k] == 0.0:
            m[k] = 0.0
            m[k + 1] = 0.0
            continue
        a = m[k] / d[k]
        b = m[k + 1] / d[k]
        s = a * a + b * b
        if s > 9.0:
            tau = 3.0 / math.sqrt(s)
            m[k] = tau * a * d[k]
            m[k + 1] = tau * b * d[k]
    return m


class SplineCdf:
    """Monotone piecewise-cubic CDF through (knots, cdf_values)."""

    def __init__(self, knots, cdf_values, slopes=None):
        x = np.asarray(knots, dtype=np.float64)
        y = np.asarray(cdf_values, dtype=np.float64)
        if x.size != y.size or x.size < 2:
            raise FitError("spline CDF needs matching knot/value arrays, length >= 2")
        if np.any(np.diff(x) <= 0):
            raise FitError("spline knots must be strictly increasing")
        if np.any(np.diff(y) < 0) or y[0] < 0 or y[-1] > 1:
            raise FitError("cdf values must be nondecreasing within [0, 1]")
        self.knots = x
        self.cdf_values = y
        self.slopes = (
            np.asarray(slopes, dtype=np.float64) if slopes is not None else fc_slopes(x, y)
        )

    def cdf(self, q):
        q = np.atleast_1d(np.asarray(q, dtype=np.float64))
        out = kernels.hermite_eval(self.knots, self.cdf_values, self.slopes, q)
        return np.clip(out, 0.0, 1.0)

    def quantile(self, p, tol: float = 1e-10):
        p = np.atleast_1d(np.asarray(p, dtype=np.float64))
        return kernels.hermite_invert(self.knots, self.cdf_values, self.slopes, p, tol)

    def pdf(self, x, eps: float = 1e-6):
        # numeric slope of the fitted CDF; adequate for plot overlays
        x = np.asarray(x, dtype=np.float64)
        span = float(self.knots[-1] - self.knots[0])
        h = eps * max(span, 1.0)
        return (self.cdf(x + h) - self.cdf(x - h)) / (2 * h)

    def to_json(self) -> dict:
        return {
            "family": "spline_cdf",
            "knots": self.knots.tolist(),
            "cdf_values": self.cdf_values.tolist(),
            "slopes": self.slopes.tolist(),
        }

    def __eq__(self, other):
        return (
            isinstance(other, SplineCdf)
            and np.array_equal(self.knots, other.knots)
            and np.array_equal(self.cdf_values, other.cdf_values)
            and np.array_equal(self.slopes, other.slopes)
        )


class Empirical:
    """Resampling distribution over observed values."""

    def __init__(self, samples):
        arr = np.sort(np.asarray(samples, dtype=np.float64))
        if arr.size == 0:
            raise FitError("empirical distribution needs at least one sample")
        if not np.all(np.isfinite(arr)):
            raise FitError("sample contains non-finite values")
        self.samples = arr

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.searchsorted(self.samples, x, side="right") / self.samples.size

    def quantile(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=np.float64))
        n = self.samples.size
        idx = np.minimum((p * n).astype(np.int64), n - 1)
        return self.samples[idx]

    def to_json(self) -> dict:
        return {"family": "empirical", "samples": self.samples.tolist()}

    def __eq__(self, other):
        return isinstance(other, Empirical) and np.array_equal(
            self.samples, other.samples
        )


def dist_from_json(doc: dict):
    family = doc.get("family")
    if family == "exponential":
        return Exponential(doc["rate"])
    if family == "lognormal":
        return LogNormal(doc["mu"], doc["sigma"])
    if family == "spline_cdf":
        return SplineCdf(doc["knots"], doc["cdf_values"], doc.get("slopes"))
    if family == "empirical":
        return Empirical(doc["samples"])
    raise FitError(f"unknown distribution family {family!r}")


def fit_exponential_params(values) -> Exponential:
    arr = _as_positive(values)
    if arr.size < 2:
        raise FitError("exponential fit needs at least two samples")
    return Exponential(1.0 / float(arr.mean()))


def fit_lognormal_params(values) -> LogNormal:
    arr = _as_positive(values)
    if arr.size < 2:
        raise FitError("lognormal fit needs at least two samples")
    logs = np.log(arr)
    sigma = float(logs.std(ddof=0))
    if sigma == 0.0:
        raise FitError("lognormal fit undefined for zero-variance samples")
    return LogNormal(float(logs.mean()), sigma)


def fit_spline_cdf_params(values, n_intervals: int) -> SplineCdf:
    arr = np.sort(np.asarray(values, dtype=np.float64))
    if not np.all(np.isfinite(arr)):
        raise FitError("sample contains non-finite values")
    if n_intervals < 1:
        raise FitError("n_intervals must be positive")
    if arr.size < n_intervals + 1:
        raise FitError(
            f"spline fit over {n_intervals} intervals needs at least "
            f"{n_intervals + 1} samples, got {arr.size}"
        )
    qs = np.linspace(0.0, 1.0, n_intervals + 1)
    knots = np.quantile(arr, qs)
    # anchor the curve at 0 on the left; elsewhere match the ECDF
    ys = np.searchsorted(arr, knots, side="right") / arr.size
    ys[0] = 0.0
    keep_x = [knots[0]]
    keep_y = [ys[0]]
    for xk, yk in zip(knots[1:], ys[1:]):
        if xk == keep_x[-1]:
            keep_y[-1] = yk  # tied quantiles collapse onto one knot
        else:
            keep_x.append(xk)
            keep_y.append(yk)
    if len(keep_x) < 2:
        raise FitError("spline fit needs at least two distinct values")
    return SplineCdf(np.array(keep_x), np.array(keep_y))
