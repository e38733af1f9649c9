"""Metric series extraction from event logs, smoothing, and comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import SimError
from .sim.entities import (
    EV_FAILURE_REQUEUE,
    EV_TASK_EVICT,
    EV_TASK_FINISH,
    EV_TASK_KILL,
    EV_TASK_START,
    EV_TASK_SUBMIT,
    EventLog,
)

# the four reported metrics plus bookkeeping series used by invariant checks
METRICS = ("running", "completed", "waiting", "evicted")
EXTRA_METRICS = ("submitted", "killed", "failure_requeued")


@dataclass
class TimeSeries:
    t: np.ndarray
    v: np.ndarray
    dt: float

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=np.float64)
        self.v = np.asarray(self.v, dtype=np.float64)
        if self.t.size != self.v.size:
            raise SimError("time and value arrays differ in length")
        if self.dt <= 0:
            raise SimError("dt must be positive")

    def __len__(self) -> int:
        return self.t.size


def _metric_delta(record, metric) -> int:
    kind = record.kind
    if metric == "submitted":
        return 1 if kind == EV_TASK_SUBMIT else 0
    if metric == "completed":
        return 1 if kind == EV_TASK_FINISH else 0
    if metric == "evicted":
        return 1 if kind == EV_TASK_EVICT else 0
    if metric == "failure_requeued":
        return 1 if kind == EV_FAILURE_REQUEUE else 0
    if metric == "killed":
        return 1 if kind == EV_TASK_KILL else 0
    if metric == "running":
        if kind == EV_TASK_START:
            return 1
        if kind in (EV_TASK_FINISH, EV_TASK_EVICT, EV_FAILURE_REQUEUE):
            return -1
        if kind == EV_TASK_KILL and record.machine_id is not None:
            return -1
        return 0
    if metric == "waiting":
        if kind in (EV_TASK_SUBMIT, EV_TASK_EVICT, EV_FAILURE_REQUEUE):
            return 1
        if kind == EV_TASK_START:
            return -1
        if kind == EV_TASK_KILL and record.machine_id is None:
            return -1
        return 0
    raise SimError(
        f"unknown metric {metric!r} (choose from {', '.join(METRICS + EXTRA_METRICS)})"
    )


def _event_deltas(log: EventLog, metric: str):
    times, deltas = [], []
    for rec in log:
        d = _metric_delta(rec, metric)
        if d:
            times.append(rec.time)
            deltas.append(float(d))
    return np.array(times, dtype=np.float64), np.array(deltas, dtype=np.float64)


def extract_metric_series(
    log: EventLog, metric: str, dt: float, horizon: float | None = None
) -> TimeSeries:
    """Samples the metric at t = k*dt; the value at a sample is the state
    after all events at or before that instant."""
    if dt <= 0:
        raise SimError("dt must be positive")
    times, deltas = _event_deltas(log, metric)
    if horizon is None:
        if len(log) == 0:
            return TimeSeries(np.array([]), np.array([]), dt)
        last = max(rec.time for rec in log)
        n = math.ceil(last / dt - 1e-9)
    else:
        n = math.floor(horizon / dt + 1e-9)
    grid = np.arange(0, n + 1, dtype=np.float64) * dt
    values = kernels.step_series(times, deltas, grid)
    return TimeSeries(grid, values, dt)


def integrate_metric(log: EventLog, metric: str, horizon: float) -> float:
    """Exact time-average of a count metric over [0, horizon]."""
    if horizon <= 0:
        raise SimError("horizon must be positive")
    times, deltas = _event_deltas(log, metric)
    total = 0.0
    level = 0.0
    prev = 0.0
    for t, d in zip(times, deltas):
        if t > horizon:
            break
        total += level * (t - prev)
        level += d
        prev = t
    total += level * (horizon - prev)
    return total / horizon


@dataclass(frozen=True)
class SmoothingParams:
    alpha: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise SimError(f"alpha must be in (0, 1], got {self.alpha}")


def exp_smooth(series: TimeSeries, params: SmoothingParams) -> TimeSeries:
    if len(series) == 0:
        raise SimError("cannot smooth an empty series")
    return TimeSeries(series.t.copy(), kernels.exp_smooth(series.v, params.alpha), series.dt)


@dataclass(frozen=True)
class ComparisonReport:
    rmse: float
    pearson_r: float
    max_abs_diff: float
    n_samples: int

    def to_json(self) -> dict:
        return {
            "rmse": self.rmse,
            "pearson_r": self.pearson_r,
            "max_abs_diff": self.max_abs_diff,
            "n_samples": self.n_samples,
        }


def compare_series(a: TimeSeries, b: TimeSeries) -> ComparisonReport:
    if abs(a.dt - b.dt) > 1e-9:
        raise SimError(f"sampling intervals differ ({a.dt} vs {b.dt})")
    if len(a) == 0 or len(b) == 0:
        raise SimError("cannot compare empty series")
    dt = a.dt
    ia = np.rint(a.t / dt).astype(np.int64)
    ib = np.rint(b.t / dt).astype(np.int64)
    lo = max(ia[0], ib[0])
    hi = min(ia[-1], ib[-1])
    if hi < lo:
        raise SimError("series do not overlap in time")
    va = a.v[(ia >= lo) & (ia <= hi)]
    vb = b.v[(ib >= lo) & (ib <= hi)]
    if va.size != vb.size:
        raise SimError("series grids are misaligned")
    diff = va - vb
    rmse = float(np.sqrt(np.mean(diff**2)))
    max_abs = float(np.max(np.abs(diff)))
    if max_abs == 0.0:
        r = 1.0  # identical series, exactly
    elif np.ptp(va) == 0.0 or np.ptp(vb) == 0.0:
        r = 0.0  # correlation is undefined for a constant series
    else:
        r = float(np.corrcoef(va, vb)[0, 1])
    return ComparisonReport(rmse, r, max_abs, int(va.size))
