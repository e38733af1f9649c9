"""Numeric hot-loop kernels.

Each kernel exists in two variants: a numba @njit build and a pure
numpy/scipy build.  The active variant is chosen at import time: numba is
used when it imports cleanly and the environment variable
``TRACEBENCH_NO_NUMBA`` is not set to ``1``/``true``/``yes``.  Both
variants implement identical arithmetic in identical order, so results
are interchangeable; ``benchmarks/bench_kernels.py`` compares their
throughput.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "USE_NUMBA",
    "backend_name",
    "exp_smooth",
    "hermite_eval",
    "hermite_invert",
    "step_series",
    "exp_smooth_numpy",
    "hermite_eval_numpy",
    "hermite_invert_numpy",
    "step_series_numpy",
]


def _numba_disabled() -> bool:
    return os.environ.get("TRACEBENCH_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")


try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag instead
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not _numba_disabled()


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# pure numpy variants


def exp_smooth_numpy(v: np.ndarray, alpha: float) -> np.ndarray:
    """Exponential smoothing s[k] = alpha*v[k] + (1-alpha)*s[k-1], s[0] = v[0]."""
    from scipy.signal import lfilter

    v = np.asarray(v, dtype=np.float64)
    if v.size == 0:
        return v.copy()
    b = np.array([alpha])
    a = np.array([1.0, -(1.0 - alpha)])
    # initial filter state makes s[0] come out as exactly v[0]
    zi = np.array([(1.0 - alpha) * v[0]])
    out, _ = lfilter(b, a, v, zi=zi)
    return out


def _hermite_terms(x, y, d, idx, q):
    """Cubic Hermite value on interval idx at query points q (vectorized)."""
    x0 = x[idx]
    x1 = x[idx + 1]
    h = x1 - x0
    t = (q - x0) / h
    t2 = t * t
    t3 = t2 * t
    h00 = 2.0 * t3 - 3.0 * t2 + 1.0
    h10 = t3 - 2.0 * t2 + t
    h01 = -2.0 * t3 + 3.0 * t2
    h11 = t3 - t2
    return h00 * y[idx] + h * h10 * d[idx] + h01 * y[idx + 1] + h * h11 * d[idx + 1]


def hermite_eval_numpy(x: np.ndarray, y: np.ndarray, d: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Evaluate a piecewise cubic Hermite interpolant at points q.

    Outside [x[0], x[-1]] the value is clamped to y[0] / y[-1].
    """
    q = np.asarray(q, dtype=np.float64)
    idx = np.searchsorted(x, q, side="right") - 1
    idx = np.clip(idx, 0, x.size - 2)
    out = _hermite_terms(x, y, d, idx, q)
    out = np.where(q <= x[0], y[0], out)
    out = np.where(q >= x[-1], y[-1], out)
    return out


def hermite_invert_numpy(
    x: np.ndarray, y: np.ndarray, d: np.ndarray, u: np.ndarray, tol: float
) -> np.ndarray:
    """Invert a nondecreasing Hermite interpolant by bisection.

    Returns the leftmost point where the interpolant reaches each target
    value; brackets are located per-interval first, then bisected until
    the x-window is below tol.
    """
    u = np.asarray(u, dtype=np.float64)
    iv = np.searchsorted(y, u, side="left") - 1
    iv = np.clip(iv, 0, x.size - 2)
    lo = x[iv].copy()
    hi = x[iv + 1].copy()
    # targets at or below the left knot resolve to that knot
    flat = y[iv + 1] <= y[iv]
    done_lo = (u <= y[iv]) | flat
    hi = np.where(done_lo, lo, hi)
    max_h = float(np.max(hi - lo)) if u.size else 0.0
    n_iter = 0
    while max_h > tol:
        max_h *= 0.5
        n_iter += 1
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        fm = _hermite_terms(x, y, d, iv, mid)
        take_hi = fm < u
        lo = np.where(take_hi, mid, lo)
        hi = np.where(take_hi, hi, mid)
    out = 0.5 * (lo + hi)
    out = np.where(u <= y[0], x[0], out)
    out = np.where(u >= y[-1], x[x.size - 1], out)
    return out


def step_series_numpy(times: np.ndarray, deltas: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """State value at each grid instant: sum of deltas with time <= t."""
    times = np.asarray(times, dtype=np.float64)
    deltas = np.asarray(deltas, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    if times.size == 0:
        return np.zeros(grid.size)
    csum = np.cumsum(deltas)
    idx = np.searchsorted(times, grid, side="right")
    out = np.where(idx > 0, csum[np.minimum(idx, csum.size) - 1], 0.0)
    return out


# ---------------------------------------------------------------------------
# numba variants

if HAS_NUMBA:

    @njit(cache=True)
    def _exp_smooth_nb(v, alpha):
        out = np.empty(v.size)
        if v.size == 0:
            return out
        s = v[0]
        out[0] = s
        for k in range(1, v.size):
            s = alpha * v[k] + (1.0 - alpha) * s
            out[k] = s
        return out

    @njit(cache=True)
    def _hermite_one(x, y, d, i, q):
        x0 = x[i]
        h = x[i + 1] - x0
        t = (q - x0) / h
        t2 = t * t
        t3 = t2 * t
        h00 = 2.0 * t3 - 3.0 * t2 + 1.0
        h10 = t3 - 2.0 * t2 + t
        h01 = -2.0 * t3 + 3.0 * t2
        h11 = t3 - t2
        return h00 * y[i] + h * h10 * d[i] + h01 * y[i + 1] + h * h11 * d[i + 1]

    @njit(cache=True)
    def _hermite_eval_nb(x, y, d, q):
        out = np.empty(q.size)
        n = x.size
        for k in range(q.size):
            qk = q[k]
            if qk <= x[0]:
                out[k] = y[0]
            elif qk >= x[n - 1]:
                out[k] = y[n - 1]
            else:
                i = np.searchsorted(x, qk, side="right") - 1
                if i > n - 2:
                    i = n - 2
                out[k] = _hermite_one(x, y, d, i, qk)
        return out

    @njit(cache=True)
    def _hermite_invert_nb(x, y, d, u, tol):
        out = np.empty(u.size)
        n = x.size
        for k in range(u.size):
            uk = u[k]
            if uk <= y[0]:
                out[k] = x[0]
                continue
            if uk >= y[n - 1]:
                out[k] = x[n - 1]
                continue
            i = np.searchsorted(y, uk, side="left") - 1
            if i < 0:
                i = 0
            if i > n - 2:
                i = n - 2
            lo = x[i]
            hi = x[i + 1]
            if uk <= y[i] or y[i + 1] <= y[i]:
                out[k] = lo
                continue
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if _hermite_one(x, y, d, i, mid) < uk:
                    lo = mid
                else:
                    hi = mid
            out[k] = 0.5 * (lo + hi)
        return out

    @njit(cache=True)
    def _step_series_nb(times, deltas, grid):
        out = np.empty(grid.size)
        acc = 0.0
        j = 0
        n = times.size
        for k in range(grid.size):
            t = grid[k]
            while j < n and times[j] <= t:
                acc += deltas[j]
                j += 1
            out[k] = acc
        return out


def exp_smooth(v: np.ndarray, alpha: float) -> np.ndarray:
    v = np.ascontiguousarray(v, dtype=np.float64)
    if USE_NUMBA:
        return _exp_smooth_nb(v, float(alpha))
    return exp_smooth_numpy(v, alpha)


def hermite_eval(x: np.ndarray, y: np.ndarray, d: np.ndarray, q: np.ndarray) -> np.ndarray:
    q = np.ascontiguousarray(q, dtype=np.float64)
    if USE_NUMBA:
        return _hermite_eval_nb(
            np.ascontiguousarray(x), np.ascontiguousarray(y), np.ascontiguousarray(d), q
        )
    return hermite_eval_numpy(x, y, d, q)


def hermite_invert(
    x: np.ndarray, y: np.ndarray, d: np.ndarray, u: np.ndarray, tol: float = 1e-10
) -> np.ndarray:
    u = np.ascontiguousarray(u, dtype=np.float64)
    if USE_NUMBA:
        return _hermite_invert_nb(
            np.ascontiguousarray(x), np.ascontiguousarray(y), np.ascontiguousarray(d), u, tol
        )
    return hermite_invert_numpy(x, y, d, u, tol)


def step_series(times: np.ndarray, deltas: np.ndarray, grid: np.ndarray) -> np.ndarray:
    if USE_NUMBA:
        return _step_series_nb(
            np.ascontiguousarray(times, dtype=np.float64),
            np.ascontiguousarray(deltas, dtype=np.float64),
            np.ascontiguousarray(grid, dtype=np.float64),
        )
    return step_series_numpy(times, deltas, grid)
