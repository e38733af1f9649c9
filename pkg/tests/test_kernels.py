import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tracebench import kernels

needs_numba = pytest.mark.skipif(not kernels.HAS_NUMBA, reason="numba not importable")

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def smooth_oracle(v, alpha):
    out = []
    s = None
    for x in v:
        s = x if s is None else alpha * x + (1 - alpha) * s
        out.append(s)
    return np.array(out)


@given(
    arrays(np.float64, st.integers(1, 60), elements=finite),
    st.floats(0.01, 1.0),
)
@settings(deadline=None)  # first example pays the lazy scipy import
def test_exp_smooth_matches_recursion(v, alpha):
    got = kernels.exp_smooth_numpy(v, alpha)
    np.testing.assert_allclose(got, smooth_oracle(v, alpha), rtol=1e-9, atol=1e-6)


def test_exp_smooth_alpha_one_is_identity():
    v = np.array([3.0, -1.0, 4.0, 1.5])
    np.testing.assert_array_equal(kernels.exp_smooth_numpy(v, 1.0), v)


def test_exp_smooth_empty():
    assert kernels.exp_smooth_numpy(np.array([]), 0.5).size == 0


@needs_numba
@given(
    arrays(np.float64, st.integers(0, 60), elements=finite),
    st.floats(0.01, 1.0),
)
def test_exp_smooth_backends_agree(v, alpha):
    a = kernels.exp_smooth_numpy(v, alpha)
    b = kernels._exp_smooth_nb(np.ascontiguousarray(v), alpha)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-9)


def _monotone_spline(rng, n=8):
    x = np.sort(rng.uniform(0, 10, n))
    x += np.arange(n) * 1e-3  # keep knots strictly increasing
    y = np.cumsum(rng.uniform(0, 1, n))
    from tracebench.stats.fitting import fc_slopes

    return x, y, fc_slopes(x, y)


def test_hermite_eval_matches_scipy():
    from scipy.interpolate import CubicHermiteSpline

    rng = np.random.default_rng(7)
    x, y, d = _monotone_spline(rng)
    ref = CubicHermiteSpline(x, y, d)
    q = rng.uniform(x[0], x[-1], 500)
    np.testing.assert_allclose(
        kernels.hermite_eval_numpy(x, y, d, q), ref(q), rtol=1e-10, atol=1e-10
    )


def test_hermite_eval_hits_knots_and_clamps():
    rng = np.random.default_rng(8)
    x, y, d = _monotone_spline(rng)
    np.testing.assert_allclose(kernels.hermite_eval_numpy(x, y, d, x), y, atol=1e-12)
    out = kernels.hermite_eval_numpy(x, y, d, np.array([x[0] - 5, x[-1] + 5]))
    np.testing.assert_array_equal(out, [y[0], y[-1]])


@needs_numba
def test_hermite_eval_backends_agree():
    rng = np.random.default_rng(9)
    x, y, d = _monotone_spline(rng)
    q = rng.uniform(x[0] - 1, x[-1] + 1, 400)
    a = kernels.hermite_eval_numpy(x, y, d, q)
    b = kernels._hermite_eval_nb(x, y, d, q)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_hermite_invert_roundtrip():
    rng = np.random.default_rng(10)
    x, y, d = _monotone_spline(rng)
    u = rng.uniform(y[0], y[-1], 300)
    q = kernels.hermite_invert_numpy(x, y, d, u, 1e-10)
    back = kernels.hermite_eval_numpy(x, y, d, q)
    # a tol-wide x-window maps to a value window scaled by the max slope
    slope_bound = np.max(np.abs(d)) + 3 * np.max(np.diff(y) / np.diff(x))
    np.testing.assert_allclose(back, u, atol=1e-9 * slope_bound + 1e-12)


def test_hermite_invert_out_of_range_clamps():
    rng = np.random.default_rng(11)
    x, y, d = _monotone_spline(rng)
    lo, hi = kernels.hermite_invert_numpy(
        x, y, d, np.array([y[0] - 1, y[-1] + 1]), 1e-10
    )
    assert lo == x[0] and hi == x[-1]


def test_hermite_invert_flat_interval_returns_left_edge():
    # y stalls on [2, 3]; the inverse at the stalled value must resolve to
    # the left end of the stall, not somewhere inside it
    x = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    y = np.array([0.0, 0.2, 0.5, 0.5, 1.0])
    d = np.array([0.2, 0.3, 0.0, 0.0, 0.5])
    (got,) = kernels.hermite_invert_numpy(x, y, d, np.array([0.5]), 1e-12)
    assert got <= 2.0
    # with a zero end-slope the cubic is float-flat just before the knot,
    # so "leftmost attainment" can land a few ulp-squared early
    assert got == pytest.approx(2.0, abs=1e-7)
    (back,) = kernels.hermite_eval_numpy(x, y, d, np.array([got]))
    assert back == 0.5


@needs_numba
def test_hermite_invert_backends_agree():
    rng = np.random.default_rng(12)
    x, y, d = _monotone_spline(rng)
    u = rng.uniform(y[0], y[-1], 300)
    a = kernels.hermite_invert_numpy(x, y, d, u, 1e-10)
    b = kernels._hermite_invert_nb(x, y, d, u, 1e-10)
    # the two bisection loops terminate on different float paths
    np.testing.assert_allclose(a, b, atol=2e-10)


def step_oracle(times, deltas, grid):
    return np.array([sum(d for t, d in zip(times, deltas) if t <= g) for g in grid])


@given(st.integers(0, 40), st.integers(0, 20), st.integers(0, 2**32 - 1))
@settings(max_examples=60)
def test_step_series_matches_bruteforce(n_events, n_grid, seed):
    rng = np.random.default_rng(seed)
    times = np.sort(rng.integers(0, 50, n_events).astype(float))
    deltas = rng.choice([-1.0, 1.0], n_events)
    grid = np.sort(rng.uniform(-5, 55, n_grid))
    got = kernels.step_series_numpy(times, deltas, grid)
    np.testing.assert_allclose(got, step_oracle(times, deltas, grid), atol=1e-9)


@needs_numba
def test_step_series_backends_agree():
    rng = np.random.default_rng(13)
    times = np.sort(rng.uniform(0, 100, 500))
    deltas = rng.choice([-1.0, 1.0], 500)
    grid = np.linspace(-10, 110, 77)
    a = kernels.step_series_numpy(times, deltas, grid)
    b = kernels._step_series_nb(times, deltas, grid)
    np.testing.assert_array_equal(a, b)


def test_env_flag_forces_numpy_backend():
    code = "import tracebench.kernels as k; print(k.backend_name())"
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", "TRACEBENCH_NO_NUMBA": "1"},
        cwd="/",
    )
    assert out.stdout.strip() == "numpy", out.stderr
