#!/usr/bin/env python3
"""Throughput comparison of the two kernel builds.

Runs each kernel on identical inputs under the numpy build and (when
available) the numba build, then prints median seconds per call, the
speedup, and the max absolute difference between the two results.  JIT
compilation happens in an untimed warm-up call.
"""

import argparse
import statistics
import time

import numpy as np

from tracebench import kernels
from tracebench.stats.fitting import fc_slopes


def time_call(fn, args, repeat: int) -> float:
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def make_cases(size: int, knots: int, seed: int = 5):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.uniform(0.0, 10.0, knots))
    y = np.cumsum(rng.uniform(0.1, 1.0, knots))
    y /= y[-1]
    d = fc_slopes(x, y)
    v = rng.normal(0.0, 1.0, size)
    q = rng.uniform(-1.0, 11.0, size)
    u = rng.uniform(0.0, 1.0, size)
    n_events = max(size // 4, 1)
    times = np.sort(rng.uniform(0.0, 1e4, n_events))
    deltas = rng.choice(np.array([-1.0, 1.0]), n_events)
    grid = np.linspace(0.0, 1e4, size)
    return {
        "exp_smooth": ((v, 0.2), kernels.exp_smooth_numpy, "_exp_smooth_nb"),
        "hermite_eval": ((x, y, d, q), kernels.hermite_eval_numpy, "_hermite_eval_nb"),
        "hermite_invert": (
            (x, y, d, u, 1e-10),
            kernels.hermite_invert_numpy,
            "_hermite_invert_nb",
        ),
        "step_series": ((times, deltas, grid), kernels.step_series_numpy, "_step_series_nb"),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1_000_000, help="points per kernel call")
    ap.add_argument("--knots", type=int, default=21, help="spline knot count")
    ap.add_argument("--repeat", type=int, default=5, help="timed calls per variant")
    args = ap.parse_args(argv)

    cases = make_cases(args.size, args.knots)
    status = "available" if kernels.HAS_NUMBA else "missing (numpy only)"
    print(f"numba {status}; active build: {kernels.backend_name()}; "
          f"size={args.size}, repeat={args.repeat}")
    header = f"{'kernel':<16} {'numpy s':>10} {'numba s':>10} {'speedup':>9}  max|diff|"
    print(header)
    print("-" * len(header))

    for name, (call_args, numpy_fn, nb_attr) in cases.items():
        t_np = time_call(numpy_fn, call_args, args.repeat)
        if not kernels.HAS_NUMBA:
            print(f"{name:<16} {t_np:>10.4f} {'-':>10} {'-':>9}")
            continue
        nb_fn = getattr(kernels, nb_attr)
        ref = numpy_fn(*call_args)
        got = nb_fn(*call_args)  # warm-up; also feeds the difference column
        diff = float(np.max(np.abs(got - ref))) if ref.size else 0.0
        t_nb = time_call(nb_fn, call_args, args.repeat)
        print(f"{name:<16} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.1f}x  {diff:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
