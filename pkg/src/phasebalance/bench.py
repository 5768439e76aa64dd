"""Timing of direct (Carlson) versus interpolated arc length."""

import math
import time

import numpy as np

from .interpolant import build_sigma_interpolant
from .specfun import ellint_e_incomplete

__all__ = ["benchmark_sigma"]


def _best_of(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def benchmark_sigma(curve, calls=1_000_000, scalar_calls=20_000, grid_size=1024, repeats=3, seed=0):
    """Compare arc-length evaluation paths for an ellipse.

    Two regimes are timed, each as best-of-``repeats``:

    * batch: ``calls`` parameters in one vectorised call per path;
    * scalar: ``scalar_calls`` individual Python-level calls per path, which
      is how the simulator evaluates arc length.

    Returns a dict of timings, per-call latencies, speed-up ratios and the
    interpolant's certified error. Raises
    :class:`~phasebalance.interpolant.CertificationError` if certification fails.
    """
    if curve.is_circle:
        return {"curve": "circle", "closed_form": True,
                "note": "arc length on a circle is r * t in closed form; interpolation is unnecessary"}

    t_build = time.perf_counter()
    interp = build_sigma_interpolant(curve, grid_size)
    t_build = time.perf_counter() - t_build
    a, b, m = curve.a, curve.b, curve.m

    rng = np.random.default_rng(seed)
    ts = rng.uniform(-math.pi, math.pi, calls)
    direct_batch = _best_of(lambda: b * ellint_e_incomplete(ts, m), repeats)
    interp_batch = _best_of(lambda: interp.evaluate(ts), repeats)
    batch_err = float(np.max(np.abs(interp.evaluate(ts) - b * ellint_e_incomplete(ts, m))))

    ss = ts[:scalar_calls].tolist()

    def direct_loop():
        for t in ss:
            b * ellint_e_incomplete(t, m)

    def interp_loop():
        for t in ss:
            interp(t)

    direct_scalar = _best_of(direct_loop, repeats)
    interp_scalar = _best_of(interp_loop, repeats)

    return {
        "curve": "ellipse",
        "a": a,
        "b": b,
        "grid_size": grid_size,
        "build_s": t_build,
        "certified_max_abs_error": interp.max_abs_error,
        "batch_calls": calls,
        "batch_max_abs_error": batch_err,
        "direct_batch_s": direct_batch,
        "interp_batch_s": interp_batch,
        "batch_speedup": direct_batch / interp_batch,
        "direct_batch_calls_per_s": calls / direct_batch,
        "interp_batch_calls_per_s": calls / interp_batch,
        "scalar_calls": len(ss),
        "direct_scalar_us": direct_scalar / len(ss) * 1e6,
        "interp_scalar_us": interp_scalar / len(ss) * 1e6,
        "scalar_speedup": direct_scalar / interp_scalar,
    }
