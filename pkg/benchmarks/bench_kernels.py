"""Benchmark the compiled kernels against the NumPy fallback.

Run as ``python benchmarks/bench_kernels.py``.  Exercises the two hot
loops on representative workloads:

* the squared-circumradius scan over the separation grid (the inner loop
  of tube-packing optimization: thousands of evaluations per SPSA run);
* the correlation argmax over a decode grid (the inner loop of Monte
  Carlo SDR sweeps: one row per trial).

Both backends produce identical minima/indices; timings show what the
compiled extension buys.
"""

import math
import timeit

import numpy as np

from c3t import kernels
from c3t.kernels import _numpy as np_backend

try:
    from c3t.kernels import _ckernels as c_backend
except ImportError:
    c_backend = None


def _time(fn, repeat=5, number=20):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def bench_rho_scan(backend, m, grid_step):
    rng = np.random.default_rng(0)
    radii = rng.uniform(0.2, 0.9, m)
    radii /= np.linalg.norm(radii)
    r2 = radii * radii
    w = np.arange(1, m + 1, dtype=float)
    count = int(math.floor(2 * math.pi / grid_step))
    deltas = grid_step * np.arange(1, count + 1)
    phase = np.multiply.outer(w, deltas)
    s2 = np.ascontiguousarray(np.sin(0.5 * phase) ** 2)
    sn = np.ascontiguousarray(np.sin(phase))
    result = backend.rho_sq_scan(r2, w, 0.0, deltas, s2, sn)
    seconds = _time(lambda: backend.rho_sq_scan(r2, w, 0.0, deltas, s2, sn))
    return seconds, result


def bench_corr_argmax(backend, trials, m, grid_points):
    rng = np.random.default_rng(1)
    yc = rng.normal(size=(trials, m))
    ys = rng.normal(size=(trials, m))
    w = np.arange(1, m + 1, dtype=float)
    grid = np.linspace(-math.pi, math.pi, grid_points)
    cos_t = np.ascontiguousarray(np.cos(np.outer(w, grid)))
    sin_t = np.ascontiguousarray(np.sin(np.outer(w, grid)))
    result = backend.corr_argmax(yc, ys, cos_t, sin_t)
    seconds = _time(lambda: backend.corr_argmax(yc, ys, cos_t, sin_t), number=3)
    return seconds, result


def main():
    print(f"active backend: {kernels.BACKEND}")
    backends = [("numpy", np_backend)]
    if c_backend is not None:
        backends.append(("compiled", c_backend))
    else:
        print("compiled backend unavailable; showing numpy only")

    print("\nrho_sq_scan (separation-grid minimum)")
    print(f"{'case':<28}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for m, step in ((2, 1e-3), (4, 1e-3), (4, 1e-4), (6, 1e-4)):
        times = []
        results = []
        for _, backend in backends:
            seconds, result = bench_rho_scan(backend, m, step)
            times.append(seconds)
            results.append(result)
        if len(results) == 2:
            assert results[0][1] == results[1][1], "backends disagree on argmin"
        label = f"m={m}, step={step:g}"
        row = f"{label:<28}" + "".join(f"{t * 1e6:>10.1f}us" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    print("\ncorr_argmax (decode-grid search)")
    print(f"{'case':<28}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for trials, m, grid in ((512, 2, 10000), (2048, 2, 10000), (2048, 3, 10000)):
        times = []
        results = []
        for _, backend in backends:
            seconds, result = bench_corr_argmax(backend, trials, m, grid)
            times.append(seconds)
            results.append(result)
        if len(results) == 2:
            assert np.array_equal(results[0], results[1]), "backends disagree"
        label = f"T={trials}, m={m}, G={grid}"
        row = f"{label:<28}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
