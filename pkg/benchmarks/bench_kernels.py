"""Compiled versus pure-Python integrator kernel.

Runs the same logit-coordinate integration through both kernels, checks
that they agree, and prints wall time per call and per accepted step.

    python benchmarks/bench_kernels.py [--mu 90] [--t 50] [--repeat 3]
"""

import argparse
import time

import numpy as np

from hetcycle import _kernels_py
from hetcycle.game import build_mu_family

try:
    from hetcycle import _kernels
except ImportError:
    _kernels = None


def run(kernel, c, a, y0, t_end, cap=200_000):
    out_t = np.empty(cap)
    out_y = np.empty((cap, len(y0)))
    out_f = np.empty((cap, len(y0)))
    start = time.perf_counter()
    count, t, *_rest = kernel.dopri_run(c, a, y0, 0.0, t_end, 1e-3, 1e-4, 1e-9, 1e-12, 1e-14,
                                        out_t, out_y, out_f)
    elapsed = time.perf_counter() - start
    return elapsed, count, out_y[count - 1].copy()


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--mu", default="90")
    parser.add_argument("--t", type=float, default=50.0)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    c, a = build_mu_family(args.mu).affine_float
    c, a = np.ascontiguousarray(c), np.ascontiguousarray(a)
    y0 = np.log(np.array([0.2, 0.3, 0.4]) / np.array([0.8, 0.7, 0.6]))
    kernels = [("python", _kernels_py)]
    if _kernels is not None:
        kernels.insert(0, ("cython", _kernels))
    else:
        print("compiled kernel not built; timing the pure-Python kernel only")
    results = {}
    for name, kernel in kernels:
        best = min(run(kernel, c, a, y0, args.t) for _ in range(args.repeat))
        results[name] = best
        elapsed, steps, _y = best
        print(f"{name:>7}: {elapsed * 1e3:9.2f} ms  {steps} steps  "
              f"{elapsed / steps * 1e6:8.3f} us/step")
    if len(results) == 2:
        diff = float(np.max(np.abs(results["cython"][2] - results["python"][2])))
        speedup = results["python"][0] / results["cython"][0]
        print(f"speedup: {speedup:.1f}x  max end-state difference: {diff:.3e}")


if __name__ == "__main__":
    main()
