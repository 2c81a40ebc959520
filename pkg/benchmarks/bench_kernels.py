"""Time the compiled and pure-Python kernels and fit the scaling exponent.

Usage: python benchmarks/bench_kernels.py [--k 4:9] [--p 0.04] [--reps 20]

For each k a fixed set of bit-flip samples is decoded by every available
backend (one full trial: syndrome, decode, homology of the residual). The
exponent is the least-squares slope of log(time) against log(n), n = 2m^2.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from toric_rg import _backend
from toric_rg.montecarlo import _sample_bits, trial_seed


def time_backend(kern, k: int, p: float, reps: int) -> float:
    m = 1 << k
    n = 2 * m * m
    samples = [_sample_bits(n, p, trial_seed(0, k, 0, t)) for t in range(reps)]
    kern.trial_fails(samples[0], m, k)  # warm-up
    start = time.perf_counter()
    for bits in samples:
        kern.trial_fails(bits, m, k)
    return (time.perf_counter() - start) / reps


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", default="4:9", help="inclusive range a:b")
    ap.add_argument("--p", type=float, default=0.04)
    ap.add_argument("--reps", type=int, default=20)
    args = ap.parse_args()
    a, b = (int(x) for x in args.k.split(":"))
    ks = list(range(a, b + 1))

    backends = {"python": _backend.python_kernels}
    if _backend.compiled_kernels is not None:
        backends["cython"] = _backend.compiled_kernels
    else:
        print("compiled kernels not available; timing pure Python only")

    times = {name: [time_backend(kern, k, args.p, args.reps) for k in ks] for name, kern in backends.items()}
    ns = [2 * (1 << k) ** 2 for k in ks]

    header = f"{'k':>3} {'n':>8} " + " ".join(f"{name + ' [ms]':>14}" for name in backends)
    if "cython" in times:
        header += f" {'speedup':>9}"
    print(header)
    for j, (k, n) in enumerate(zip(ks, ns)):
        row = f"{k:>3} {n:>8} " + " ".join(f"{times[name][j] * 1e3:>14.3f}" for name in backends)
        if "cython" in times:
            row += f" {times['python'][j] / times['cython'][j]:>8.1f}x"
        print(row)
    for name, ts in times.items():
        slope = np.polyfit(np.log(ns), np.log(ts), 1)[0]
        print(f"{name}: time ~ n^{slope:.2f}")


if __name__ == "__main__":
    main()
