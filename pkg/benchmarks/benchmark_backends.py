#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Run:
    python3 benchmarks/benchmark_backends.py [--sizes 200,400,800] [--d 10]

The numpy fallback is what you get with CROSSMMD_NO_NUMBA=1; this script
imports both implementations directly so one process can compare them.
"""

import argparse
import time

import numpy as np

from crossmmd._accel import _numpy_impl as npy

try:
    from crossmmd._accel import _numba_impl as nb
except ImportError:
    nb = None


def best_of(f, reps=7):
    f()  # warm-up (JIT compile / cache fill)
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        f()
        times.append(time.perf_counter() - t0)
    return min(times)


def fmt(seconds):
    return f"{seconds * 1e3:9.3f} ms"


def compare(name, f_nb, f_np, reps=7):
    t_np = best_of(f_np, reps)
    if nb is None:
        print(f"  {name:<28} numpy {fmt(t_np)}   (numba unavailable)")
        return
    t_nb = best_of(f_nb, reps)
    print(f"  {name:<28} numba {fmt(t_nb)}   numpy {fmt(t_np)}   "
          f"speedup {t_np / t_nb:5.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="200,400,800",
                    help="comma list of pooled sizes N (default 200,400,800)")
    ap.add_argument("--d", type=int, default=10, help="dimension (default 10)")
    ap.add_argument("--B", type=int, default=200, help="permutations (default 200)")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"numba available: {nb is not None}")
    for N in (int(s) for s in args.sizes.split(",")):
        Z = rng.normal(size=(N, args.d))
        n = N // 2
        m = N - n
        K = npy.gram_dist_kernel(Z, 0.05, False)
        print(f"\nN = {N}, d = {args.d}")
        compare("sqdist_matrix", lambda: nb.sqdist_matrix(Z) if nb else None,
                lambda: npy.sqdist_matrix(Z))
        compare("gram (gaussian, fused)",
                lambda: nb.gram_dist_kernel(Z, 0.05, False) if nb else None,
                lambda: npy.gram_dist_kernel(Z, 0.05, False))
        compare("mmd statistic",
                lambda: nb.mmd_contiguous(K, n, m) if nb else None,
                lambda: npy.mmd_contiguous(K, n, m))
        compare(f"permutation null (B={args.B})",
                lambda: nb.perm_mmd_stats(K, n, m, args.B, np.uint64(1)) if nb else None,
                lambda: npy.perm_mmd_stats(K, n, m, args.B, 1),
                reps=3)
        compare("mmd direct (no gram)",
                lambda: nb.mmd_direct(Z[:n], Z[n:], 0, 0.05, 0) if nb else None,
                lambda: npy.mmd_direct(Z[:n], Z[n:], 0, 0.05, 0),
                reps=3)


if __name__ == "__main__":
    main()
