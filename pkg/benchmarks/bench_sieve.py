#!/usr/bin/env python3
"""Benchmark the sieve kernels: numba @njit vs the pure-numpy fallback.

The table construction is the package's only hot integer loop; everything
downstream is arbitrary-precision work where a JIT cannot help.  Run:

    python3 benchmarks/bench_sieve.py [--limit 1000000]

The numpy path is the same one selected by ZETALAB_BACKEND=numpy.
"""

import argparse
import time

import numpy as np

from zetalab.sieve import kernels


def timed(fn, *args, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return out, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--limit", type=int, default=1_000_000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    n = args.limit

    rows = []
    if kernels.backend_name() == "numba":
        kernels.linear_mu_d(1000)  # trigger JIT before timing
        (mu_j, d_j), t_lin_j = timed(kernels._linear_mu_d, n,
                                     repeats=args.repeats)
        _, t_seg_j = timed(kernels.segmented_mu_d, n, repeats=args.repeats)
        rows.append(("linear sieve", "numba", t_lin_j))
        rows.append(("segmented sieve", "numba", t_seg_j))
    else:
        mu_j = d_j = None
        print("numba backend unavailable (ZETALAB_BACKEND=numpy?); "
              "timing the fallback only")

    (mu_n, d_n), t_lin_n = timed(kernels._linear_mu_d_numpy, n,
                                 repeats=args.repeats)
    primes = kernels._primes_upto(int(n**0.5) + 1)
    _, t_seg_n = timed(kernels._segment_mu_d_numpy, 0, n + 1, primes,
                       repeats=args.repeats)
    rows.append(("linear sieve", "numpy", t_lin_n))
    rows.append(("segmented sieve", "numpy", t_seg_n))

    if mu_j is not None:
        assert np.array_equal(mu_j[1:], mu_n[1:]), "backend mismatch (mu)"
        assert np.array_equal(d_j[1:], d_n[1:]), "backend mismatch (d)"
        print(f"backends agree elementwise up to {n}\n")

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel'.ljust(width)}  backend  best of {args.repeats} (s)")
    for name, backend, t in rows:
        print(f"{name.ljust(width)}  {backend:7s}  {t:9.3f}")
    by_kind = {}
    for name, backend, t in rows:
        by_kind.setdefault(name, {})[backend] = t
    for name, d in by_kind.items():
        if "numba" in d and "numpy" in d:
            print(f"{name}: numba speedup x{d['numpy'] / d['numba']:.1f}")


if __name__ == "__main__":
    main()
