"""Hot sieve kernels: numba-jitted by default, pure numpy on request.

Set ZETALAB_BACKEND=numpy to force the fallback path (useful on machines
without a working numba toolchain and for benchmarking the JIT win; see
benchmarks/bench_sieve.py).  Both paths produce bit-identical tables.
"""

from __future__ import annotations

import os

import numpy as np

_REQUESTED = os.environ.get("ZETALAB_BACKEND", "numba").strip().lower()
if _REQUESTED not in ("numba", "numpy"):
    raise RuntimeError(f"ZETALAB_BACKEND must be 'numba' or 'numpy', got {_REQUESTED!r}")

_HAVE_NUMBA = False
if _REQUESTED == "numba":
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:  # fall back silently; backend_name() reports it
        _HAVE_NUMBA = False


def backend_name() -> str:
    return "numba" if _HAVE_NUMBA else "numpy"


# ----------------------------------------------------------------------
# monolithic linear sieve: smallest-prime-factor recurrence for mu and d
# ----------------------------------------------------------------------

def _linear_mu_d_py(n):
    mu = np.zeros(n + 1, dtype=np.int8)
    d = np.zeros(n + 1, dtype=np.int32)
    is_comp = np.zeros(n + 1, dtype=np.bool_)
    spf_exp = np.zeros(n + 1, dtype=np.int8)  # exponent of smallest prime factor
    primes = np.zeros(n // 2 + 2, dtype=np.int64)
    npr = 0
    if n >= 1:
        mu[1] = 1
        d[1] = 1
    for i in range(2, n + 1):
        if not is_comp[i]:
            primes[npr] = i
            npr += 1
            mu[i] = -1
            d[i] = 2
            spf_exp[i] = 1
        for k in range(npr):
            p = primes[k]
            ip = i * p
            if ip > n:
                break
            is_comp[ip] = True
            if i % p == 0:
                # p is also the smallest prime of i: bump its exponent
                e = spf_exp[i]
                spf_exp[ip] = e + 1
                d[ip] = d[i] // (e + 1) * (e + 2)
                mu[ip] = 0
                break
            spf_exp[ip] = 1
            d[ip] = d[i] * 2
            mu[ip] = -mu[i]
    return mu, d


def _primes_upto(n):
    """Boolean Eratosthenes, returns the primes <= n as int64."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    isp = np.ones(n + 1, dtype=np.bool_)
    isp[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if isp[p]:
            isp[p * p :: p] = False
    return np.nonzero(isp)[0].astype(np.int64)


def _linear_mu_d_numpy(n):
    """Vectorized fallback: sign flips per prime for mu, divisor-count slices for d."""
    mu = np.ones(n + 1, dtype=np.int8)
    if n >= 0:
        mu[0] = 0
    primes = _primes_upto(n)
    for p in primes:
        mu[p::p] *= -1
    for p in primes:
        if p * p > n:
            break
        mu[p * p :: p * p] = 0
    d = np.zeros(n + 1, dtype=np.int32)
    for i in range(1, n + 1):
        d[i::i] += 1
    return mu, d


# ----------------------------------------------------------------------
# segmented sieve: per-block factorization against primes <= sqrt(hi)
# ----------------------------------------------------------------------

def _segment_mu_d_py(lo, hi, primes):
    """mu and d for n in [lo, hi); primes must cover sqrt(hi - 1)."""
    m = hi - lo
    mu = np.ones(m, dtype=np.int8)
    d = np.ones(m, dtype=np.int32)
    rem = np.arange(lo, hi, dtype=np.int64)
    if lo == 0:
        mu[0] = 0
        d[0] = 0
        rem[0] = 1
    if lo <= 1 < hi:
        rem[1 - lo] = 1
    for p in primes:
        if p * p >= hi:
            break
        start = ((lo + p - 1) // p) * p
        if start < p:
            start = p
        for idx in range(start - lo, m, p):
            e = 0
            while rem[idx] % p == 0:
                rem[idx] //= p
                e += 1
            if e == 1:
                mu[idx] = -mu[idx]
            elif e >= 2:
                mu[idx] = 0
            d[idx] = d[idx] * (e + 1)
    for idx in range(m):
        if rem[idx] > 1:  # one prime factor above sqrt(hi) remains
            mu[idx] = -mu[idx]
            d[idx] *= 2
    return mu, d


def _segment_mu_d_numpy(lo, hi, primes):
    m = hi - lo
    mu = np.ones(m, dtype=np.int8)
    d = np.ones(m, dtype=np.int32)
    rem = np.arange(lo, hi, dtype=np.int64)
    if lo == 0:
        mu[0] = 0
        d[0] = 0
        rem[0] = 1
    if lo <= 1 < hi:
        rem[1 - lo] = 1
    for p in primes:
        if p * p >= hi:
            break
        start = ((lo + p - 1) // p) * p
        idx = np.arange(max(start, p) - lo, m, p)
        if idx.size == 0:
            continue
        e = np.zeros(idx.size, dtype=np.int32)
        sub = rem[idx]
        mask = sub % p == 0
        while mask.any():
            sub[mask] //= p
            e[mask] += 1
            mask = sub % p == 0
        rem[idx] = sub
        mu_idx = mu[idx]
        mu_idx[e == 1] *= -1
        mu_idx[e >= 2] = 0
        mu[idx] = mu_idx
        d[idx] *= e + 1
    big = rem > 1
    mu[big] *= -1
    d[big] *= 2
    return mu, d


if _HAVE_NUMBA:
    _linear_mu_d = njit(cache=True)(_linear_mu_d_py)
    _segment_mu_d = njit(cache=True)(_segment_mu_d_py)
else:
    _linear_mu_d = _linear_mu_d_numpy
    _segment_mu_d = _segment_mu_d_numpy


def linear_mu_d(n: int):
    """Monolithic mu/d tables for 0..n (index 0 is padding)."""
    mu, d = _linear_mu_d(int(n))
    return mu, d


def segmented_mu_d(n: int, block: int = 1 << 19):
    """Segmented construction of the same tables, block at a time."""
    n = int(n)
    primes = _primes_upto(int(n**0.5) + 1)
    mu = np.zeros(n + 1, dtype=np.int8)
    d = np.zeros(n + 1, dtype=np.int32)
    lo = 0
    while lo <= n:
        hi = min(lo + block, n + 1)
        bmu, bd = _segment_mu_d(lo, hi, primes)
        mu[lo:hi] = bmu
        d[lo:hi] = bd
        lo = hi
    if n >= 1:
        mu[1] = 1
        d[1] = 1
    return mu, d
