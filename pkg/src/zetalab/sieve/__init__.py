"""Mobius / divisor-count tables and mollifier coefficient tables.

The tables are immutable after construction (backing arrays are marked
read-only) so concurrent readers are safe.  Construction is deterministic:
the monolithic linear sieve and the segmented sieve produce identical
arrays and the active kernel backend (numba or numpy) does not change any
value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from ..errors import CapacityError
from ..precision import PrecisionContext, DEFAULT_CTX
from . import kernels

# Table construction refuses to allocate beyond this many bytes per array.
MEMORY_BUDGET_BYTES = 800_000_000

# Above this limit the segmented construction is used automatically.
SEGMENTED_THRESHOLD = 10_000_000


@dataclass(frozen=True)
class MobiusTable:
    """mu(n) and d(n) for 1 <= n <= limit (index 0 is padding)."""

    limit: int
    mu: np.ndarray
    d: np.ndarray
    _log_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def mu_at(self, n: int) -> int:
        return int(self.mu[n])

    def d_at(self, n: int) -> int:
        return int(self.d[n])

    def mertens(self, n: int | None = None) -> int:
        n = self.limit if n is None else n
        return int(self.mu[1 : n + 1].astype(np.int64).sum())

    def squarefree_n(self, upto: int | None = None) -> np.ndarray:
        upto = self.limit if upto is None else upto
        return np.nonzero(self.mu[: upto + 1])[0]

    def logs(self, prec: int) -> list:
        """Cached mpf values of log n for n <= limit at the given precision."""
        cache = self._log_cache.get(prec)
        if cache is None:
            with mpmath.mp.workprec(prec):
                cache = [mpmath.mpf(0)] * (self.limit + 1)
                for n in range(1, self.limit + 1):
                    cache[n] = mpmath.log(n)
            self._log_cache[prec] = cache
        return cache


def mobius_table(limit: int, *, segmented: bool | None = None,
                 budget_bytes: int = MEMORY_BUDGET_BYTES) -> MobiusTable:
    """Build mu/d tables up to `limit` (linear sieve, segmented for large N)."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    need = (limit + 1) * (1 + 4 + 8)  # mu int8, d int32, sieve scratch
    if need > budget_bytes:
        raise CapacityError(
            f"limit {limit} needs ~{need} bytes, budget {budget_bytes}")
    if segmented is None:
        segmented = limit > SEGMENTED_THRESHOLD
    if segmented:
        mu, d = kernels.segmented_mu_d(limit)
    else:
        mu, d = kernels.linear_mu_d(limit)
    mu.flags.writeable = False
    d.flags.writeable = False
    return MobiusTable(limit=limit, mu=mu, d=d)


def write_csv(table: MobiusTable, path: str) -> None:
    """Emit `n,mu,d` rows for 1 <= n <= limit."""
    with open(path, "w") as fh:
        fh.write("n,mu,d\n")
        for n in range(1, table.limit + 1):
            fh.write(f"{n},{table.mu[n]},{table.d[n]}\n")


@dataclass(frozen=True)
class CoeffTable:
    """Coefficients c_n = sum_{d | n, d <= V} mu(d) d^shift for n <= limit.

    The bulk array is float64 (feeding vectorized series sums whose error
    budget is dominated by truncation, not rounding); `exact_at` recomputes
    any single coefficient at full working precision by direct divisor
    enumeration.
    """

    V: int
    exponent_shift: float
    limit: int
    c: np.ndarray
    mu_weights: np.ndarray  # mu(dd) * dd**shift for dd <= V, float64

    def exact_at(self, n: int, ctx: PrecisionContext = DEFAULT_CTX,
                 table: MobiusTable | None = None) -> mpmath.mpf:
        """c_n by direct divisor enumeration at full precision."""
        with ctx.workprec():
            shift = mpmath.mpf(self.exponent_shift)
            total = mpmath.mpf(0)
            dd = 1
            while dd * dd <= n:
                if n % dd == 0:
                    pair = (dd,) if dd * dd == n else (dd, n // dd)
                    for div in pair:
                        if div <= self.V:
                            m = _mu_single(div, table)
                            if m:
                                total += m * mpmath.exp(shift * mpmath.log(div))
                dd += 1
            return total


def _mu_single(n: int, table: MobiusTable | None) -> int:
    """mu(n) by table lookup or trial division."""
    if table is not None and n <= table.limit:
        return int(table.mu[n])
    if n == 1:
        return 1
    m = 1
    x = n
    p = 2
    while p * p <= x:
        if x % p == 0:
            x //= p
            if x % p == 0:
                return 0
            m = -m
        p += 1 if p == 2 else 2
    if x > 1:
        m = -m
    return m


def coeff_table(V: int, exponent_shift: float, limit: int,
                table: MobiusTable | None = None,
                budget_bytes: int = MEMORY_BUDGET_BYTES) -> CoeffTable:
    """Divisor-restricted convolution over d <= V with weights mu(d) d^shift."""
    if V < 2:
        raise ValueError("V must be >= 2")
    if limit < V:
        raise ValueError("limit must be >= V")
    if not math.isfinite(exponent_shift):
        raise ValueError("exponent_shift must be finite")
    if (limit + 1) * 8 > budget_bytes:
        raise CapacityError(
            f"limit {limit} needs ~{(limit + 1) * 8} bytes, budget {budget_bytes}")
    if table is not None and table.limit >= V:
        mu_head = table.mu[: V + 1].astype(np.float64)
    else:
        mu_head, _ = kernels.linear_mu_d(V)
        mu_head = mu_head.astype(np.float64)
    dd = np.arange(V + 1, dtype=np.float64)
    dd[0] = 1.0
    weights = mu_head * np.exp(exponent_shift * np.log(dd))
    c = np.zeros(limit + 1, dtype=np.float64)
    for d0 in range(1, V + 1):
        w = weights[d0]
        if w != 0.0:
            c[d0::d0] += w
    c.flags.writeable = False
    weights.flags.writeable = False
    return CoeffTable(V=V, exponent_shift=float(exponent_shift), limit=limit,
                      c=c, mu_weights=weights)
