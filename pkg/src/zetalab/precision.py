"""Working-precision control and error-tracked complex values.

Every numeric operation in the package runs under an explicit
:class:`PrecisionContext` and returns values wrapped in :class:`CValue`,
which carries an estimated absolute error bound alongside the
high-precision real and imaginary parts.  Arithmetic on CValues
propagates error bounds conservatively: the bound of a result is the sum
of the magnified operand bounds plus one rounding unit at the ambient
mpmath precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .errors import NearZeroError

# Extra bits used internally so rounding noise stays below the reported
# err_bound even after long accumulations.
GUARD_BITS = 16

# err_bound is stored as a double; values this small are reported as-is
# (a bound of exactly 0.0 means "exact at this precision").
_MAX_FLOAT = 1e300


def to_float(x) -> float:
    """Clamp an mpmath magnitude into double range for err bookkeeping."""
    try:
        f = float(x)
    except OverflowError:
        return _MAX_FLOAT
    if math.isinf(f):
        return _MAX_FLOAT
    return f


def ulp(mag: float) -> float:
    """One rounding unit at the ambient mpmath precision, scaled to mag."""
    return abs(mag) * math.ldexp(1.0, 1 - mpmath.mp.prec)


@dataclass(frozen=True)
class PrecisionContext:
    """Immutable precision policy passed explicitly to every operation.

    working_bits:   mantissa bits for mpmath arithmetic (>= 64)
    target_rel_err: requested relative accuracy of returned values;
                    must be achievable, i.e. >= 2**(-working_bits + 8)
    max_retries:    how many times an evaluator may double its internal
                    cutoffs before raising PrecisionExhaustedError
    """

    working_bits: int = 256
    target_rel_err: float = 0.0
    max_retries: int = 3

    def __post_init__(self):
        if self.working_bits < 64:
            raise ValueError("working_bits must be >= 64")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.target_rel_err == 0.0:
            derived = max(math.ldexp(1.0, -self.working_bits + 16), 1e-30)
            object.__setattr__(self, "target_rel_err", derived)
        floor = math.ldexp(1.0, -self.working_bits + 8)
        if self.target_rel_err < floor:
            raise ValueError(
                f"target_rel_err {self.target_rel_err:g} below achievable "
                f"floor 2^{-self.working_bits + 8}"
            )

    def workprec(self):
        """Context manager setting mpmath precision (plus guard bits)."""
        return mpmath.mp.workprec(self.working_bits + GUARD_BITS)

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(
            working_bits=self.working_bits * 2,
            target_rel_err=0.0,
            max_retries=self.max_retries,
        )


DEFAULT_CTX = PrecisionContext()


@dataclass(frozen=True)
class CValue:
    """High-precision complex value with a conservative absolute error bound."""

    re: mpmath.mpf
    im: mpmath.mpf
    err_bound: float = 0.0

    def __post_init__(self):
        if not (self.err_bound >= 0.0) or math.isinf(self.err_bound):
            if not math.isinf(self.err_bound):
                raise ValueError("err_bound must be finite and nonnegative")
            object.__setattr__(self, "err_bound", _MAX_FLOAT)

    # -- constructors ------------------------------------------------

    @classmethod
    def make(cls, z, err: float = 0.0) -> "CValue":
        """Wrap a python/mpmath number, converting at ambient precision."""
        if isinstance(z, CValue):
            return cls(z.re, z.im, max(err, z.err_bound))
        zc = mpmath.mpmathify(z)
        if isinstance(zc, mpmath.mpc):
            return cls(zc.real, zc.imag, err)
        return cls(mpmath.mpf(zc), mpmath.mpf(0), err)

    # -- views -------------------------------------------------------

    def to_mpc(self) -> mpmath.mpc:
        return mpmath.mpc(self.re, self.im)

    @property
    def mag(self) -> float:
        """Double-precision magnitude estimate (clamped, for bookkeeping)."""
        return to_float(mpmath.hypot(self.re, self.im))

    def abs_upper(self) -> float:
        return self.mag + self.err_bound

    def abs_lower(self) -> float:
        return max(self.mag - self.err_bound, 0.0)

    def is_real(self) -> bool:
        return self.im == 0

    # -- arithmetic with error propagation -----------------------------

    def __add__(self, other) -> "CValue":
        o = CValue.make(other)
        re, im = self.re + o.re, self.im + o.im
        mag = to_float(mpmath.hypot(re, im))
        return CValue(re, im, self.err_bound + o.err_bound + ulp(mag))

    __radd__ = __add__

    def __neg__(self) -> "CValue":
        return CValue(-self.re, -self.im, self.err_bound)

    def __sub__(self, other) -> "CValue":
        return self + (-CValue.make(other))

    def __rsub__(self, other) -> "CValue":
        return CValue.make(other) + (-self)

    def __mul__(self, other) -> "CValue":
        o = CValue.make(other)
        a, b = self.to_mpc(), o.to_mpc()
        z = a * b
        ma, mb = self.mag, o.mag
        err = (
            self.err_bound * mb
            + o.err_bound * ma
            + self.err_bound * o.err_bound
            + ulp(to_float(mpmath.hypot(z.real, z.imag)))
        )
        return CValue(z.real, z.imag, err)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "CValue":
        o = CValue.make(other)
        mb = o.mag
        if mb <= 4.0 * o.err_bound:
            raise NearZeroError(
                f"divisor magnitude {mb:g} within 4x its error bound {o.err_bound:g}"
            )
        a, b = self.to_mpc(), o.to_mpc()
        z = a / b
        mq = to_float(mpmath.hypot(z.real, z.imag))
        # |a/b - a'/b'| <= (|da| + |q| |db|) / (|b| - |db|)
        err = (self.err_bound + mq * o.err_bound) / (mb - o.err_bound) + ulp(mq)
        return CValue(z.real, z.imag, err)

    def __rtruediv__(self, other) -> "CValue":
        return CValue.make(other) / self

    def conjugate(self) -> "CValue":
        return CValue(self.re, -self.im, self.err_bound)

    def with_err(self, err: float) -> "CValue":
        return CValue(self.re, self.im, err)

    def add_err(self, extra: float) -> "CValue":
        return CValue(self.re, self.im, self.err_bound + extra)

    def real_part(self) -> "CValue":
        return CValue(self.re, mpmath.mpf(0), self.err_bound)

    def __repr__(self):
        return (
            f"CValue({mpmath.nstr(self.re, 12)}, {mpmath.nstr(self.im, 12)},"
            f" err<={self.err_bound:.3g})"
        )


def cv(z, err: float = 0.0) -> CValue:
    """Shorthand constructor."""
    return CValue.make(z, err)
