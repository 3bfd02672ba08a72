"""Root location: real zeros of the truncated Mobius sum near 1, and
critical-line zeta zeros through Hardy's Z.

Scan-then-bisect throughout (never Newton): the scanned function can be
extremely flat near 1, and bisection is unconditionally convergent.  A
missing sign change is a reportable status, not a failure: whether the
mollifier sum actually has a real zero within a given radius at desk-scale
V is an empirical finding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .precision import CValue, PrecisionContext, DEFAULT_CTX, to_float
from .sieve import MobiusTable
from . import dirichlet, zetafn

FOUND = "found"
NO_SIGN_CHANGE = "no-sign-change"

SCAN_POINTS = 64  # scan step is bracket_radius / SCAN_POINTS


@dataclass(frozen=True)
class RootResult:
    status: str
    value: mpmath.mpf | None
    residual: float
    bracket: tuple
    within_radius: bool
    sign_changes: int
    notes: tuple = ()

    @property
    def found(self) -> bool:
        return self.status == FOUND


def find_mollifier_root(V: int, bracket_radius: float, table: MobiusTable,
                        ctx: PrecisionContext = DEFAULT_CTX) -> RootResult:
    """Locate a real zero of sigma -> m_v(sigma, V) on
    [1 - R, 1 + R], R = bracket_radius: scan at step R/64, then bisect the
    first sign change down to |m_v| <= 2^(-working_bits/2).

    More than one scanned sign change is reported in sign_changes (a
    multiplicity finding; the first bracket is refined)."""
    if V < 2:
        raise ValueError("V must be >= 2")
    if not (0 < bracket_radius <= 1):
        raise ValueError("bracket_radius must be in (0, 1]")
    if V > table.limit:
        raise ValueError(f"V={V} exceeds table limit {table.limit}")

    arrays = dirichlet.mv_f64_arrays(table, V)
    R = float(bracket_radius)
    grid = 1.0 - R + (R / SCAN_POINTS) * np.arange(2 * SCAN_POINTS + 1)
    vals = np.array([dirichlet.m_v_f64(sg, arrays) for sg in grid])
    signs = np.sign(vals)
    changes = []
    for i in range(len(grid) - 1):
        if signs[i] == 0:
            changes.append((grid[i], grid[i]))
        elif signs[i] * signs[i + 1] < 0:
            changes.append((grid[i], grid[i + 1]))
    if signs[-1] == 0:
        changes.append((grid[-1], grid[-1]))
    n_changes = len(changes)
    if n_changes == 0:
        return RootResult(
            status=NO_SIGN_CHANGE, value=None, residual=float("nan"),
            bracket=(1.0 - R, 1.0 + R), within_radius=False, sign_changes=0,
            notes=(f"scan of {len(grid)} points: min {vals.min():.6g}, "
                   f"max {vals.max():.6g}, no sign change",))

    # the claimed zero lives near 1: refine the bracket closest to it
    lo_f, hi_f = min(changes, key=lambda br: abs((br[0] + br[1]) / 2 - 1.0))
    tol = math.ldexp(1.0, -(ctx.working_bits // 2))
    # float64 bisection while it is trustworthy (well above f64 noise)
    flo = dirichlet.m_v_f64(lo_f, arrays)
    while hi_f - lo_f > 1e-11:
        mid = 0.5 * (lo_f + hi_f)
        fm = dirichlet.m_v_f64(mid, arrays)
        if abs(fm) < 1e-12:
            break
        if (fm > 0) == (flo > 0):
            lo_f, flo = mid, fm
        else:
            hi_f = mid
    # full-precision bisection to the residual target
    with ctx.workprec():
        lo = mpmath.mpf(lo_f)
        hi = mpmath.mpf(hi_f)
        flo_mp = dirichlet.m_v(lo, V, table, ctx).re
        value = (lo + hi) / 2
        residual = float("inf")
        for _ in range(ctx.working_bits + 128):
            value = (lo + hi) / 2
            fm = dirichlet.m_v(value, V, table, ctx).re
            residual = to_float(abs(fm))
            if residual <= tol:
                break
            if mpmath.sign(fm) == mpmath.sign(flo_mp):
                lo, flo_mp = value, fm
            else:
                hi = value
        notes = []
        if n_changes > 1:
            notes.append(f"multiplicity finding: {n_changes} sign changes "
                         f"in the scan; refined the one nearest 1")
        if residual > tol:
            notes.append(f"bisection stalled at residual {residual:.3g} "
                         f"(target {tol:.3g})")
        return RootResult(
            status=FOUND, value=value, residual=residual,
            bracket=(float(lo), float(hi)),
            within_radius=bool(abs(float(value) - 1.0) <= R),
            sign_changes=n_changes, notes=tuple(notes))


def find_zeta_zero(t_lo: float, t_hi: float,
                   ctx: PrecisionContext = DEFAULT_CTX) -> RootResult:
    """Bisect Hardy's Z on [t_lo, t_hi] down to |Z| <= 1e-10.  The located
    ordinate gamma has beta = 1/2 by construction of Z.  Returns
    no-sign-change status when Z(t_lo) Z(t_hi) >= 0."""
    if not (0 <= t_lo < t_hi):
        raise ValueError("need 0 <= t_lo < t_hi")
    tol = 1e-10
    with ctx.workprec():
        z_lo = zetafn.hardy_z(t_lo, ctx)
        z_hi = zetafn.hardy_z(t_hi, ctx)
        if mpmath.sign(z_lo.re) * mpmath.sign(z_hi.re) >= 0:
            return RootResult(
                status=NO_SIGN_CHANGE, value=None, residual=float("nan"),
                bracket=(t_lo, t_hi), within_radius=False, sign_changes=0,
                notes=(f"Z({t_lo}) = {to_float(z_lo.re):.6g} and "
                       f"Z({t_hi}) = {to_float(z_hi.re):.6g} share a sign",))
        lo = mpmath.mpf(t_lo)
        hi = mpmath.mpf(t_hi)
        slo = mpmath.sign(z_lo.re)
        value = (lo + hi) / 2
        residual = float("inf")
        for _ in range(ctx.working_bits + 64):
            value = (lo + hi) / 2
            zm = zetafn.hardy_z(value, ctx)
            residual = to_float(abs(zm.re))
            if residual <= tol:
                break
            if mpmath.sign(zm.re) == slo:
                lo = value
            else:
                hi = value
        notes = ()
        if residual > tol:
            notes = (f"bisection stalled at |Z| = {residual:.3g}",)
        return RootResult(
            status=FOUND, value=value, residual=residual,
            bracket=(float(lo), float(hi)), within_radius=True,
            sign_changes=1, notes=notes)
