"""Perron-formula quadrature and argument-principle winding counts.

perron_mv integrates (1/2 pi i) int_{c-iW}^{c+iW} zeta^-1(s+z) V^z / z dz
on a vertical segment whose abscissa keeps s+z right of the zeta zeros;
panels are seeded geometrically toward y = 0 to resolve the 1/z mass.
The caller compares the result against the direct truncated Mobius sum
with the envelope 10 * (V^c log V / W + log V / V^sigma); see
perron_envelope.

winding_number evaluates (1/2 pi i) closed-contour f'/f on a circle and
rounds to the nearest integer, rejecting ambiguous (non-integer) residues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import AmbiguousWindingError, DomainError, NonConvergenceError, ZeroOnContourError
from .precision import CValue, PrecisionContext, DEFAULT_CTX, cv, to_float
from .sieve import MobiusTable
from . import dirichlet, quadrature, zetafn

VERTICAL = "vertical_segment"
RECTANGLE = "rectangle"
CIRCLE = "circle"


@dataclass(frozen=True)
class ContourSpec:
    kind: str
    c: float | None = None          # abscissa of the vertical segment
    W: float | None = None          # half-height
    center: complex | None = None   # circles
    radius: float | None = None
    re_lo: float | None = None      # rectangle abscissae
    re_hi: float | None = None

    def __post_init__(self):
        if self.kind not in (VERTICAL, RECTANGLE, CIRCLE):
            raise ValueError(f"unknown contour kind {self.kind!r}")
        if self.kind == VERTICAL:
            if self.c is None or self.W is None:
                raise ValueError("vertical segment needs c and W")
            if self.W < 2:
                raise ValueError("W must be >= 2")
        if self.kind == CIRCLE:
            if self.center is None or self.radius is None or self.radius <= 0:
                raise ValueError("circle needs center and positive radius")
        if self.kind == RECTANGLE:
            if self.re_lo is None or self.re_hi is None or self.W is None:
                raise ValueError("rectangle needs re_lo, re_hi, W")

    @classmethod
    def vertical(cls, c: float, W: float) -> "ContourSpec":
        return cls(kind=VERTICAL, c=c, W=W)

    @classmethod
    def circle(cls, center, radius: float) -> "ContourSpec":
        return cls(kind=CIRCLE, center=complex(center), radius=radius)

    @classmethod
    def rectangle(cls, re_lo: float, re_hi: float, W: float) -> "ContourSpec":
        return cls(kind=RECTANGLE, re_lo=re_lo, re_hi=re_hi, W=W)


def perron_abscissa(sigma: float, V: int) -> float:
    """The canonical choice c = max(1 - sigma, 0) + 1/log V."""
    return max(1.0 - sigma, 0.0) + 1.0 / math.log(V)


def perron_envelope(s, V: int, spec: ContourSpec) -> float:
    """Truncation envelope 10 (V^c log V / W + log V / V^sigma)."""
    sigma = to_float(cv(s).re)
    lnV = math.log(V)
    return 10.0 * (math.exp(spec.c * lnV) * lnV / spec.W
                   + lnV * math.exp(-sigma * lnV))


def _geometric_seeds(c: float, W: float):
    """Panel breaks (as [0,1] positions) packed toward y = 0."""
    seeds = [0.5]
    y = W / 2.0
    floor = max(c / 4.0, W * 1e-12)
    while y > floor:
        seeds.append(0.5 + y / (2.0 * W))
        seeds.append(0.5 - y / (2.0 * W))
        y /= 2.0
    return sorted(seeds)


def perron_mv(s, V: int, spec: ContourSpec,
              ctx: PrecisionContext = DEFAULT_CTX,
              quad_tol: float | None = None) -> CValue:
    """Perron approximation of the truncated Mobius sum at s.

    err_bound carries the quadrature estimate plus integrand error mass;
    it does NOT include the envelope (the caller owns that comparison).
    A float64 evaluator serves tolerances >= 1e-12; tighter contexts run
    node-by-node at working precision.
    """
    if spec.kind != VERTICAL:
        raise DomainError("perron_mv needs a vertical_segment contour")
    sv = cv(s)
    sigma = to_float(sv.re)
    if spec.c <= max(1.0 - sigma, 0.0):
        raise DomainError(
            f"abscissa c={spec.c} must exceed max(1-sigma, 0)={max(1.0 - sigma, 0.0)}")
    c, W = float(spec.c), float(spec.W)
    envelope = perron_envelope(s, V, spec)
    tol = quad_tol if quad_tol is not None else max(envelope / 100.0, 1e-13)
    seeds = _geometric_seeds(c, W)
    lnV = math.log(V)

    if ctx.target_rel_err >= 1e-12:
        s64 = complex(to_float(sv.re), to_float(sv.im))
        node_err = [0.0]

        def fbatch(zs):
            w = s64 + zs
            vals, errs = zetafn.zeta_f64(w)
            inv = 1.0 / vals
            fac = np.exp(zs * lnV) / zs
            node_err[0] = max(node_err[0], float(np.max(errs * np.abs(inv) ** 2)))
            return inv * fac

        a = complex(c, -W)
        b = complex(c, W)
        val, qerr, _ = quadrature.integrate_segment_f64(
            fbatch, a, b, tol * 2 * math.pi, seed_breaks=seeds)
        val = val / complex(0, 2 * math.pi)
        qerr /= 2 * math.pi
        # integrand-error mass: max density times int |V^z/z| along the line
        mass = node_err[0] * math.exp(c * lnV) * 2 * (math.log(W / c) + 1) / (2 * math.pi)
        return CValue(mpmath.mpf(val.real), mpmath.mpf(val.imag),
                      qerr + mass + sv.err_bound * 2.0)

    node_err = [0.0]

    def f(z):
        w = sv.to_mpc() + z
        iz = zetafn.inv_zeta(w, ctx)
        fac = mpmath.exp(z * mpmath.log(V)) / z
        node_err[0] = max(node_err[0], iz.err_bound * to_float(abs(fac)))
        return iz.to_mpc() * fac

    with ctx.workprec():
        a = mpmath.mpc(c, -W)
        b = mpmath.mpc(c, W)
        val, qerr, _ = quadrature.integrate_segment(
            f, a, b, tol * 2 * math.pi, seed_breaks=seeds)
        val = val / mpmath.mpc(0, 2 * math.pi)
        qerr /= 2 * math.pi
        mass = node_err[0] * 2 * W / (2 * math.pi)
        return CValue(val.real, val.imag, qerr + mass + sv.err_bound * 2.0)


def winding_number(kind: str, circle: ContourSpec, V: int | None = None,
                   ctx: PrecisionContext = DEFAULT_CTX,
                   table: MobiusTable | None = None,
                   m_start: int = 64, m_max: int = 16384) -> int:
    """(1/2 pi i) closed-integral of f'/f on the circle, rounded to the
    nearest integer; f is 1/zeta ('inv_zeta') or the truncated Mobius sum
    ('m_v').  Raises ZeroOnContourError if |f| dips within 10x its error
    bound on the contour, AmbiguousWindingError if the residue is not
    near an integer, NonConvergenceError past the node budget."""
    if circle.kind != CIRCLE:
        raise DomainError("winding_number needs a circle contour")
    if kind not in ("inv_zeta", "m_v"):
        raise ValueError("kind must be 'inv_zeta' or 'm_v'")
    if kind == "m_v":
        if table is None or V is None:
            raise ValueError("m_v winding needs V and a MobiusTable")
        if V > table.limit:
            raise ValueError("V exceeds table limit")

    with ctx.workprec():
        center = mpmath.mpc(circle.center)
        radius = mpmath.mpf(circle.radius)

        def logderiv(z):
            # f'/f, with the contour-proximity guard folded in
            if kind == "inv_zeta":
                zv = zetafn.zeta_em(z, 0, ctx)
                zd = zetafn.zeta_em(z, 1, ctx)
                fmag = 1.0 / max(zv.mag, 1e-300)
                ferr = zv.err_bound * fmag * fmag
                if fmag <= 10.0 * ferr:
                    raise ZeroOnContourError(
                        f"1/zeta magnitude {fmag:g} within 10x err {ferr:g} at {z}")
                return -(zd.to_mpc() / zv.to_mpc())
            mv = dirichlet.m_v(z, V, table, ctx)
            if mv.mag <= 10.0 * mv.err_bound:
                raise ZeroOnContourError(
                    f"m_v magnitude {mv.mag:g} within 10x err {mv.err_bound:g} at {z}")
            md = dirichlet.m_v(z, V, table, ctx, order=1)
            return md.to_mpc() / mv.to_mpc()

        two_pi = 2 * mpmath.pi
        m = m_start
        vals = [logderiv(center + radius * mpmath.exp(1j * (two_pi * k / m)))
                * radius * mpmath.exp(1j * (two_pi * k / m)) for k in range(m)]

        def estimate(vv, mm):
            return sum(vv) / mm

        prev = estimate(vals, m)
        while m < m_max:
            new = [logderiv(center + radius * mpmath.exp(
                1j * (two_pi * (2 * k + 1) / (2 * m))))
                * radius * mpmath.exp(1j * (two_pi * (2 * k + 1) / (2 * m)))
                for k in range(m)]
            merged = []
            for k in range(m):
                merged.append(vals[k])
                merged.append(new[k])
            m *= 2
            vals = merged
            cur = estimate(vals, m)
            if to_float(abs(cur - prev)) <= 0.02:
                w = to_float(cur.real)
                nearest = round(w)
                dist = math.hypot(w - nearest, to_float(cur.imag))
                if dist > 0.1:
                    raise AmbiguousWindingError(
                        f"residue {w:+.4f}{to_float(cur.imag):+.4f}i is "
                        f"{dist:.3f} from the nearest integer")
                return int(nearest)
            prev = cur
        raise NonConvergenceError("winding: node budget exhausted")


def rectangle_shift_identity(s, V: int, re_lo: float, re_hi: float, W: float,
                             ctx: PrecisionContext = DEFAULT_CTX,
                             quad_tol: float = 1e-10):
    """Closed-rectangle residue consistency for the Perron integrand:
    going counterclockwise around [re_lo, re_hi] x [-iW, iW] (which
    encloses z = 0 and no zeta zeros of s+z), the integral of
    zeta^-1(s+z) V^z/z dz equals 2 pi i zeta^-1(s).  Returns
    (contour_value, inv_zeta_value) as CValues for comparison."""
    if not (re_lo < 0 < re_hi):
        raise DomainError("rectangle must enclose z = 0")
    node_err = [0.0]

    def f(z):
        w = cv(s).to_mpc() + z
        iz = zetafn.inv_zeta(w, ctx)
        fac = mpmath.exp(z * mpmath.log(V)) / z
        node_err[0] = max(node_err[0], iz.err_bound * to_float(abs(fac)))
        return iz.to_mpc() * fac

    with ctx.workprec():
        corners = [mpmath.mpc(re_hi, -W), mpmath.mpc(re_hi, W),
                   mpmath.mpc(re_lo, W), mpmath.mpc(re_lo, -W)]
        total = mpmath.mpc(0)
        qerr = 0.0
        perim = 0.0
        for i in range(4):
            a, b = corners[i], corners[(i + 1) % 4]
            seg, err, _ = quadrature.integrate_segment(f, a, b, quad_tol)
            total += seg
            qerr += err
            perim += to_float(abs(b - a))
        total = total / mpmath.mpc(0, 2 * math.pi)
        lhs = CValue(total.real, total.imag,
                     (qerr + node_err[0] * perim) / (2 * math.pi))
        rhs = zetafn.inv_zeta(s, ctx)
        return lhs, rhs
