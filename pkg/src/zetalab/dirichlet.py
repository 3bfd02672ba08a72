"""Mollified Dirichlet polynomials and their derivative machinery.

Central objects, for a mollifier root `root` near 1 and 2 <= U <= V:

    m_v(s)   = sum_{n<=V} mu(n) n^-s                     (truncated 1/zeta)
    f_v(s)   = zeta(s) * m_v(s + root - 1)               (entire when
               m_v(root) = 0: the mollifier zero cancels the zeta pole)
    g_uv(s)  = U^(s-s0) * (f_v(s+iv) + f_v(s-iv)) / 2    (real on the real axis)

High derivatives of g_uv come from two independent routes: a weighted
coefficient series using the Poisson weights p_j(u) = e^-u u^j / j!, and
the Cauchy integral on a circle.  Their agreement is a structural
cross-check exercised by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import DomainError
from .precision import CValue, PrecisionContext, DEFAULT_CTX, cv, to_float, ulp
from .sieve import CoeffTable, MobiusTable
from . import quadrature

# series route below needs Re(s) at least this far right of the abscissa
# of convergence
SERIES_MARGIN = 0.05


@dataclass(frozen=True)
class MollifierSpec:
    """Which mollified product to evaluate: V, the real root shifting the
    mollifier argument, and the regime flag ('standard' or 'tilde')."""

    V: int
    root: float
    variant: str = "standard"

    def __post_init__(self):
        if self.variant not in ("standard", "tilde"):
            raise ValueError("variant must be 'standard' or 'tilde'")
        if abs(self.root - 1) > 1:
            raise ValueError("|root - 1| must be <= 1")
        if self.V < 2:
            raise ValueError("V must be >= 2")

    @property
    def shift(self) -> float:
        """Exponent shift used by the coefficient tables: 1 - root."""
        return 1.0 - self.root


@dataclass(frozen=True)
class GSpec:
    """Anchored combination g_uv: mollifier, inner scale U, ordinate v,
    and the anchor s0 of the U power."""

    mollifier: MollifierSpec
    U: int
    v: float
    s0: float

    def __post_init__(self):
        if not (2 <= self.U <= self.mollifier.V):
            raise ValueError("need 2 <= U <= V")
        if self.v < 2:
            raise ValueError("need v >= 2")


# ----------------------------------------------------------------------
# the truncated Mobius sum
# ----------------------------------------------------------------------

def m_v(s, V: int, table: MobiusTable, ctx: PrecisionContext = DEFAULT_CTX,
        order: int = 0) -> CValue:
    """sum_{n<=V} mu(n) n^-s, exact finite sum at working precision.

    order=1 returns the derivative -sum mu(n) log(n) n^-s.
    """
    if V > table.limit:
        raise ValueError(f"V={V} exceeds table limit {table.limit}")
    if V < 1:
        raise ValueError("V must be >= 1")
    sv = cv(s)
    with ctx.workprec():
        z = sv.to_mpc()
        logs = table.logs(mpmath.mp.prec)
        mu = table.mu
        real_path = z.imag == 0
        zr = z.real
        total = mpmath.mpf(1) if order == 0 else mpmath.mpf(0)
        absmag = 1.0
        dlog = 0.0  # running bound on |d/ds| for input-error propagation
        for n in range(2, V + 1):
            m = mu[n]
            if not m:
                continue
            ln = logs[n]
            p = mpmath.exp(-zr * ln) if real_path else mpmath.exp(-z * ln)
            if order:
                p = -ln * p
            total = total + p if m > 0 else total - p
            pm = to_float(abs(p))
            absmag += pm
            dlog += pm * to_float(ln)
        err = (V + 4) * absmag * math.ldexp(1.0, -mpmath.mp.prec + 1)
        if sv.err_bound > 0:
            err += sv.err_bound * (dlog if order == 0 else dlog * (1 + math.log(V)))
        if real_path:
            return CValue(total if isinstance(total, mpmath.mpf) else total.real,
                          mpmath.mpf(0), err)
        return CValue(total.real, total.imag, err)


def mv_f64_arrays(table: MobiusTable, V: int):
    """(n, mu, log n) float64 arrays over the squarefree n <= V, for
    vectorized scanning."""
    n = table.squarefree_n(V)
    n = n[n >= 1]
    return (n.astype(np.float64),
            table.mu[n].astype(np.float64),
            np.log(n.astype(np.float64)))


def m_v_f64(sigma: float, arrays) -> float:
    """Double-precision m_v on the real axis (root scanning)."""
    _, mu, logn = arrays
    return float(np.dot(mu, np.exp(-sigma * logn)))


# ----------------------------------------------------------------------
# Poisson weights
# ----------------------------------------------------------------------

def p_weight(j: int, u) -> mpmath.mpf:
    """p_j(u) = e^-u u^j / j! at the ambient mpmath precision.

    Computed in log form for u > 0; directly for u <= 0 (where the log
    form is invalid because u^j alternates in sign).  p_0(0) = 1 with the
    0^0 = 1 convention forced by sum_j p_j(u) = 1.
    """
    if j < 0:
        raise ValueError("j must be >= 0")
    u = mpmath.mpf(u)
    if u == 0:
        return mpmath.mpf(1 if j == 0 else 0)
    if u > 0:
        return mpmath.exp(-u + j * mpmath.log(u) - mpmath.loggamma(j + 1))
    return mpmath.exp(-u) * u ** j / mpmath.factorial(j)


def p_weight_f64(j: int, u: np.ndarray) -> np.ndarray:
    """Vectorized float64 Poisson weights (same branch structure)."""
    u = np.asarray(u, dtype=np.float64)
    out = np.empty_like(u)
    pos = u > 0
    lg = math.lgamma(j + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out[pos] = np.exp(-u[pos] + j * np.log(u[pos]) - lg)
    neg = ~pos
    out[neg] = np.exp(-u[neg]) * u[neg] ** j / math.factorial(j)
    if j == 0:
        out[u == 0] = 1.0
    else:
        out[u == 0] = 0.0
    return out


# ----------------------------------------------------------------------
# the entire mollified product and its anchored combination
# ----------------------------------------------------------------------

def f_v(s, spec: MollifierSpec, table: MobiusTable,
        ctx: PrecisionContext = DEFAULT_CTX) -> CValue:
    """zeta(s) * m_v(s + root - 1).

    The s = 1 singularity is removable when m_v(root) = 0; within a tiny
    window around 1 the value comes from the Laurent product
    (1/(s-1) + euler_gamma) * [m_v(root) + (s-1) m_v'(root)], whose error
    budget absorbs any nonzero root residual.
    """
    from . import zetafn

    sv = cv(s)
    V = spec.V
    with ctx.workprec():
        z = sv.to_mpc()
        gap = to_float(abs(z - 1))
        window = max(math.ldexp(1.0, -(ctx.working_bits // 2)), 1e-30)
        if gap <= window:
            root = mpmath.mpf(spec.root)
            mvr = m_v(root, V, table, ctx)
            mvd = m_v(root, V, table, ctx, order=1)
            gamma_e = +mpmath.euler
            ds = z - 1
            val = mvd.to_mpc() + gamma_e * mvr.to_mpc() + ds * gamma_e * mvd.to_mpc()
            err = mvd.err_bound + 0.58 * mvr.err_bound + gap * 0.6 * mvd.mag
            if z != 1:
                val += mvr.to_mpc() / ds
                err += mvr.err_bound / gap
            else:
                # the pole term m_v(root)/(s-1) is dropped; charge the
                # residual against the window scale
                err += mvr.abs_upper() / window
            # second-order Laurent/Taylor truncation
            err += gap * (2.0 * mvd.abs_upper() + mvr.abs_upper()) + gap ** 2
            return CValue(val.real, val.imag, err + ulp(to_float(abs(val))) * 4)
        zv = zetafn.zeta_em(sv, 0, ctx)
        shifted = CValue((z + spec.root - 1).real, (z + spec.root - 1).imag,
                         sv.err_bound)
        mv = m_v(shifted, V, table, ctx)
        return zv * mv


def g_uv(s, g: GSpec, table: MobiusTable,
         ctx: PrecisionContext = DEFAULT_CTX) -> CValue:
    """U^(s-s0) (f_v(s+iv) + f_v(s-iv)) / 2; exactly real for real s by
    conjugate symmetry (computed via the real part of one branch there)."""
    sv = cv(s)
    spec = g.mollifier
    with ctx.workprec():
        z = sv.to_mpc()
        lnU = mpmath.log(g.U)
        if z.imag == 0:
            up = mpmath.exp((z.real - g.s0) * lnU)
            F = f_v(CValue(z.real, mpmath.mpf(g.v), sv.err_bound), spec, table, ctx)
            val = up * F.re
            err = to_float(up) * F.err_bound + ulp(to_float(abs(val))) * 2
            err += sv.err_bound * to_float(abs(lnU * val))
            return CValue(val, mpmath.mpf(0), err)
        upow = mpmath.exp((z - g.s0) * lnU)
        upv = CValue(upow.real, upow.imag,
                     ulp(to_float(abs(upow))) * (2 + to_float(abs(z - g.s0))))
        f1 = f_v(CValue(z.real, z.imag + g.v, sv.err_bound), spec, table, ctx)
        f2 = f_v(CValue(z.real, z.imag - g.v, sv.err_bound), spec, table, ctx)
        return upv * (f1 + f2) * cv(mpmath.mpf(1) / 2)


# ----------------------------------------------------------------------
# derivative route 1: weighted coefficient series
# ----------------------------------------------------------------------

def g_deriv_series(j: int, s, g: GSpec, coeffs: CoeffTable, z0: float,
                   ctx: PrecisionContext = DEFAULT_CTX) -> CValue:
    """(-z0)^j / j! * D^j g_uv(s) via the Poisson-weighted coefficient
    series

        U^(s-s0-z0)/2 * sum_n c_n (n^-(s-z0-iv) + n^-(s-z0+iv))
                                 * p_j(z0 log(n/U)),

    truncated at coeffs.limit with an analytic tail added to err_bound.
    Requires Re(s) >= 1 + 0.05 so the series converges with a computable
    tail; bulk summation runs in float64 (the truncation tail dominates
    rounding by many orders).
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    spec = g.mollifier
    if coeffs.V != spec.V or abs(coeffs.exponent_shift - spec.shift) > 1e-12:
        raise ValueError("coefficient table does not match the mollifier spec")
    sv = cv(s)
    with ctx.workprec():
        z = sv.to_mpc()
        sigma = to_float(z.real)
        if sigma < 1.0 + SERIES_MARGIN:
            raise DomainError(
                f"series route needs Re(s) >= {1 + SERIES_MARGIN}, got {sigma}")
        N = coeffs.limit
        lnU = math.log(g.U)
        zeff = complex(to_float(z.real), to_float(z.imag)) - z0
        # chunked deterministic summation
        total = 0.0 + 0.0j
        absmag = 0.0
        chunk = 1 << 18
        for lo in range(1, N + 1, chunk):
            hi = min(lo + chunk - 1, N)
            n = np.arange(lo, hi + 1, dtype=np.float64)
            cn = coeffs.c[lo:hi + 1]
            logn = np.log(n)
            u = z0 * (logn - lnU)
            w = p_weight_f64(j, u)
            terms = cn * 2.0 * np.cos(g.v * logn) * np.exp(-zeff * logn) * w
            total += terms.sum()
            absmag += np.abs(terms).sum()
        # analytic tail: |c_n| <= d(n) max(1, V^shift) and
        # sum_{n>N} d(n) (log(n/U))^j n^-sigma bounded by splitting off
        # x^-delta and using D(x) <= x (log x + 1)
        delta = (sigma - 1.0) / 2.0
        beta = sigma - delta
        lnNU = math.log(N / g.U)
        if lnNU >= j / delta:
            sup_q = lnNU ** j * math.exp(-delta * math.log(N))
        else:
            sup_q = (j / (math.e * delta)) ** j * g.U ** (-delta)
        dd_tail = beta * math.exp((1 - beta) * math.log(N)) * (
            (math.log(N) + 1) / (beta - 1) + 1.0 / (beta - 1) ** 2)
        cmax = max(1.0, math.exp(coeffs.exponent_shift * math.log(coeffs.V)))
        tail = (cmax * math.exp(z0 * lnU) * (z0 ** j / math.factorial(j))
                * sup_q * dd_tail) if z0 > 0 else 0.0
        if z0 < 0:
            raise DomainError("z0 must be >= 0")
        rounding = 2e-16 * absmag * (math.log2(max(N, 2)) + 4)
        pref = mpmath.exp((z - g.s0 - z0) * mpmath.log(g.U)) / 2
        val = pref * mpmath.mpc(total.real, total.imag)
        pmag = to_float(abs(pref))
        err = pmag * (tail + rounding) + ulp(to_float(abs(val))) * 4
        err += sv.err_bound * (abs(lnU) + math.log(max(N, 2))) * (
            to_float(abs(val)) + pmag * absmag)
        return CValue(val.real, val.imag, err)


# ----------------------------------------------------------------------
# derivative route 2: Cauchy circle
# ----------------------------------------------------------------------

def g_derivs_cauchy(orders, s, g: GSpec, radius: float, table: MobiusTable,
                    ctx: PrecisionContext = DEFAULT_CTX) -> dict:
    """D^j g_uv(s) for every j in `orders`, extracted from one shared set
    of circle nodes on |z - s| = radius (trapezoid, node count doubled
    until two successive values agree within target_rel_err).  g_uv is
    entire, so any radius works; node errors are tracked and amplified by
    j!/radius^j into the reported bounds.  Returns {j: CValue}."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    sv = cv(s)
    node_err = [0.0]

    def f(zz):
        val = g_uv(cv(zz), g, table, ctx)
        node_err[0] = max(node_err[0], val.err_bound)
        return val.to_mpc()

    with ctx.workprec():
        z = sv.to_mpc()
        got, _ = quadrature.cauchy_derivatives(
            f, z, radius, orders, rel_tol=ctx.target_rel_err,
            abs_floor=math.ldexp(1.0, -ctx.working_bits + 10))
        out = {}
        for j, (val, qerr) in got.items():
            amp = to_float(mpmath.factorial(j)) / radius ** j
            err = qerr + node_err[0] * amp
            if sv.err_bound > 0:
                # next-derivative scale bound for input uncertainty
                err += sv.err_bound * amp * (j + 1) / radius * (
                    1.0 + to_float(abs(val)) * radius ** j
                    / max(to_float(mpmath.factorial(j)), 1.0))
            out[j] = CValue(val.real, val.imag, err)
        return out


def g_deriv_cauchy(j: int, s, g: GSpec, radius: float, table: MobiusTable,
                   ctx: PrecisionContext = DEFAULT_CTX) -> CValue:
    """Single-order convenience wrapper around g_derivs_cauchy."""
    if j < 0:
        raise ValueError("j must be >= 0")
    return g_derivs_cauchy([j], s, g, radius, table, ctx)[j]


# ----------------------------------------------------------------------
# closed-form main terms of the Taylor chain
# ----------------------------------------------------------------------

def taylor_main_terms(J: int, z0: float, U: int, z_gap: float):
    """(sum_{j=1}^{J-1} (-z0 log U)^j / j!,  U^-z_gap (-z0 log U)^J / J!)
    at the ambient mpmath precision."""
    if J < 2:
        raise ValueError("J must be >= 2")
    if z_gap < 0:
        raise ValueError("z_gap must be >= 0")
    x = -mpmath.mpf(z0) * mpmath.log(U)
    term = mpmath.mpf(1)
    partial = mpmath.mpf(0)
    for k in range(1, J):
        term = term * x / k
        partial += term
    term = term * x / J
    rem_main = mpmath.exp(-mpmath.mpf(z_gap) * mpmath.log(U)) * term
    return partial, rem_main
