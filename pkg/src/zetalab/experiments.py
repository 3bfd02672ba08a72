"""Parameter regimes, exact and ratio-based bound measurements, Taylor
identity verification, and the final-chain report.

Everything here measures and reports; nothing asserts the asymptotic
claims behind the bounds.  Each check returns a BoundReport whose ratio
field estimates the implied constant (envelopes are evaluated with
constant 1), and whose hypotheses_satisfied flag records whether the
desk-scale parameters actually sit inside the claimed regime (at
reachable V and gamma they essentially never do; the violations are
listed in the notes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import OverrideError
from .precision import CValue, PrecisionContext, DEFAULT_CTX, cv, to_float
from .sieve import MobiusTable, coeff_table, mobius_table
from . import dirichlet, roots
from .dirichlet import GSpec, MollifierSpec

STAR = "star"
DOUBLESTAR = "doublestar"

LN2 = math.log(2.0)


# ----------------------------------------------------------------------
# parameter records
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ParamSet:
    regime: str
    b: float
    epsilon: float
    r: float
    a: float
    gamma0: float
    beta0: float
    T: float
    v: float
    w: complex
    s0: float
    z0: float
    z1: float
    U: int
    V: int
    J: int
    c0: float
    strict: bool
    violations: tuple = ()
    notes: tuple = ()

    @property
    def hypotheses_satisfied(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "regime": self.regime, "b": self.b, "epsilon": self.epsilon,
            "r": self.r, "a": self.a, "gamma0": self.gamma0,
            "beta0": self.beta0, "T": self.T, "v": self.v,
            "w": {"re": self.w.real, "im": self.w.imag},
            "s0": self.s0, "z0": self.z0, "z1": self.z1,
            "U": self.U, "V": self.V, "J": self.J, "c0": self.c0,
            "strict": self.strict,
            "hypotheses_satisfied": self.hypotheses_satisfied,
            "violations": list(self.violations),
            "notes": list(self.notes),
        }


@dataclass
class BoundReport:
    lemma_id: str
    lhs: float
    rhs_envelope: float
    ratio: float
    hypotheses_satisfied: bool
    params: ParamSet | None = None
    notes: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "lemma_id": self.lemma_id,
            "lhs": self.lhs,
            "rhs_envelope": self.rhs_envelope,
            "ratio": self.ratio,
            "hypotheses_satisfied": self.hypotheses_satisfied,
            "notes": list(self.notes),
        }
        if self.extras:
            out["extras"] = self.extras
        if self.params is not None:
            out["params"] = self.params.to_dict()
        return out


def build_params(regime: str, V: int, gamma0: float, beta0: float = 0.5,
                 overrides: dict | None = None, strict: bool = False) -> ParamSet:
    """Fill a full parameter record for the chosen regime.

    doublestar: r = min(1/100, 20b/181, 10(1-2b)/221), a = b + (1+2r)/2.
    star:       r defaults to 1/3000, a = 1 + r.
    Both:       T = 2 gamma0 / 3, v = gamma0, s0 = a + r, z0 = s0 - beta0,
                U = V^(2/3), J = 2 floor(z0 log U + 2).

    strict=False permits out-of-range values; every violated regime
    constraint is listed (and raises under strict=True).  Mutually
    inconsistent overrides (z1 < z0, U > V, odd J) always raise."""
    if regime not in (STAR, DOUBLESTAR):
        raise ValueError("regime must be 'star' or 'doublestar'")
    if V < 2 or gamma0 < 2:
        raise ValueError("need V >= 2 and gamma0 >= 2")
    ov = dict(overrides or {})
    notes = []

    if regime == DOUBLESTAR:
        b = float(ov.pop("b", 0.1))
        r = float(ov.pop("r", min(1 / 100, 20 * b / 181, 10 * (1 - 2 * b) / 221)))
        eps = float(ov.pop("epsilon", r / 100))
        a = float(ov.pop("a", b + (1 + 2 * r) / 2))
    else:
        b = float(ov.pop("b", 0.5))
        r = float(ov.pop("r", 1 / 3000))
        eps = float(ov.pop("epsilon", r / 10))
        a = float(ov.pop("a", 1 + r))
    T = float(ov.pop("T", 2 * gamma0 / 3))
    v = float(ov.pop("v", gamma0))
    s0 = a + r
    z0 = float(ov.pop("z0", s0 - beta0))
    z1 = float(ov.pop("z1", z0))
    U = int(ov.pop("U", max(2, round(V ** (2 / 3)))))
    lnU = math.log(U)
    J = int(ov.pop("J", 2 * math.floor(z0 * lnU + 2)))
    c0 = float(ov.pop("c0", 1e-3))
    if ov:
        raise OverrideError(f"unknown override keys: {sorted(ov)}")

    # hard inconsistencies always raise
    if z1 < z0:
        raise OverrideError(f"z1 = {z1} < z0 = {z0}")
    if not (2 <= U <= V):
        raise OverrideError(f"need 2 <= U <= V, got U={U}, V={V}")
    if J < 2 or J % 2:
        raise OverrideError(f"J must be an even integer >= 2, got {J}")
    if z0 <= 0:
        raise OverrideError(f"z0 must be positive, got {z0}")

    viol = []

    def need(cond: bool, label: str):
        if not cond:
            viol.append(label)

    slack = 1 + 1e-9  # audit comparisons tolerate float rounding
    if regime == DOUBLESTAR:
        need(0 < 200 * eps <= 2 * r * slack,
             f"0 < 200*eps <= 2r (eps={eps:g}, r={r:g})")
        need(2 * r <= min(1 - a, 1 / 50) * slack,
             f"2r <= min(1-a, 1/50) (r={r:g}, a={a:g})")
        need(a * slack >= b + (1 + 2 * r) / 2, f"a >= b + (1+2r)/2")
        need(0 < b < 0.5, f"0 < b < 1/2 (b={b:g})")
        need(z0 <= min(3 * r, (2 * a - 1) / 10, (1 - a) / 5) * slack,
             f"z0 <= min(3r, (2a-1)/10, (1-a)/5) (z0={z0:g})")
    else:
        need(0 < 10 * eps <= r * slack and r <= 1 / 1000 * slack,
             f"0 < 10*eps <= r <= 1/1000 (r={r:g})")
        need(abs(a - (1 + r)) < 1e-12, f"a = 1 + r (a={a:g})")
        need(z0 <= min(3 * r, 1 / 1000) * slack,
             f"z0 <= min(3r, 1/1000) (z0={z0:g})")
        need(0 < c0 <= 1 / 1000 * slack, f"0 < c0 <= 1/1000 (c0={c0:g})")
    need(2 <= T <= v <= 2 * T, f"2 <= T <= v <= 2T (T={T:g}, v={v:g})")
    need(2 * r <= z0, f"2r <= z0 (r={r:g}, z0={z0:g})")
    need(z1 <= 2 * z0, f"z1 <= 2*z0 (z1={z1:g})")
    need(J == 2 * math.floor(z0 * lnU + 2),
         f"J = 2*floor(z0*log(U)+2) (J={J}, formula gives "
         f"{2 * math.floor(z0 * lnU + 2)})")
    # growth hypotheses, compared in logs (T^(2/r) overflows doubles)
    need(math.log(V) >= (2 / r) * math.log(T), f"V >= T^(2/r)")
    need(math.log(V) >= math.log(U), "V >= U")
    exp_floor = 10.0 if regime == DOUBLESTAR else 30.0
    need(lnU >= exp_floor / z0, f"U >= exp({exp_floor:g}/z0)")
    need(gamma0 > 1e10, "gamma0 > 1e10 (desk-scale substitute)")

    if strict and viol:
        raise OverrideError("strict regime violated: " + "; ".join(viol))
    if viol:
        notes.append(f"{len(viol)} regime constraint(s) violated at desk scale")

    return ParamSet(
        regime=regime, b=b, epsilon=eps, r=r, a=a, gamma0=gamma0,
        beta0=beta0, T=T, v=v, w=complex(a, v), s0=s0, z0=z0, z1=z1,
        U=U, V=V, J=J, c0=c0, strict=strict,
        violations=tuple(viol), notes=tuple(notes))


# ----------------------------------------------------------------------
# shared tables and mollifier roots
# ----------------------------------------------------------------------

_TABLE_CACHE: dict = {}
_ROOT_CACHE: dict = {}


def shared_table(limit: int) -> MobiusTable:
    tab = _TABLE_CACHE.get(limit)
    if tab is None:
        tab = mobius_table(limit)
        _TABLE_CACHE[limit] = tab
    return tab


def resolve_root(V: int, variant: str, table: MobiusTable,
                 ctx: PrecisionContext, first_radius: float):
    """Locate a mollifier root: claimed radius first, then modest widening
    (a zero far from 1 is not a mollifier root in any useful sense, so the
    widening is capped at 0.25).

    Returns (root_value_float, notes_list).  Without a usable zero the
    fallback is root = 1 (zero exponent shift), with a note."""
    key = (V, variant, round(first_radius, 12), ctx.working_bits)
    got = _ROOT_CACHE.get(key)
    if got is not None:
        return got
    notes = []
    radii = []
    for rr in (first_radius, 0.1, 0.25):
        rr = min(max(rr, 1e-6), 0.999999)
        if not any(abs(rr - q) < 1e-9 for q in radii):
            radii.append(rr)
    root = None
    for i, rr in enumerate(radii):
        res = roots.find_mollifier_root(V, rr, table, ctx)
        if res.found:
            root = float(res.value)
            if i > 0:
                notes.append(
                    f"{variant} root found at widened radius {rr:g} "
                    f"(claimed radius {radii[0]:g} had no sign change)")
            if res.sign_changes > 1:
                notes.append(f"{variant} root scan saw {res.sign_changes} "
                             f"sign changes at radius {rr:g}")
            break
    if root is None:
        root = 1.0
        notes.append(f"no real {variant} mollifier zero within 0.25 of 1 "
                     f"at V={V}; using root = 1 (zero shift)")
    _ROOT_CACHE[key] = (root, notes)
    return root, notes


def _mollifier_for(lemma_variant: str, params: ParamSet, table, ctx):
    if lemma_variant == "standard":
        first = min(math.exp((params.a - 1) * math.log(params.V)), 0.999)
    else:
        first = min(math.exp(-params.c0 * math.log(params.V)), 0.999)
    root, notes = resolve_root(params.V, lemma_variant, table, ctx, first)
    return MollifierSpec(V=params.V, root=root, variant=lemma_variant), notes


# ----------------------------------------------------------------------
# the one fully provable check: the weight-sum and factorial inequalities
# ----------------------------------------------------------------------

def check_lemma1(J: int, grid_step: float = 1e-3,
                 ctx: PrecisionContext = DEFAULT_CTX,
                 factorial_max: int = 50) -> BoundReport:
    """Exact verification that sum_{j=1}^{J-1} p_j(u) <= p_{J-1}(u)/2 on
    (2-J)/2 <= u <= 0 (grid at grid_step), and j! <= j^(j+1) e^(1-j) for
    j up to factorial_max.  lhs reports the maximum violation margin;
    <= 0 means pass.  The u-grid is screened in float64 and every margin
    within 1e-6 of zero is re-verified at working precision."""
    if J < 2 or J % 2:
        raise ValueError("J must be an even integer >= 2")
    lo = (2 - J) / 2.0
    npts = int(round(-lo / grid_step)) + 1
    u = lo + grid_step * np.arange(npts)
    u[-1] = 0.0
    # accumulate p_j by the term recurrence t_j = t_{j-1} * u / j
    emu = np.exp(-u)
    t = np.ones_like(u)
    S = np.zeros_like(u)
    for j in range(1, J):
        t = t * u / j
        if j <= J - 2:
            S += t
    pJm1 = t * emu              # p_{J-1}(u)
    S = S * emu                 # sum_{j=1}^{J-2} p_j... see below
    # note: loop adds t_j for j <= J-2 into S and leaves t = u^(J-1)/(J-1)!
    margins = (S + pJm1) - 0.5 * pJm1   # sum_{j=1}^{J-1} includes p_{J-1}
    # re-verify every margin near the boundary at working precision
    recheck = np.nonzero(margins > -1e-6)[0]
    with ctx.workprec():
        for idx in recheck:
            uu = mpmath.mpf(float(u[idx]))
            tot = mpmath.mpf(0)
            term = mpmath.mpf(1)
            for j in range(1, J):
                term = term * uu / j
                tot += term
            margins[idx] = float((tot - term / 2) * mpmath.exp(-uu))
        worst = float(margins.max())
        n_viol = int((margins > 0).sum())
        fact_worst = -math.inf
        fact_viol = 0
        fact = mpmath.mpf(1)
        for j in range(1, max(factorial_max, J) + 1):
            fact *= j
            bound = mpmath.exp((j + 1) * mpmath.log(j) + 1 - j)
            fm = to_float(fact - bound)
            fact_worst = max(fact_worst, fm)
            if fact - bound > 0:
                fact_viol += 1
    notes = [f"u-grid of {npts} points on [{lo:g}, 0], "
             f"{len(recheck)} margins re-verified at {ctx.working_bits} bits",
             f"factorial inequality checked for j <= {max(factorial_max, J)}"]
    if n_viol or fact_viol:
        notes.append(f"VIOLATIONS: {n_viol} grid, {fact_viol} factorial")
    return BoundReport(
        lemma_id="lemma1", lhs=max(worst, fact_worst), rhs_envelope=0.0,
        ratio=0.0, hypotheses_satisfied=True, params=None, notes=notes,
        extras={"grid_violations": n_viol, "factorial_violations": fact_viol,
                "worst_grid_margin": worst, "worst_factorial_margin": fact_worst})


# ----------------------------------------------------------------------
# decay / growth bound measurements
# ----------------------------------------------------------------------

def default_grid(lemma: int, params: ParamSet):
    """A small representative grid for each bound family."""
    a, r, eps, T = params.a, params.r, params.epsilon, params.T
    if lemma == 3:
        sigmas = [a - r + 2 * eps, 1.2, 1.5, 2.0, 3.0]
        ts = [0.0, T / 2]
        return [complex(sg, t) for sg in sigmas for t in ts]
    if lemma == 5:
        edge = a - r + 2 / math.log(params.V)
        sigmas = [edge, 1.2, 1.5, 2.0, 3.0]
        ts = [0.0, T / 2]
        return [complex(sg, t) for sg in sigmas for t in ts]
    if lemma == 6:
        cap = a - 0.5
        omegas = [0.0, cap / 2, cap]
        out = []
        for om in omegas:
            z_edge = om + 0.5 - a - r
            for z in (z_edge, z_edge + 0.25, complex(z_edge + 0.1, T / 4)):
                out.append((complex(om), complex(z)))
        return out
    if lemma == 7:
        omegas = [0.0, 0.25, 0.5]
        out = []
        for om in omegas:
            z_edge = om - 0.5 - 2 * r
            for z in (z_edge, z_edge + 0.25, complex(z_edge + 0.1, T / 4)):
                out.append((complex(om), complex(z)))
        return out
    raise ValueError("lemma must be one of 3, 5, 6, 7")


def check_bound(lemma: int, params: ParamSet, grid=None,
                ctx: PrecisionContext = DEFAULT_CTX,
                threads: int = 1) -> BoundReport:
    """Measure LHS / envelope ratios for one decay (3, 5) or growth (6, 7)
    bound family on a grid; a measurement, never an assertion.  Grid
    points violating the family's domain constraints are skipped and
    flagged.  Points evaluate independently (threads > 1 fans them out;
    results keep grid order either way)."""
    from . import pool

    if lemma not in (3, 5, 6, 7):
        raise ValueError("lemma must be one of 3, 5, 6, 7")
    if grid is None:
        grid = default_grid(lemma, params)
    variant = "standard" if lemma in (3, 6) else "tilde"
    table = shared_table(max(params.V, 100))
    spec, notes = _mollifier_for(variant, params, table, ctx)
    notes = list(notes)
    a, r, eps, V, T, c0 = (params.a, params.r, params.epsilon, params.V,
                           params.T, params.c0)
    lnV = math.log(V)

    def eval_point(point):
        # returns ("row", dict) or ("skip", message)
        if lemma in (3, 5):
            s = complex(point)
            sg, t = s.real, s.imag
            if lemma == 3 and sg < a - r + 2 * eps - 1e-12:
                return ("skip", f"skipped s={s}: sigma below a-r+2eps")
            if lemma == 5 and sg < a - r + 2 / lnV - 1e-12:
                return ("skip", f"skipped s={s}: sigma below a-r+2/logV")
            fv = dirichlet.f_v(cv(s), spec, table, ctx)
            lhs = to_float(abs(fv.to_mpc() - 1))
            if lemma == 3:
                rhs = math.exp((a - min(1.0, sg + r) + eps) * lnV) \
                    * (abs(t) + 1) ** eps
            else:
                rhs = (math.exp((a - (sg + r)) * lnV)
                       + math.exp(-c0 * lnV)) * lnV ** 3
            return ("row", {"point": [s.real, s.imag], "lhs": lhs,
                            "rhs": rhs, "ratio": lhs / rhs,
                            "lhs_err": fv.err_bound})
        om, z = point
        om = complex(om)
        z = complex(z)
        if lemma == 6:
            dom_ok = (abs(om) <= a - 0.5 + 1e-12
                      and -1e-12 <= om.real <= a - 0.5 + 1e-12
                      and z.real >= om.real + 0.5 - a - r - 1e-12)
        else:
            dom_ok = (abs(om) <= 0.5 + 1e-12
                      and -1e-12 <= om.real <= 0.5 + 1e-12
                      and z.real >= om.real - 0.5 - 2 * r - 1e-12)
        if not dom_ok:
            return ("skip", f"skipped (omega={om}, z={z}): outside domain")
        w = mpmath.mpc(params.a, params.v)
        zz = mpmath.mpc(z)
        oo = mpmath.mpc(om)
        s1 = w + r - oo + zz
        s2 = mpmath.conj(w) + r - oo + zz
        f1 = dirichlet.f_v(cv(s1), spec, table, ctx)
        f2 = dirichlet.f_v(cv(s2), spec, table, ctx)
        lhs = max(to_float(abs(f1.to_mpc())), to_float(abs(f2.to_mpc())))
        grow = max(0.0, (om - z).real - 2 * r)
        if lemma == 6:
            rhs = (V * (T + abs(z.imag))) ** (grow + 4 * eps)
        else:
            rhs = ((V * math.sqrt(T + abs(z.imag))) ** grow
                   * math.log(V + T + abs(z.imag)) ** 2)
        return ("row", {"point": [[om.real, om.imag], [z.real, z.imag]],
                        "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs,
                        "lhs_err": max(f1.err_bound, f2.err_bound)})

    rows = []
    skipped = 0
    with ctx.workprec():
        for kind, payload in pool.map_ordered(eval_point, grid, threads):
            if kind == "row":
                rows.append(payload)
            else:
                skipped += 1
                notes.append(payload)
    if not rows:
        return BoundReport(
            lemma_id=f"lemma{lemma}", lhs=float("nan"),
            rhs_envelope=float("nan"), ratio=float("nan"),
            hypotheses_satisfied=params.hypotheses_satisfied, params=params,
            notes=notes + ["no admissible grid points"], extras={"rows": rows})
    best = max(rows, key=lambda row: row["ratio"])
    if skipped:
        notes.append(f"{skipped} grid point(s) skipped")
    return BoundReport(
        lemma_id=f"lemma{lemma}", lhs=best["lhs"], rhs_envelope=best["rhs"],
        ratio=best["ratio"],
        hypotheses_satisfied=params.hypotheses_satisfied, params=params,
        notes=notes, extras={"rows": rows, "max_ratio": best["ratio"],
                             "root": spec.root})


# ----------------------------------------------------------------------
# derivative-expansion remainder measurements
# ----------------------------------------------------------------------

def _expansion_envelopes(lemma: int, p: ParamSet):
    """The two remainder envelopes (full-J term, partial-sum term) with
    implied constant 1; exponents evaluated in logs."""
    lnV, lnU, lnT = math.log(p.V), math.log(p.U), math.log(p.T)
    z0, z1, r, eps = p.z0, p.z1, p.r, p.epsilon

    def pw(lnbase, e):
        return math.exp(e * lnbase)

    if lemma == 8:
        rhs1 = (pw(lnU, z1) / pw(lnV, 2 * z0 - r / 4 - 6 * eps)
                + pw(lnU, 5 * z0 - r + eps / 2) / pw(lnV, 5 * z0)
                + (math.exp((z1 - 2 * r + 4 * eps) * (lnV + lnT))
                   + pw(lnV, z1 + z0 - 1.75 * r + 6 * eps)
                   * pw(lnU, -(1 + 2 * LN2) * z0)
                   + (1 + pw(lnV, z1 - z0 - r)) * pw(lnV, r / 4 + 6 * eps)
                   * pw(lnU, z0 - r)) * pw(lnU, -z1))
        rhs2 = (pw(lnV, -2 * z0 + r) * pw(lnU, z0)
                + pw(lnU, 5 * z0 - r + eps) / pw(lnV, 5 * z0)
                + (math.exp((z0 - 2 * r + 4 * eps) * (lnV + lnT))
                   + pw(lnV, 2 * z0 - 1.75 * r + 6 * eps)
                   * pw(lnU, -2 * (1 + LN2) * z0)) * pw(lnU, -z0)
                + pw(lnV, r / 4 + 6 * eps) * pw(lnU, -r))
        return rhs1, rhs2
    if lemma == 9:
        l52 = lnV ** 2.5
        rhs1 = (pw(lnU, z1) * l52 / pw(lnV, 2 * z0 - r / 4)
                + pw(lnU, z1) * lnV ** 3 / pw(lnV, 1 / 1000)
                + (math.exp((z1 - 2 * r) * (lnV + lnT / 2))
                   + pw(lnV, z1 + z0 - 1.75 * r) * pw(lnU, -(1 + 2 * LN2) * z0)
                   + (1 + pw(lnV, z1 - z0 - r)) * pw(lnV, r / 4)
                   * pw(lnU, z0 - r)) * pw(lnU, -z1) * l52)
        rhs2 = (pw(lnU, z0) * pw(lnV, -2 * z0 + r)
                + pw(lnU, z0) * lnV ** 4 / pw(lnV, 1 / 1000)
                + (math.exp((z0 - 2 * r) * (lnV + lnT / 2)) * pw(lnU, -z0)
                   + pw(lnV, 2 * z0 - 1.75 * r) * pw(lnU, -2 * (1 + LN2) * z0)
                   + pw(lnV, r / 4) * pw(lnU, -r)) * l52)
        return rhs1, rhs2
    raise ValueError("lemma must be 8 or 9")


def check_expansion(lemma: int, params: ParamSet,
                    ctx: PrecisionContext = DEFAULT_CTX,
                    radius: float = 0.75) -> BoundReport:
    """Measure the two derivative-expansion remainders (full-J main-term
    discrepancy at s0+z0-z1, and the partial-sum discrepancy at s0)
    against the claimed envelopes with implied constant 1.  Derivatives
    come from the Cauchy circle route."""
    if lemma not in (8, 9):
        raise ValueError("lemma must be 8 or 9")
    p = params
    variant = "standard" if lemma == 8 else "tilde"
    table = shared_table(max(p.V, 100))
    spec, notes = _mollifier_for(variant, p, table, ctx)
    notes = list(notes)
    g = GSpec(mollifier=spec, U=p.U, v=p.v, s0=p.s0)
    with ctx.workprec():
        s1 = p.s0 + p.z0 - p.z1
        dJ = dirichlet.g_deriv_cauchy(p.J, s1, g, radius, table, ctx)
        partial_main, rem_main = dirichlet.taylor_main_terms(
            p.J, p.z0, p.U, p.z1 - p.z0)
        z0m = mpmath.mpf(p.z0)
        scaled = (-z0m) ** p.J / mpmath.factorial(p.J) * dJ.to_mpc()
        lhs1 = to_float(abs(scaled - rem_main))
        derivs = dirichlet.g_derivs_cauchy(list(range(1, p.J)), p.s0, g,
                                           radius, table, ctx)
        total = mpmath.mpf(0)
        for j in range(1, p.J):
            total += (-z0m) ** j / mpmath.factorial(j) * derivs[j].to_mpc()
        lhs2 = to_float(abs(total - partial_main))
    rhs1, rhs2 = _expansion_envelopes(lemma, p)
    ratio = max(lhs1 / rhs1, lhs2 / rhs2)
    exp_floor = 10.0 if lemma == 8 else 30.0
    growth_ok = (math.log(p.V) >= (2 / p.r) * math.log(p.T)
                 and p.V >= p.U)
    inner_ok = math.log(p.U) >= exp_floor / p.z0
    return BoundReport(
        lemma_id=f"lemma{lemma}", lhs=lhs1, rhs_envelope=rhs1, ratio=ratio,
        hypotheses_satisfied=p.hypotheses_satisfied, params=p, notes=notes,
        extras={"full_term": {"lhs": lhs1, "rhs": rhs1, "ratio": lhs1 / rhs1},
                "partial_sum": {"lhs": lhs2, "rhs": rhs2,
                                "ratio": lhs2 / rhs2},
                "V_ge_max_T_2_over_r_U": bool(growth_ok),
                "U_ge_exp_floor_over_z0": bool(inner_ok),
                "J": p.J, "root": spec.root})


# ----------------------------------------------------------------------
# Taylor identity with integral remainder
# ----------------------------------------------------------------------

def taylor_identity_check(params: ParamSet,
                          ctx: PrecisionContext = DEFAULT_CTX,
                          radius: float = 0.75,
                          quad_rel_tol: float = 1e-12) -> BoundReport:
    """Verify g(s0-z0) = g(s0) + sum_{j<J} (-z0)^j/j! D^j g(s0) + R_J with
    the remainder in integral form

        R_J = (-z0)^J/(J-1)! * int_0^1 (1-theta)^(J-1) D^J g(s0-theta z0) dtheta

    (adaptive 4-node panels at relative tolerance quad_rel_tol; the
    mean-value form is existential and numerically ill-posed, the integral
    form is an identity).  lhs is the two-sided discrepancy."""
    from . import quadrature

    p = params
    variant = "standard" if p.regime == DOUBLESTAR else "tilde"
    table = shared_table(max(p.V, 100))
    spec, notes = _mollifier_for(variant, p, table, ctx)
    notes = list(notes)
    g = GSpec(mollifier=spec, U=p.U, v=p.v, s0=p.s0)
    J = p.J
    with ctx.workprec():
        z0m = mpmath.mpf(p.z0)
        lhs_val = dirichlet.g_uv(p.s0 - z0m, g, table, ctx)
        if p.z0 == 0:
            return BoundReport(
                lemma_id="taylor", lhs=0.0, rhs_envelope=lhs_val.err_bound,
                ratio=0.0, hypotheses_satisfied=p.hypotheses_satisfied,
                params=p, notes=notes + ["degenerate z0 = 0"], extras={})
        # one shared circle at s0 serves the J+1 center derivatives AND
        # every remainder-integrand point (all within z0 of the center)
        node_err = [0.0]

        def f(zz):
            val = dirichlet.g_uv(cv(zz), g, table, ctx)
            node_err[0] = max(node_err[0], val.err_bound)
            return val.to_mpc()

        s0m = mpmath.mpf(p.s0)
        requests = [(s0m, j) for j in range(0, J + 1)]
        results, query, _ = quadrature.cauchy_many(
            f, s0m, radius, requests, rel_tol=ctx.target_rel_err,
            abs_floor=math.ldexp(1.0, -ctx.working_bits + 10))
        derivs = {}
        for (w, j), (val, qerr) in zip(requests, results):
            amp = to_float(mpmath.factorial(j)) / radius ** j
            derivs[j] = CValue(val.real, val.imag, qerr + node_err[0] * amp)
        rhs = derivs[0]
        for j in range(1, J):
            rhs = rhs + derivs[j] * cv((-z0m) ** j / mpmath.factorial(j))

        def h(theta):
            return (1 - theta) ** (J - 1) * query(s0m - theta * z0m, J)

        scale = to_float(abs(derivs[J].to_mpc())) / J + 1e-30
        ival, qerr, _ = quadrature.integrate_segment(
            h, mpmath.mpf(0), mpmath.mpf(1), quad_rel_tol * scale, nodes=4)
        ampJ = to_float(mpmath.factorial(J)) / radius ** J
        pref = (-z0m) ** J / mpmath.factorial(J - 1)
        RJ = CValue((pref * ival).real, (pref * ival).imag,
                    to_float(abs(pref)) * (qerr + derivs[J].err_bound
                                           + node_err[0] * ampJ))
        rhs = rhs + RJ
        disc = to_float(abs(lhs_val.to_mpc() - rhs.to_mpc()))
        budget = lhs_val.err_bound + rhs.err_bound
    return BoundReport(
        lemma_id="taylor", lhs=disc, rhs_envelope=budget,
        ratio=disc / budget if budget > 0 else 0.0,
        hypotheses_satisfied=p.hypotheses_satisfied, params=p, notes=notes,
        extras={"J": J, "z0": p.z0, "discrepancy": disc,
                "combined_budget": budget,
                "remainder_integral": to_float(abs(RJ.to_mpc())),
                "root": spec.root})


# ----------------------------------------------------------------------
# the final-chain report (a measurement, never a verdict)
# ----------------------------------------------------------------------

def final_report(regime: str, params: ParamSet,
                 ctx: PrecisionContext = DEFAULT_CTX,
                 radius: float = 0.75) -> BoundReport:
    """Compute and report every quantity in the closing inequality chain:
    g at the anchor and at the zero-aligned point, the Taylor main terms,
    the weight-chain value -(z0 log U)^(J-1)/J!, and the comparison
    quantity V^(4(1-log2)z0/3)/(z0 log V + 3)^2 against 7e^3 (doublestar)
    or 5e^3 (star).  No verdict is attached; desk-scale hypothesis
    violations are listed."""
    p = params
    if regime != p.regime:
        raise ValueError("regime does not match the parameter set")
    variant = "standard" if regime == DOUBLESTAR else "tilde"
    table = shared_table(max(p.V, 100))
    spec, notes = _mollifier_for(variant, p, table, ctx)
    notes = list(notes)
    g = GSpec(mollifier=spec, U=p.U, v=p.v, s0=p.s0)
    from . import zetafn

    with ctx.workprec():
        z0m = mpmath.mpf(p.z0)
        g_lo = dirichlet.g_uv(p.s0 - z0m, g, table, ctx)
        g_hi = dirichlet.g_uv(mpmath.mpf(p.s0), g, table, ctx)
        partial_main, rem_main = dirichlet.taylor_main_terms(
            p.J, p.z0, p.U, p.z1 - p.z0)
        lnU = mpmath.log(p.U)
        chain_value = -(z0m * lnU) ** (p.J - 1) / mpmath.factorial(p.J)
        lnV = math.log(p.V)
        final_quantity = (math.exp(4 * (1 - LN2) * p.z0 / 3 * lnV)
                          / (p.z0 * lnV + 3) ** 2)
        threshold = 7 * math.e ** 3 if regime == DOUBLESTAR else 5 * math.e ** 3
        err_exponent = (-5 * p.r / 12 + 6 * p.epsilon if regime == DOUBLESTAR
                        else -1 / 15000)
        # zero-factor budget at rho = beta0 + i gamma0
        rho = mpmath.mpc(p.beta0, p.gamma0)
        zr = zetafn.zeta_em(rho, 0, ctx)
        mvr = dirichlet.m_v(rho + spec.root - 1, p.V, table, ctx)
        u_pow = math.exp(-p.z0 * math.log(p.U))
        budget_rhs = (u_pow * (zr.mag + zr.err_bound)
                      * (mvr.mag + mvr.err_bound) + g_lo.err_bound)
        jflag = (p.J - 1) > 2 * p.z0 * float(lnU)
    notes.append("measurement only: no assertion is made about the "
                 "closing inequality chain")
    notes.extend(p.violations)
    return BoundReport(
        lemma_id=f"final-{regime}", lhs=final_quantity,
        rhs_envelope=threshold, ratio=final_quantity / threshold,
        hypotheses_satisfied=p.hypotheses_satisfied, params=p, notes=notes,
        extras={
            "g_at_s0_minus_z0": {"value": to_float(g_lo.re),
                                 "err_bound": g_lo.err_bound},
            "g_at_s0": {"value": to_float(g_hi.re), "err_bound": g_hi.err_bound},
            "taylor_partial_sum": to_float(partial_main),
            "taylor_remainder_main": to_float(rem_main),
            "weight_chain_value": to_float(chain_value),
            "final_quantity": final_quantity,
            "threshold": threshold,
            "error_term_exponent": err_exponent,
            "zero_factor": {"lhs": to_float(abs(g_lo.re)),
                            "budget": budget_rhs,
                            "within_budget": bool(abs(to_float(g_lo.re))
                                                  <= budget_rhs)},
            "J_minus_1_exceeds_2z0logU": bool(jflag),
            "J": p.J,
            "root": spec.root,
        })
