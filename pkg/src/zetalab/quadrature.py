"""Adaptive Gauss-Legendre panels and circle-trapezoid Cauchy derivatives.

Panels use 16-node Gauss-Legendre by default and bisect until the local
estimate (16-node whole panel vs. the two 16-node halves) drops below the
tolerance share of the panel.  Panel processing order and the final
summation order are fixed, so results are bit-reproducible at a fixed
precision.  The circle rule doubles its node count until two successive
trapezoid values agree; for analytic integrands the trapezoid rule on a
circle converges spectrally.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import NonConvergenceError
from .precision import to_float

_GL_CACHE: dict = {}


def gl_nodes(n: int):
    """Gauss-Legendre nodes/weights on [-1, 1] at the ambient precision."""
    key = (n, mpmath.mp.prec)
    got = _GL_CACHE.get(key)
    if got is not None:
        return got
    nodes = []
    with mpmath.mp.workprec(mpmath.mp.prec + 24):
        for i in range(1, n // 2 + n % 2 + 1):
            # Chebyshev-style initial guess, then Newton on P_n
            x = mpmath.cos(mpmath.pi * (i - mpmath.mpf(1) / 4) / (n + mpmath.mpf(1) / 2))
            for _ in range(60):
                p0, p1 = mpmath.mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < mpmath.ldexp(1, -mpmath.mp.prec + 4):
                    break
            p0, p1 = mpmath.mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes.append((x, w))
    xs, ws = [], []
    for x, w in nodes:
        xs.append(-x)
        ws.append(w)
    if n % 2 == 1:
        xs[-1] = mpmath.mpf(0)
    for x, w in reversed(nodes if n % 2 == 0 else nodes[:-1]):
        xs.append(x)
        ws.append(w)
    out = (tuple(mpmath.mpf(x) for x in xs), tuple(mpmath.mpf(w) for w in ws))
    _GL_CACHE[key] = out
    return out


def _gl_panel(f, a, b, xs, ws):
    mid = (a + b) / 2
    half = (b - a) / 2
    total = mpmath.mpf(0)
    for x, w in zip(xs, ws):
        total += w * f(mid + half * x)
    return total * half


def integrate_segment(f: Callable, a, b, abs_tol: float, *, nodes: int = 16,
                      max_panels: int = 20000,
                      seed_breaks: Sequence | None = None):
    """Integrate f along the straight segment a -> b (complex endpoints).

    Returns (value, err_estimate, evaluation_count).  `seed_breaks` pre-splits
    the segment (values are positions along [0, 1] of the segment).
    """
    a = mpmath.mpmathify(a)
    b = mpmath.mpmathify(b)
    xs, ws = gl_nodes(nodes)
    total_len = to_float(abs(b - a))
    if total_len == 0:
        return mpmath.mpf(0), 0.0, 0
    tol_t = abs_tol / total_len  # tolerance in segment-parameter units
    breaks = [mpmath.mpf(0), mpmath.mpf(1)]
    if seed_breaks:
        breaks += [mpmath.mpf(t) for t in seed_breaks if 0 < t < 1]
    breaks = sorted(set(breaks))
    evals = 0

    def point(t):
        return a + (b - a) * t

    # stack of (t0, t1, coarse_value); coarse None means "not yet computed"
    stack = [(breaks[i], breaks[i + 1], None) for i in range(len(breaks) - 1)]
    stack.reverse()
    accepted = []  # (t0, value, err)
    panels = len(stack)
    while stack:
        t0, t1, coarse = stack.pop()
        if coarse is None:
            coarse = _gl_panel(lambda t: f(point(t)), t0, t1, xs, ws)
            evals += nodes
        tm = (t0 + t1) / 2
        left = _gl_panel(lambda t: f(point(t)), t0, tm, xs, ws)
        right = _gl_panel(lambda t: f(point(t)), tm, t1, xs, ws)
        evals += 2 * nodes
        fine = left + right
        est = to_float(abs(fine - coarse))
        share = tol_t * to_float(t1 - t0)
        if est <= share or panels >= max_panels:
            if est > share:
                raise NonConvergenceError(
                    f"panel budget {max_panels} exhausted, local estimate {est:g}")
            accepted.append((t0, fine, est))
        else:
            panels += 1
            stack.append((tm, t1, right))
            stack.append((t0, tm, left))
    accepted.sort(key=lambda it: it[0])
    scale = b - a
    value = mpmath.mpf(0)
    err = 0.0
    for _, v, e in accepted:
        value += v
        err += e
    return value * scale, err * total_len, evals


def integrate_segment_f64(fbatch: Callable, a: complex, b: complex,
                          abs_tol: float, *, nodes: int = 16,
                          max_panels: int = 200000,
                          seed_breaks: Sequence | None = None):
    """float64 twin of integrate_segment; fbatch maps an array of points
    on the segment to integrand values (complex128)."""
    xs64, ws64 = np.polynomial.legendre.leggauss(nodes)
    a = complex(a)
    b = complex(b)
    if a == b:
        return 0.0 + 0.0j, 0.0, 0
    tol_t = abs_tol / abs(b - a)
    breaks = [0.0, 1.0]
    if seed_breaks:
        breaks += [float(t) for t in seed_breaks if 0 < t < 1]
    breaks = sorted(set(breaks))

    def panel_nodes(t0, t1):
        mid, half = (t0 + t1) / 2, (t1 - t0) / 2
        return mid + half * xs64

    def panel_value(t0, t1, vals):
        return (t1 - t0) / 2 * (ws64 @ vals)

    evals = 0
    stack = [(breaks[i], breaks[i + 1], None) for i in range(len(breaks) - 1)]
    stack.reverse()
    accepted = []
    panels = len(stack)
    while stack:
        t0, t1, coarse = stack.pop()
        tm = (t0 + t1) / 2
        ts = np.concatenate([
            panel_nodes(t0, t1) if coarse is None else np.empty(0),
            panel_nodes(t0, tm), panel_nodes(tm, t1)])
        vals = fbatch(a + (b - a) * ts.astype(np.complex128))
        evals += ts.size
        k = 0
        if coarse is None:
            coarse = panel_value(t0, t1, vals[:nodes])
            k = nodes
        left = panel_value(t0, tm, vals[k:k + nodes])
        right = panel_value(tm, t1, vals[k + nodes:k + 2 * nodes])
        fine = left + right
        est = abs(fine - coarse)
        share = tol_t * (t1 - t0)
        if est <= share or panels >= max_panels:
            if est > share:
                raise NonConvergenceError(
                    f"panel budget {max_panels} exhausted, local estimate {est:g}")
            accepted.append((t0, fine, est))
        else:
            panels += 1
            stack.append((tm, t1, right))
            stack.append((t0, tm, left))
    accepted.sort(key=lambda it: it[0])
    scale = b - a
    value = sum(v for _, v, _ in accepted)
    err = sum(e for _, _, e in accepted)
    return value * scale, err * abs(scale), evals


def cauchy_derivatives(f: Callable, center, radius, orders: Sequence[int],
                       rel_tol: float, *, abs_floor: float = 0.0,
                       m_start: int = 32, m_max: int = 16384):
    """Derivatives of analytic f at center via the circle trapezoid,
    extracting every requested order from one shared set of node values:

        D^j f = j! / (M r^j) * sum_k f(center + r e^{i th_k}) e^{-i j th_k}.

    M doubles (reusing old nodes) until each order's two successive values
    agree within rel_tol (or the absolute floor).  Returns
    ({order: (value mpc, err_estimate float)}, evals)."""
    center = mpmath.mpmathify(center)
    radius = mpmath.mpf(radius)
    if radius <= 0:
        raise ValueError("radius must be positive")
    orders = sorted(set(int(j) for j in orders))
    if any(j < 0 for j in orders):
        raise ValueError("orders must be >= 0")
    jmax = orders[-1]
    m = max(m_start, 1 << int(math.ceil(math.log2(max(4 * (jmax + 1), 8)))))
    two_pi = 2 * mpmath.pi

    def node_val(theta):
        return f(center + radius * mpmath.exp(1j * theta))

    vals = [node_val(two_pi * k / m) for k in range(m)]
    evals = m

    def estimate(vv, mm, order):
        step = mpmath.exp(mpmath.mpc(0, -order * 2) * mpmath.pi / mm)
        w = mpmath.mpc(1)
        acc = mpmath.mpc(0)
        for v in vv:
            acc += v * w
            w *= step
        fact = mpmath.factorial(order)
        return acc * fact / (mm * radius ** order)

    prev = {j: estimate(vals, m, j) for j in orders}
    while m < m_max:
        # interleave new midpoints so old evaluations are reused
        new_vals = [node_val(two_pi * (2 * k + 1) / (2 * m)) for k in range(m)]
        evals += m
        merged = []
        for k in range(m):
            merged.append(vals[k])
            merged.append(new_vals[k])
        m *= 2
        vals = merged
        cur = {j: estimate(vals, m, j) for j in orders}
        diffs = {j: to_float(abs(cur[j] - prev[j])) for j in orders}
        ok = all(
            diffs[j] <= max(rel_tol * to_float(abs(cur[j])), abs_floor)
            for j in orders)
        if ok:
            return {j: (cur[j], diffs[j]) for j in orders}, evals
        prev = cur
    worst = max(diffs.values())
    raise NonConvergenceError(
        f"circle rule: {m_max} nodes reached, last delta {worst:g}")


def cauchy_derivative(f: Callable, center, radius, order: int,
                      rel_tol: float, *, abs_floor: float = 0.0,
                      m_start: int = 32, m_max: int = 16384):
    """Single-order convenience wrapper around cauchy_derivatives.
    Returns (value mpc, err_estimate float, evals int)."""
    out, evals = cauchy_derivatives(f, center, radius, [order], rel_tol,
                                    abs_floor=abs_floor, m_start=m_start,
                                    m_max=m_max)
    val, err = out[order]
    return val, err, evals


def cauchy_many(f: Callable, center, radius, requests, rel_tol: float, *,
                abs_floor: float = 0.0, m_start: int = 32,
                m_max: int = 16384):
    """Derivatives at several interior points from ONE shared circle:

        D^j f(w) = j!/M * sum_k f(z_k) r e^{i th_k} / (z_k - w)^(j+1)

    for every (w, order) in `requests`, with all w well inside
    |z - center| = radius (accuracy degrades as w approaches the
    boundary).  Node count doubles until every request is stable.
    Returns (results, query, evals): results is a list of (value, err)
    aligned with requests, and query(w, order) evaluates further interior
    points against the converged node set."""
    center = mpmath.mpmathify(center)
    radius = mpmath.mpf(radius)
    if radius <= 0:
        raise ValueError("radius must be positive")
    requests = [(mpmath.mpmathify(w), int(j)) for w, j in requests]
    jmax = max((j for _, j in requests), default=0)
    for w, _ in requests:
        if abs(w - center) >= radius * mpmath.mpf("0.9"):
            raise ValueError("request point too close to the circle")
    m = max(m_start, 1 << int(math.ceil(math.log2(max(4 * (jmax + 1), 8)))))
    two_pi = 2 * mpmath.pi

    def nodes_at(mm):
        return [center + radius * mpmath.exp(1j * (two_pi * k / mm))
                for k in range(mm)]

    def estimate(zs, vv, mm, w, order):
        acc = mpmath.mpc(0)
        for z_k, f_k in zip(zs, vv):
            acc += f_k * (z_k - center) / (z_k - w) ** (order + 1)
        return acc * mpmath.factorial(order) / mm

    zs = nodes_at(m)
    vals = [f(z) for z in zs]
    evals = m
    prev = [estimate(zs, vals, m, w, j) for w, j in requests]
    while m < m_max:
        new_zs = [center + radius * mpmath.exp(
            1j * (two_pi * (2 * k + 1) / (2 * m))) for k in range(m)]
        new_vals = [f(z) for z in new_zs]
        evals += m
        mz, mv = [], []
        for k in range(m):
            mz.append(zs[k])
            mv.append(vals[k])
            mz.append(new_zs[k])
            mv.append(new_vals[k])
        m *= 2
        zs, vals = mz, mv
        cur = [estimate(zs, vals, m, w, j) for w, j in requests]
        diffs = [to_float(abs(c - p)) for c, p in zip(cur, prev)]
        ok = all(d <= max(rel_tol * to_float(abs(c)), abs_floor)
                 for d, c in zip(diffs, cur))
        if ok:
            results = [(c, d) for c, d in zip(cur, diffs)]

            def query(w, order):
                return estimate(zs, vals, m, mpmath.mpmathify(w), order)

            return results, query, evals
        prev = cur
    raise NonConvergenceError(
        f"shared circle: {m_max} nodes reached, worst delta {max(diffs):g}")
