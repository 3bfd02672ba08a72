import math

import mpmath
import numpy as np
import pytest

from zetalab.errors import DomainError
from zetalab.precision import PrecisionContext, cv, to_float
from zetalab.sieve import coeff_table
from zetalab import dirichlet as dl
from zetalab import zetafn


@pytest.fixture(scope="module")
def small_g(table_1e4, gamma1):
    spec = dl.MollifierSpec(V=20, root=1.0)
    return dl.GSpec(mollifier=spec, U=5, v=gamma1, s0=1.5)


def central_diff(fun, s, j, h):
    """j-th central difference at step h (mpf arithmetic)."""
    acc = mpmath.mpf(0)
    for i in range(j + 1):
        w = (-1) ** i * mpmath.binomial(j, i)
        acc += w * fun(s + (mpmath.mpf(j) / 2 - i) * h)
    return acc / h**j


# ----------------------------------------------------------------------
# m_v
# ----------------------------------------------------------------------

def test_m_v_small_values(ctx256, table_1e4):
    with ctx256.workprec():
        assert dl.m_v(7.3, 1, table_1e4, ctx256).re == 1
        v = dl.m_v(1, 3, table_1e4, ctx256)
        assert abs(v.re - mpmath.mpf(1) / 6) < 1e-70
        assert v.im == 0


def test_m_v_tail_toward_inv_zeta(ctx256, table_1e4):
    # sum_{n>V} n^-2 <= 1/V gives the tail oracle at s = 2
    with ctx256.workprec():
        v = dl.m_v(2, 10**4, table_1e4, ctx256)
        assert abs(v.re - 6 / mpmath.pi**2) < 1e-3


def test_m_v_complex_and_derivative(ctx256, table_1e4):
    with ctx256.workprec():
        s = mpmath.mpc(1.1, 7.0)
        v = dl.m_v(s, 500, table_1e4, ctx256)
        brute = sum(int(table_1e4.mu[n]) * mpmath.power(n, -s)
                    for n in range(1, 501) if table_1e4.mu[n])
        assert to_float(abs(v.to_mpc() - brute)) <= max(v.err_bound, 1e-70)
        d = dl.m_v(s, 500, table_1e4, ctx256, order=1)
        h = mpmath.mpf(1) / 10**10
        fd = (dl.m_v(s + h, 500, table_1e4, ctx256).to_mpc()
              - dl.m_v(s - h, 500, table_1e4, ctx256).to_mpc()) / (2 * h)
        assert abs(d.to_mpc() - fd) < 1e-12


def test_m_v_f64_matches(table_1e4):
    arrays = dl.mv_f64_arrays(table_1e4, 1000)
    ctx = PrecisionContext(128)
    with ctx.workprec():
        ref = float(dl.m_v(1.3, 1000, table_1e4, ctx).re)
    assert abs(dl.m_v_f64(1.3, arrays) - ref) < 1e-12


# ----------------------------------------------------------------------
# Poisson weights
# ----------------------------------------------------------------------

def test_p_weight_values(ctx256):
    with ctx256.workprec():
        assert dl.p_weight(0, 0) == 1
        assert dl.p_weight(3, 0) == 0
        expect = mpmath.exp(-2) * 32 / mpmath.mpf(120)
        assert abs(dl.p_weight(5, 2) - expect) < 1e-70
        # negative u keeps the sign of u^j
        assert dl.p_weight(3, -1.5) < 0
        assert dl.p_weight(2, -1.5) > 0


def test_p_weight_sum_to_one(ctx256):
    with ctx256.workprec():
        for u in (0.0, 0.5, 1.0, 5.0, 20.0):
            total = mpmath.mpf(0)
            for j in range(201):
                total += dl.p_weight(j, u)
            assert abs(total - 1) <= 1e-15, u
            assert total <= 1 + 1e-30


def test_p_weight_derivative_recurrence(ctx256):
    # p'_j = p_{j-1} - p_j within 1e-8 at central step 1e-6
    with ctx256.workprec():
        h = mpmath.mpf(1) / 10**6
        for j in (1, 2, 5, 11):
            for u in (-3.0, -0.5, 0.25, 1.0, 4.0, 17.5):
                fd = (dl.p_weight(j, u + h) - dl.p_weight(j, u - h)) / (2 * h)
                exact = dl.p_weight(j - 1, u) - dl.p_weight(j, u)
                assert abs(fd - exact) <= 1e-8, (j, u)


def test_p_weight_f64_matches_mp(ctx256):
    us = np.array([-2.5, -0.1, 0.0, 0.3, 4.0, 30.0])
    with ctx256.workprec():
        for j in (0, 1, 4, 9):
            got = dl.p_weight_f64(j, us)
            for u, g in zip(us, got):
                assert abs(g - float(dl.p_weight(j, u))) < 1e-14


# ----------------------------------------------------------------------
# f_v
# ----------------------------------------------------------------------

def test_f_v_zero_factor(ctx256, table_1e4, gamma1):
    # at a zeta zero the product inherits the zero within the error budget
    spec = dl.MollifierSpec(V=100, root=1.0)
    with ctx256.workprec():
        rho = mpmath.mpc(0.5, gamma1)
        fv = dl.f_v(rho, spec, table_1e4, ctx256)
        zr = zetafn.zeta_em(rho, 0, ctx256)
        mv = dl.m_v(rho + spec.root - 1, 100, table_1e4, ctx256)
        cap = (zr.mag + zr.err_bound) * (mv.mag + mv.err_bound) + fv.err_bound
        assert to_float(abs(fv.to_mpc())) <= cap


def test_f_v_approaches_one(ctx256, table_1e4):
    from zetalab import experiments
    root, _ = experiments.resolve_root(1000, "standard", table_1e4, ctx256, 0.9)
    spec = dl.MollifierSpec(V=1000, root=root)
    deep = PrecisionContext(512)
    with ctx256.workprec():
        fv = dl.f_v(3.0, spec, table_1e4, ctx256)
        assert abs(float(fv.re) - 1.0) < 1e-2
    # doubled-precision product oracle
    with deep.workprec():
        z = zetafn.zeta_em(3, 0, deep).to_mpc()
        arg = mpmath.mpf(3) + mpmath.mpf(root) - 1
        m = dl.m_v(arg, 1000, table_1e4, deep).to_mpc()
        assert to_float(abs(fv.to_mpc() - z * m)) <= fv.err_bound + 1e-50


def test_f_v_removable_singularity(ctx256, table_1e4):
    from zetalab import experiments
    root, _ = experiments.resolve_root(10**4, "standard", table_1e4, ctx256, 0.05)
    spec = dl.MollifierSpec(V=10**4, root=root)
    with ctx256.workprec():
        at1 = dl.f_v(1, spec, table_1e4, ctx256)
        assert to_float(abs(at1.to_mpc())) < 1e3
        eps = mpmath.mpf(1) / 10**6
        up = dl.f_v(1 + eps, spec, table_1e4, ctx256)
        dn = dl.f_v(1 - eps, spec, table_1e4, ctx256)
        for nb in (up, dn):
            assert to_float(abs(nb.to_mpc() - at1.to_mpc())) < 1e-3 * (
                1 + to_float(abs(at1.to_mpc())))


def test_f_v_tilde_decay_trend(ctx256, table_1e4):
    # tilde variant drifts toward 1 as sigma moves right (V large enough
    # that a genuine zero near 1 exists: 1.00204... at V = 1e4)
    from zetalab import experiments
    root, _ = experiments.resolve_root(10**4, "tilde", table_1e4, ctx256, 0.99)
    assert abs(root - 1.0) < 0.05
    spec = dl.MollifierSpec(V=10**4, root=root, variant="tilde")
    with ctx256.workprec():
        first = abs(float(dl.f_v(1.2, spec, table_1e4, ctx256).re) - 1.0)
        last = abs(float(dl.f_v(3.0, spec, table_1e4, ctx256).re) - 1.0)
    assert last < first


# ----------------------------------------------------------------------
# g_uv and its derivatives
# ----------------------------------------------------------------------

def test_g_uv_real_on_real_axis(ctx256, table_1e4, small_g, gamma1):
    with ctx256.workprec():
        g = dl.g_uv(1.7, small_g, table_1e4, ctx256)
        assert g.im == 0
        # manual conjugate-pair evaluation
        f1 = dl.f_v(mpmath.mpc(1.7, gamma1), small_g.mollifier, table_1e4, ctx256)
        f2 = dl.f_v(mpmath.mpc(1.7, -gamma1), small_g.mollifier, table_1e4, ctx256)
        up = mpmath.exp((mpmath.mpf(1.7) - small_g.s0) * mpmath.log(small_g.U))
        manual = up * (f1.to_mpc() + f2.to_mpc()) / 2
        assert abs(manual.imag) <= f1.err_bound + f2.err_bound
        assert to_float(abs(g.re - manual.real)) <= g.err_bound + f1.err_bound + f2.err_bound


def test_g_uv_at_anchor(ctx256, table_1e4, small_g, gamma1):
    # at s0 the U power drops out: g = Re f_v(s0 + iv)
    with ctx256.workprec():
        g = dl.g_uv(small_g.s0, small_g, table_1e4, ctx256)
        f = dl.f_v(mpmath.mpc(small_g.s0, gamma1), small_g.mollifier,
                   table_1e4, ctx256)
        assert to_float(abs(g.re - f.re)) <= g.err_bound + f.err_bound


def test_g_deriv_series_zero_z0(ctx256, table_1e4, small_g):
    ct = coeff_table(20, 0.0, 400, table_1e4)
    with ctx256.workprec():
        for j in (1, 2, 3):
            v = dl.g_deriv_series(j, 2.0, small_g, ct, 0.0, ctx256)
            assert v.to_mpc() == 0


def test_g_deriv_series_domain(ctx256, table_1e4, small_g):
    ct = coeff_table(20, 0.0, 400, table_1e4)
    with pytest.raises(DomainError):
        dl.g_deriv_series(1, 1.02, small_g, ct, 0.1, ctx256)
    with pytest.raises(ValueError):
        bad = coeff_table(30, 0.0, 400, table_1e4)
        dl.g_deriv_series(1, 2.0, small_g, bad, 0.1, ctx256)


def test_g_deriv_cross_methods_small(ctx256, table_1e4, small_g):
    ct = coeff_table(20, 0.0, 40000, table_1e4)
    z0 = 0.3
    with ctx256.workprec():
        for j in (1, 2):
            ser = dl.g_deriv_series(j, 2.0, small_g, ct, z0, ctx256)
            cau = dl.g_deriv_cauchy(j, 2.0, small_g, 0.5, table_1e4, ctx256)
            conv = cau * cv((-mpmath.mpf(z0)) ** j / mpmath.factorial(j))
            diff = to_float(abs(ser.to_mpc() - conv.to_mpc()))
            assert diff <= ser.err_bound + conv.err_bound
            assert diff <= 2e-4 * max(to_float(abs(conv.to_mpc())), 1e-12)


def test_g_deriv_cauchy_j0_and_fd(ctx256, table_1e4, small_g):
    with ctx256.workprec():
        d0 = dl.g_deriv_cauchy(0, 1.8, small_g, 0.5, table_1e4, ctx256)
        g0 = dl.g_uv(1.8, small_g, table_1e4, ctx256)
        assert to_float(abs(d0.to_mpc() - g0.to_mpc())) <= d0.err_bound + g0.err_bound
        d1 = dl.g_deriv_cauchy(1, 1.8, small_g, 0.5, table_1e4, ctx256)
        h = mpmath.mpf(1) / 10**8
        fd = central_diff(
            lambda s: dl.g_uv(s, small_g, table_1e4, ctx256).re, 1.8, 1, h)
        assert to_float(abs(d1.re - fd)) < 1e-6


def test_g_deriv_cauchy_radius_independence(ctx256, table_1e4, small_g):
    with ctx256.workprec():
        a = dl.g_deriv_cauchy(2, 1.8, small_g, 0.5, table_1e4, ctx256)
        b = dl.g_deriv_cauchy(2, 1.8, small_g, 0.25, table_1e4, ctx256)
        assert to_float(abs(a.to_mpc() - b.to_mpc())) <= (
            a.err_bound + b.err_bound + 1e-40)


# ----------------------------------------------------------------------
# Taylor main terms
# ----------------------------------------------------------------------

def test_taylor_main_terms(ctx256):
    with ctx256.workprec():
        p0, r0 = dl.taylor_main_terms(4, 0.0, 100, 0.0)
        assert p0 == 0 and r0 == 0
        # z0 log U = 1 with U = 3, z0 = 1/log 3
        z0 = 1.0 / math.log(3.0)
        p1, r1 = dl.taylor_main_terms(2, z0, 3, 0.0)
        assert abs(p1 + 1) < 1e-12
        assert abs(r1 - 0.5) < 1e-12
        # J = 6, z0 log U = 2: partial = (e^-2 - 1) - tail(j >= 6)
        z0 = 2.0 / math.log(7.0)
        p2, _ = dl.taylor_main_terms(6, z0, 7, 0.0)
        x = -mpmath.mpf(z0) * mpmath.log(7)
        tail = mpmath.exp(x) - 1 - sum(x**j / mpmath.factorial(j)
                                       for j in range(1, 6))
        assert abs(p2 - (mpmath.exp(x) - 1 - tail)) < 1e-30
    with pytest.raises(ValueError):
        dl.taylor_main_terms(1, 0.1, 10, 0.0)
