import math
import random

import mpmath
import numpy as np
import pytest

from zetalab.errors import DomainError, NearZeroError, PoleError
from zetalab.precision import PrecisionContext, cv, to_float
from zetalab import zetafn


def test_basel_value(ctx128):
    with ctx128.workprec():
        z = zetafn.zeta_em(2, 0, ctx128)
        assert abs(z.to_mpc() - mpmath.pi**2 / 6) < 1e-20
        assert z.err_bound < 1e-20


def test_special_value_at_zero(ctx256):
    with ctx256.workprec():
        z = zetafn.zeta_em(0, 0, ctx256)
        assert z.re == mpmath.mpf(-0.5)
        zd = zetafn.zeta_em(0, 1, ctx256)
        assert abs(zd.re + mpmath.log(2 * mpmath.pi) / 2) < 1e-60


def test_pole_error(ctx256):
    with pytest.raises(PoleError):
        zetafn.zeta_em(1, 0, ctx256)


def test_against_independent_oracle_on_grid(ctx256):
    # mpmath.zeta (Riemann-Siegel / Borwein internals) is the oracle
    pts = [mpmath.mpc(a, b) for a in (-0.5, 0.1, 0.5, 0.75, 1.5, 3.0)
           for b in (0.0, 5.0, 99.7, 1000.0)]
    with ctx256.workprec():
        for order in (0, 1):
            for s in pts:
                mine = zetafn.zeta_em(s, order, ctx256)
                with mpmath.mp.workprec(400):
                    ref = mpmath.zeta(s, derivative=order)
                diff = to_float(abs(mine.to_mpc() - ref))
                assert diff <= mine.err_bound, (s, order, diff, mine.err_bound)
                assert mine.err_bound <= ctx256.target_rel_err * (
                    to_float(abs(ref)) + 1.0), (s, order)


def test_doubling_bits_keeps_digits(ctx128, ctx256):
    for s in (mpmath.mpc(0.3, 30.0), mpmath.mpc(2, 0)):
        lo = zetafn.zeta_em(s, 0, ctx128)
        hi = zetafn.zeta_em(s, 0, ctx256)
        assert to_float(abs(lo.to_mpc() - hi.to_mpc())) <= lo.err_bound


def test_zeta_f64_vectorized(ctx256):
    pts = np.array([2 + 0j, 0.5 + 14.1j, 1.2 + 500j, -0.5 + 8j, 0.75 + 9997.0j])
    for order in (0, 1):
        vals, errs = zetafn.zeta_f64(pts, order)
        for s, v, e in zip(pts, vals, errs):
            with mpmath.mp.workprec(300):
                ref = complex(mpmath.zeta(mpmath.mpc(s), derivative=order))
            assert abs(v - ref) <= e, (s, order)
            assert e < 1e-6


def test_inv_zeta(ctx256):
    with ctx256.workprec():
        v = zetafn.inv_zeta(2, ctx256)
        assert abs(v.to_mpc() - 6 / mpmath.pi**2) < 1e-60
        w = zetafn.inv_zeta(mpmath.mpc(3, 4), ctx256)
        z = zetafn.zeta_em(mpmath.mpc(3, 4), 0, ctx256)
        assert abs(w.to_mpc() * z.to_mpc() - 1) < 1e-60
        # near the pole of zeta, 1/zeta(s) ~ (s-1)/(1 + euler (s-1))
        u = zetafn.inv_zeta(mpmath.mpf("0.99"), ctx256)
        laurent = mpmath.mpf("-0.01") / (1 + mpmath.euler * mpmath.mpf("-0.01"))
        assert abs(u.to_mpc() - laurent) < 1e-4


def test_inv_zeta_near_zero_raises(ctx64):
    # polish gamma_1 far below the 64-bit error bound, then divide
    with mpmath.mp.workprec(400):
        t = mpmath.findroot(lambda tt: mpmath.siegelz(tt), mpmath.mpf("14.1347"))
        s = mpmath.mpc(mpmath.mpf(1) / 2, t)
        with pytest.raises(NearZeroError):
            zetafn.inv_zeta(s, ctx64)


def test_chi_on_critical_line(ctx256):
    with ctx256.workprec():
        c = zetafn.chi_factor(mpmath.mpc(0.5, 20), ctx256)
        assert abs(mpmath.hypot(c.re, c.im) - 1) < 1e-10
        chalf = zetafn.chi_factor(mpmath.mpf(0.5), ctx256)
        assert abs(chalf.to_mpc() - 1) < 1e-60


def test_chi_functional_equation(ctx256):
    with ctx256.workprec():
        s = mpmath.mpc(0.3, 30)
        lhs = zetafn.zeta_em(s, 0, ctx256)
        chi = zetafn.chi_factor(s, ctx256)
        rhs = chi * zetafn.zeta_em(1 - s, 0, ctx256)
        diff = to_float(abs(lhs.to_mpc() - rhs.to_mpc()))
        assert diff <= lhs.err_bound + rhs.err_bound


def test_chi_poles_and_even_limits(ctx256):
    with ctx256.workprec():
        with pytest.raises(PoleError):
            zetafn.chi_factor(3, ctx256)
        # chi(2k) limit values close the functional equation at integers
        c2 = zetafn.chi_factor(2, ctx256)
        assert abs(c2.to_mpc() + 2 * mpmath.pi**2) < 1e-60
        c4 = zetafn.chi_factor(4, ctx256)
        zeta4 = zetafn.zeta_em(4, 0, ctx256).to_mpc()
        zeta_m3 = mpmath.mpf(1) / 120  # zeta(-3)
        assert abs(c4.to_mpc() * zeta_m3 - zeta4) < 1e-60


def test_functional_equation_residual_sample(ctx256):
    rng = random.Random(20260809)
    with ctx256.workprec():
        for _ in range(20):
            sigma = rng.uniform(0.05, 0.95)
            t = rng.uniform(2 * math.pi + 0.1, 100.0)
            s = mpmath.mpc(sigma, t)
            lhs = zetafn.zeta_em(s, 0, ctx256)
            chi = zetafn.chi_factor(s, ctx256)
            rhs = chi * zetafn.zeta_em(1 - s, 0, ctx256)
            diff = to_float(abs(lhs.to_mpc() - rhs.to_mpc()))
            assert diff <= lhs.err_bound + rhs.err_bound, s


def test_afe_agrees_with_em(ctx256):
    with ctx256.workprec():
        for s in (mpmath.mpc(0.5, 100), mpmath.mpc(0.75, 50)):
            a = zetafn.afe_zeta(s, ctx256)
            z = zetafn.zeta_em(s, 0, ctx256)
            assert to_float(abs(a.to_mpc() - z.to_mpc())) <= a.err_bound


def test_afe_at_zero_ordinate(ctx256, gamma1):
    with ctx256.workprec():
        s = mpmath.mpc(0.5, gamma1)
        a = zetafn.afe_zeta(s, ctx256)
        assert to_float(abs(a.to_mpc())) <= a.err_bound


def test_afe_domain(ctx256):
    with pytest.raises(DomainError):
        zetafn.afe_zeta(mpmath.mpc(0.5, 1.0), ctx256)
    with pytest.raises(DomainError):
        zetafn.afe_zeta(mpmath.mpc(1.5, 100.0), ctx256)


def test_zero_free_boundary_values():
    v0 = zetafn.zero_free_boundary(0.0)
    assert v0 == 1.0 - 0.034666 / math.log(705.0 / 47.886)
    assert zetafn.zero_free_boundary(705.0) == v0
    assert zetafn.zero_free_boundary(300.0) == v0  # clamp below 705
    v6 = zetafn.zero_free_boundary(1e6)
    assert v6 == 1.0 - 0.034666 / math.log(1e6 / 47.886)
    # non-decreasing on a grid beyond the clamp
    grid = np.linspace(705.0, 1e6, 500)
    vals = [zetafn.zero_free_boundary(t) for t in grid]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_hardy_z_values(ctx256, gamma1):
    with ctx256.workprec():
        z0 = zetafn.hardy_z(0.0, ctx256)
        ref = zetafn.zeta_em(mpmath.mpf(1) / 2, 0, ctx256)
        assert abs(z0.re - ref.re) < 1e-50
        assert abs(float(z0.re) - (-1.4603545)) < 1e-6
        zg = zetafn.hardy_z(gamma1, ctx256)
        assert to_float(abs(zg.re)) < 1e-8


def test_hardy_sign_matches_afe_route(ctx256):
    with ctx256.workprec():
        t = mpmath.mpf(18)
        z = zetafn.hardy_z(18.0, ctx256)
        lg = mpmath.loggamma(mpmath.mpc(0.25, t / 2))
        theta = lg.imag - t / 2 * mpmath.log(mpmath.pi)
        alt = mpmath.exp(1j * theta) * zetafn.afe_zeta(
            mpmath.mpc(0.5, t), ctx256).to_mpc()
        assert mpmath.sign(z.re) == mpmath.sign(alt.real)


def test_hardy_sign_changes_and_zero_count(ctx128):
    # 6 zeros below 40 (and 13 below 60); every sign-change bracket must
    # yield a located zero, and the counts must agree
    grid = np.arange(10.0, 40.0 + 1e-9, 0.5)
    with ctx128.workprec():
        vals = [float(zetafn.hardy_z(t, ctx128).re) for t in grid]
    brackets = [(grid[i], grid[i + 1]) for i in range(len(grid) - 1)
                if vals[i] * vals[i + 1] < 0]
    assert len(brackets) == 6
    from zetalab import roots
    for lo, hi in brackets:
        res = roots.find_zeta_zero(lo, hi, ctx128)
        assert res.found


def test_second_moment(ctx64, ctx256):
    v = zetafn.second_moment(2.0, 0.0, 1.0, ctx256, rel_tol=1e-12)
    val = float(v.re)
    # coarse Riemann-sum oracle at step 1e-3; it evaluates to 2.1935...,
    # pinning the window (a smooth integrand of size ~ zeta(2)^2)
    ts = np.arange(0.0, 1.0, 1e-3) + 0.5e-3
    zz, _ = zetafn.zeta_f64(2.0 + 1j * ts)
    riemann = float(np.sum(np.abs(zz) ** 2) * 1e-3)
    assert abs(val - riemann) < 1e-3
    assert 1.9 <= val <= 3.2
    assert zetafn.second_moment(2.0, 5.0, 5.0, ctx256).re == 0


def test_second_moment_asymptotic_sanity(ctx64):
    v = zetafn.second_moment(0.75, 0.0, 200.0, ctx64, rel_tol=1e-5)
    with mpmath.mp.workprec(80):
        ratio = float(v.re) / float(mpmath.zeta(1.5) * 200)
    assert 0.5 <= ratio <= 2.0


def test_second_moment_domain(ctx256):
    with pytest.raises(DomainError):
        zetafn.second_moment(0.4, 0, 1, ctx256)
    with pytest.raises(DomainError):
        zetafn.second_moment(2.0, 3.0, 1.0, ctx256)
