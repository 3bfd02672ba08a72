import math

import mpmath
import numpy as np
import pytest

from zetalab.errors import NonConvergenceError
from zetalab.precision import PrecisionContext
from zetalab import quadrature


def test_gl_nodes_integrate_polynomials_exactly():
    with PrecisionContext(128).workprec():
        xs, ws = quadrature.gl_nodes(16)
        assert len(xs) == 16
        # degree-31 polynomial is exact for 16-node Gauss-Legendre
        val = sum(w * x**30 for x, w in zip(xs, ws))
        assert abs(val - mpmath.mpf(2) / 31) < 1e-35
        assert abs(sum(ws) - 2) < 1e-35


def test_integrate_segment_exp():
    with PrecisionContext(128).workprec():
        val, err, evals = quadrature.integrate_segment(
            mpmath.exp, 0, 1, 1e-30)
        assert abs(val - (mpmath.e - 1)) < 1e-30
        assert err < 1e-28


def test_integrate_segment_complex_path():
    # int_a^b z^2 dz = (b^3 - a^3)/3 along the straight segment
    with PrecisionContext(128).workprec():
        a, b = mpmath.mpc(0, -2), mpmath.mpc(1, 3)
        val, err, _ = quadrature.integrate_segment(lambda z: z * z, a, b, 1e-25)
        expect = (b**3 - a**3) / 3
        assert abs(val - expect) < 1e-24


def test_integrate_segment_seed_breaks_and_peak():
    # narrow Lorentzian needs the adaptive splitting
    with PrecisionContext(128).workprec():
        c = mpmath.mpf(1) / 1000
        f = lambda x: c / (x * x + c * c)
        val, err, _ = quadrature.integrate_segment(
            f, -1, 1, 1e-20, seed_breaks=[0.5])
        expect = 2 * mpmath.atan(1 / c)
        assert abs(val - expect) < 1e-18


def test_integrate_segment_f64_matches():
    def fb(z):
        return np.exp(z)

    val, err, _ = quadrature.integrate_segment_f64(fb, 0.0, 1.0, 1e-12)
    assert abs(val - (math.e - 1)) < 1e-12


def test_cauchy_derivatives_of_exp():
    with PrecisionContext(128).workprec():
        out, evals = quadrature.cauchy_derivatives(
            mpmath.exp, 0, 0.7, [0, 1, 2, 5], rel_tol=1e-30)
        for j, (val, err) in out.items():
            assert abs(val - 1) < 1e-28, j


def test_cauchy_derivative_radius_independence():
    with PrecisionContext(128).workprec():
        f = lambda z: mpmath.sin(z) * mpmath.exp(z)
        d1, e1, _ = quadrature.cauchy_derivative(f, 0.3, 0.5, 3, 1e-30)
        d2, e2, _ = quadrature.cauchy_derivative(f, 0.3, 0.25, 3, 1e-30)
        assert abs(d1 - d2) < 1e-25


def test_cauchy_nonconvergence_budget():
    # pole hugging the contour from outside: spectral rate collapses
    with PrecisionContext(128).workprec():
        pole = mpmath.mpf("0.5") * (1 + mpmath.mpf("1e-9"))
        f = lambda z: 1 / (z - pole)
        with pytest.raises(NonConvergenceError):
            quadrature.cauchy_derivative(f, 0, 0.5, 2, 1e-30, m_max=128)
