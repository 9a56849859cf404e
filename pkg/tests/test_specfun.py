"""Special-function layer: closed forms, oracle comparison, and invariants."""

import cmath

import numpy as np
import pytest

from effsphere.specfun import LegendreEval, legendre, spherical_bessel
from helpers_oracles import legendre_bruteforce, mp_spherical_jyh

# Generic arguments covering real, purely imaginary, small, large, and
# strongly damped/amplified cases within |z| <= 50.
SAMPLE_ARGS = [
    0.1, 1.0, 2.0, 7.3, 50.0,
    1j, 3.7 + 0.4j, -2.5 + 1.2j, 0.3 + 30.0j, 0.5 - 20.0j, 40.0 - 3.0j,
    25.0 + 25.0j, 0.02 + 0.01j,
]


def rel_err(got, want):
    return abs(got - want) / abs(want)


class TestClosedForms:
    @pytest.mark.parametrize("z", [0.7, 1.0, 2.0, 5.0, 1j, 2.0 + 1.0j, 0.4 - 0.8j])
    def test_low_orders_match_closed_forms(self, z):
        z = complex(z)
        tab = spherical_bessel(1, z)
        sin, cos = cmath.sin(z), cmath.cos(z)
        expected = {
            "j0": sin / z,
            "j1": sin / z**2 - cos / z,
            "y0": -cos / z,
            "y1": -cos / z**2 - sin / z,
            "h0": -1j * cmath.exp(1j * z) / z,
            "h1": -cmath.exp(1j * z) * (z + 1j) / z**2,
        }
        got = {
            "j0": tab.j[0], "j1": tab.j[1],
            "y0": tab.y[0], "y1": tab.y[1],
            "h0": tab.h1[0], "h1": tab.h1[1],
        }
        for name, want in expected.items():
            assert rel_err(got[name], want) < 1e-14, name

    @pytest.mark.parametrize("z", [0.7, 2.0, 2.0 + 1.0j])
    def test_low_order_derivatives_match_closed_forms(self, z):
        z = complex(z)
        tab = spherical_bessel(1, z)
        sin, cos = cmath.sin(z), cmath.cos(z)
        j1 = sin / z**2 - cos / z
        j2 = (3.0 / z**3 - 1.0 / z) * sin - 3.0 / z**2 * cos
        y1 = -cos / z**2 - sin / z
        y2 = (-3.0 / z**3 + 1.0 / z) * cos - 3.0 / z**2 * sin
        assert rel_err(tab.dj[0], -j1) < 1e-14
        assert rel_err(tab.dy[0], -y1) < 1e-14
        assert rel_err(tab.dj[1], -j2 + j1 / z) < 1e-14
        assert rel_err(tab.dy[1], -y2 + y1 / z) < 1e-14

    def test_j0_at_one(self):
        assert rel_err(spherical_bessel(0, 1.0).j[0], cmath.sin(1.0)) < 1e-14

    def test_j0_at_i_is_sinh_one(self):
        assert rel_err(spherical_bessel(0, 1j).j[0], cmath.sinh(1.0)) < 1e-14

    def test_h0_at_two_and_h_construction(self):
        tab = spherical_bessel(0, 2.0)
        assert rel_err(tab.h1[0], -1j * cmath.exp(2j) / 2.0) < 1e-14
        assert abs(tab.h1[0] - (tab.j[0] + 1j * tab.y[0])) < 1e-14


class TestOracle:
    def test_order_25_spec_point(self):
        tab = spherical_bessel(25, 3.7 + 0.4j)
        j, y, h = mp_spherical_jyh(25, 3.7 + 0.4j)
        assert rel_err(tab.j[25], j) < 1e-11
        assert rel_err(tab.y[25], y) < 1e-11
        assert rel_err(tab.h1[25], h) < 1e-11

    @pytest.mark.parametrize("z", SAMPLE_ARGS)
    def test_against_mpmath_to_order_50(self, z):
        tab = spherical_bessel(50, z)
        for n in range(51):
            j, y, h = mp_spherical_jyh(n, z)
            assert rel_err(tab.j[n], j) < 1e-11, (n, z, "j")
            assert rel_err(tab.y[n], y) < 1e-11, (n, z, "y")
            assert rel_err(tab.h1[n], h) < 1e-11, (n, z, "h")


class TestInvariants:
    def test_wronskian_on_real_grid(self):
        for t in np.linspace(0.1, 50.0, 200):
            tab = spherical_bessel(50, t)
            resid = np.abs(tab.j * tab.dy - tab.dj * tab.y - 1.0 / t**2) * t**2
            assert resid.max() < 1e-10, t

    @pytest.mark.parametrize("z", SAMPLE_ARGS)
    def test_derivative_recurrence_residual(self, z):
        tab = spherical_bessel(51, z)
        n = np.arange(51)
        for vals, derivs in ((tab.j, tab.dj), (tab.h1, tab.dh1)):
            resid = np.abs(derivs[:-1] + vals[1:] - (n / complex(z)) * vals[:-1])
            scale = np.maximum(np.abs(vals[:-1]), np.abs(vals[1:]))
            assert np.all(resid < 1e-10 * scale), z

    def test_hankel_is_j_plus_iy(self):
        # Rounding scale is the largest component: when h1 is exponentially
        # small against j and y, the sum cannot resolve it below their ulp.
        for z in SAMPLE_ARGS:
            tab = spherical_bessel(30, z)
            gap = np.abs(tab.h1 - (tab.j + 1j * tab.y))
            scale = np.maximum(np.abs(tab.j), np.maximum(np.abs(tab.y), np.abs(tab.h1)))
            assert np.all(gap <= 1e-14 * scale)

    @pytest.mark.parametrize("t", [1.0, 2.0, 5.0])
    def test_large_order_product_asymptotics(self, t):
        # j_n(t) h_n(t) -> 1 / (i t (2n+1)) for large n.
        tab = spherical_bessel(60, t)
        for n in range(40, 61):
            val = tab.j[n] * tab.h1[n] * 1j * t * (2 * n + 1)
            if n == 60:
                assert abs(val - 1.0) < 0.1
        assert abs(tab.j[60] * tab.h1[60] * 1j * t * 121 - 1.0) < 0.1


class TestErrorsAndOverflow:
    def test_zero_argument_rejected(self):
        with pytest.raises(ValueError):
            spherical_bessel(3, 0.0)

    def test_order_cap(self):
        with pytest.raises(ValueError):
            spherical_bessel(501, 1.0)
        with pytest.raises(ValueError):
            spherical_bessel(-1, 1.0)

    def test_overflow_saturates_and_flags(self):
        tab = spherical_bessel(400, 0.05)
        assert tab.overflowed[-1]
        assert not tab.overflowed[0]
        # The regular solution must stay healthy throughout.
        assert np.all(np.isfinite(tab.j))


class TestLegendre:
    def test_at_one(self):
        assert np.allclose(legendre(2, 1.0), [1.0, 1.0, 1.0], rtol=0, atol=0)

    def test_at_zero(self):
        assert np.allclose(legendre(2, 0.0), [1.0, 0.0, -0.5], rtol=0, atol=1e-16)

    def test_against_bruteforce_expansion(self):
        vals = legendre(10, 0.3)
        for n in range(11):
            assert abs(vals[n] - legendre_bruteforce(n, 0.3)) < 1e-13

    def test_bounded_on_interval_and_one_at_right_end(self):
        ts = np.linspace(-1.0, 1.0, 101)
        vals = legendre(40, ts)
        assert np.all(np.abs(vals) <= 1.0 + 1e-12)
        assert np.allclose(vals[:, -1], 1.0, rtol=0, atol=0)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            legendre(3, 1.0000001)
        with pytest.raises(ValueError):
            legendre(3, np.array([0.0, -1.2]))

    def test_vectorized_shape(self):
        out = legendre(5, np.zeros((2, 3)))
        assert out.shape == (6, 2, 3)

    def test_eval_record(self):
        rec = LegendreEval.at(4, 0.25)
        assert rec.n == 4 and rec.t == 0.25
        assert abs(rec.value - legendre_bruteforce(4, 0.25)) < 1e-14
