"""Series coefficients, transmission conditions, and field evaluation."""

import cmath
import math

import numpy as np
import pytest

from effsphere.mie import (
    Contrast,
    DegenerateModeError,
    PhysicalParams,
    effective_medium_coeffs,
    eval_field,
    plane_wave,
    soft_sphere_coeffs,
    transmission_residuals,
    truncation_order,
)
from effsphere.specfun import legendre, spherical_bessel
from helpers_oracles import azimuthal_sum, collocation_soft_coeffs
from effsphere import observables as obs


class TestDomainTypes:
    def test_params_validate_positivity(self):
        with pytest.raises(ValueError):
            PhysicalParams(k=0.0)
        with pytest.raises(ValueError):
            PhysicalParams(tau0=-1.0)

    def test_params_validate_direction(self):
        with pytest.raises(ValueError):
            PhysicalParams(d=(1.0, 1.0, 1.0))
        v = 1.0 / math.sqrt(3.0)
        p = PhysicalParams(d=(v, v, v))
        assert abs(np.linalg.norm(p.d_vec) - 1.0) <= 1e-14

    @pytest.mark.parametrize("eps", [0.0, 1e-8, 1e-3, 0.5])
    def test_contrast_branch_invariants(self, eps, default_params):
        c = Contrast.make(eps, default_params)
        assert c.q0 == complex(eps * default_params.eta0, default_params.tau0)
        assert abs(c.sqrt_q0**2 - c.q0) <= 1e-14 * abs(c.q0)
        arg = cmath.phase(c.sqrt_q0)
        assert abs(arg - cmath.phase(c.q0) / 2.0) < 1e-15
        assert 0.0 < arg <= math.pi / 2.0

    def test_contrast_rejects_negative_eps(self, default_params):
        with pytest.raises(ValueError):
            Contrast.make(-1e-3, default_params)

    def test_branch_flip_negates_root(self, default_params):
        c = Contrast.make(1e-2, default_params)
        assert c.flipped_branch().sqrt_q0 == -c.sqrt_q0
        assert Contrast.make(1e-2, default_params, branch=1).sqrt_q0 == -c.sqrt_q0

    def test_degenerate_mode_error_carries_context(self):
        err = DegenerateModeError(7, 1e-4)
        assert err.n == 7 and err.eps == 1e-4
        assert "n=7" in str(err)


class TestSoftSphere:
    def test_mode_zero_vanishes_at_j0_zero(self):
        p = PhysicalParams(k=math.pi, r1=1.0)
        coeffs = soft_sphere_coeffs(p, 5)
        assert abs(coeffs.c[0]) < 1e-15

    def test_mode_zero_magnitude_at_unit_argument(self, default_params):
        # |h_0(t)| = 1/t, so |C_0| = |j_0(1)| / |h_0(1)| = sin(1).
        coeffs = soft_sphere_coeffs(default_params, 3)
        assert abs(abs(coeffs.c[0]) - math.sin(1.0)) < 1e-14

    def test_far_field_matches_collocation_oracle(self, default_params):
        n_max = 20
        direct = soft_sphere_coeffs(default_params, n_max)
        colloc = collocation_soft_coeffs(default_params, n_max)
        gammas = np.linspace(0.0, math.pi, 181)
        ff_direct = obs.far_field(default_params, direct, gammas).values
        from effsphere.mie import ModeCoefficients

        ff_colloc = obs.far_field(
            default_params, ModeCoefficients(n_max=n_max, c=colloc), gammas
        ).values
        scale = np.max(np.abs(ff_direct))
        assert np.max(np.abs(ff_direct - ff_colloc)) < 1e-8 * scale

    def test_overflow_truncates_to_last_healthy_mode(self):
        p = PhysicalParams(k=1e-3, r1=1.0)
        coeffs = soft_sphere_coeffs(p, 400)
        assert coeffs.n_max < 400
        assert np.all(np.isfinite(coeffs.c))


class TestEffectiveMedium:
    def test_eps_zero_gives_soft_coefficients_exactly(self, default_params):
        contrast = Contrast.make(0.0, default_params)
        eff = effective_medium_coeffs(default_params, contrast, 20)
        soft = soft_sphere_coeffs(default_params, 20)
        assert np.array_equal(eff.a, soft.c)
        assert np.all(eff.b == 0.0)

    @pytest.mark.parametrize("eps", [1e-1, 1e-3, 1e-6])
    def test_transmission_conditions_hold(self, eps, default_params):
        contrast = Contrast.make(eps, default_params)
        eff = effective_medium_coeffs(default_params, contrast, 25)
        line1, line2 = transmission_residuals(default_params, contrast, eff)
        assert line1.max() < 1e-10
        assert line2.max() < 1e-10

    def test_b_over_eps_consistent(self, default_params):
        contrast = Contrast.make(1e-3, default_params)
        eff = effective_medium_coeffs(default_params, contrast, 10)
        assert np.array_equal(eff.b, 1e-3 * eff.b_over_eps)

    def test_limit_gap_decreases_monotonically(self, default_params):
        soft = soft_sphere_coeffs(default_params, 17)
        gaps = []
        for eps in (1e-2, 1e-4, 1e-6, 1e-8):
            eff = effective_medium_coeffs(
                default_params, Contrast.make(eps, default_params), 17
            )
            gaps.append(float(np.max(np.abs(eff.a - soft.c))))
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-7

    def test_wrong_branch_breaks_transmission_loudly(self, default_params):
        contrast = Contrast.make(1e-3, default_params)
        eff = effective_medium_coeffs(default_params, contrast, 17)
        line1, line2 = transmission_residuals(
            default_params, contrast.flipped_branch(), eff
        )
        assert max(line1.max(), line2.max()) > 1e-2


class TestEvalField:
    def test_soft_total_field_vanishes_on_boundary(self, default_params):
        coeffs = soft_sphere_coeffs(default_params, 17)
        tab = spherical_bessel(17, default_params.k * default_params.r1)
        n = np.arange(18)
        scale = 1.0 + float(np.sum((2 * n + 1) * np.abs(coeffs.c) * np.abs(tab.h1)))
        for gamma in np.linspace(0.0, math.pi, 13):
            x = default_params.r1 * np.array([math.sin(gamma), 0.0, math.cos(gamma)])
            val = eval_field(default_params, None, coeffs, x, side="exterior")
            assert abs(val) < 1e-9 * scale

    def test_transmission_continuity_across_sphere(self, default_params):
        contrast = Contrast.make(1e-2, default_params)
        eff = effective_medium_coeffs(default_params, contrast, 17)
        for gamma in np.linspace(0.0, math.pi, 13):
            x = default_params.r1 * np.array([math.sin(gamma), 0.0, math.cos(gamma)])
            inner = eval_field(default_params, contrast, eff, x, side="interior")
            outer = eval_field(default_params, contrast, eff, x, side="exterior")
            assert abs(inner - outer) < 1e-9 * abs(outer)

    def test_truncation_robustness_at_exterior_point(self, default_params):
        contrast = Contrast.make(1e-2, default_params)
        x = np.array([0.0, 0.0, 2.0])
        n_max = truncation_order(default_params, contrast)
        v1 = eval_field(
            default_params, contrast,
            effective_medium_coeffs(default_params, contrast, n_max), x,
        )
        v2 = eval_field(
            default_params, contrast,
            effective_medium_coeffs(default_params, contrast, 2 * n_max), x,
        )
        assert abs(v1 - v2) < 1e-12 * abs(v2)

    def test_interior_with_soft_coeffs_is_domain_error(self, default_params):
        coeffs = soft_sphere_coeffs(default_params, 10)
        with pytest.raises(ValueError):
            eval_field(default_params, None, coeffs, np.array([0.0, 0.0, 0.5]))

    def test_origin_rejected(self, default_params):
        contrast = Contrast.make(1e-2, default_params)
        eff = effective_medium_coeffs(default_params, contrast, 10)
        with pytest.raises(ValueError):
            eval_field(default_params, contrast, eff, np.zeros(3))

    def test_interior_series_solves_damped_helmholtz(self, default_params):
        # Second-order finite differences of the interior series against
        # Delta u + k^2 q0 u = 0, at fixed pseudo-random interior points.
        contrast = Contrast.make(1e-3, default_params)
        eff = effective_medium_coeffs(default_params, contrast, 17)
        rng = np.random.default_rng(20240811)
        h = 1e-4 * default_params.r1
        k2q0 = default_params.k**2 * contrast.q0
        for _ in range(20):
            direction = rng.normal(size=3)
            direction /= np.linalg.norm(direction)
            x = direction * default_params.r1 * rng.uniform(0.25, 0.85)
            u0 = eval_field(default_params, contrast, eff, x)
            lap = -6.0 * u0
            for axis in range(3):
                step = np.zeros(3)
                step[axis] = h
                lap += eval_field(default_params, contrast, eff, x + step)
                lap += eval_field(default_params, contrast, eff, x - step)
            lap /= h**2
            assert abs(lap + k2q0 * u0) < 1e-4 * max(abs(k2q0 * u0), abs(lap))

    def test_plane_wave_value(self, default_params):
        x = np.array([0.3, -0.2, 1.7])
        assert abs(plane_wave(default_params, x) - cmath.exp(1j * 1.7)) < 1e-15


class TestTruncationOrder:
    def test_base_value_at_unit_size(self, default_params):
        # ceil(1 + 4 + 12) = 17, and the tail rule is already satisfied there.
        assert truncation_order(default_params) == 17

    def test_base_value_at_size_ten(self):
        p = PhysicalParams(k=10.0, r1=1.0)
        assert truncation_order(p) >= 30

    def test_tail_is_negligible(self, default_params):
        contrast = Contrast.make(1e-3, default_params)
        n_max = truncation_order(default_params, contrast)
        soft = soft_sphere_coeffs(default_params, n_max)
        mags = np.abs(soft.c)
        assert np.max(mags[-3:]) < 1e-16 * np.max(mags)

    def test_doubling_order_leaves_far_field_gap_unchanged(self, default_params):
        contrast = Contrast.make(1e-2, default_params)
        n_max = truncation_order(default_params, contrast)
        d1 = obs.far_field_difference(default_params, contrast, n_max)
        d2 = obs.far_field_difference(default_params, contrast, 2 * n_max)
        assert abs(d1 - d2) < 1e-12 * d2

    def test_deterministic(self, default_params):
        contrast = Contrast.make(1e-3, default_params)
        assert truncation_order(default_params, contrast) == truncation_order(
            default_params, contrast
        )


class TestAzimuthalReduction:
    @pytest.mark.parametrize("n", range(6))
    def test_harmonic_sum_reduces_to_legendre(self, n):
        # sum_m conj(Y_n^m(d)) Y_n^m(xhat) = (2n+1)/(4 pi) P_n(xhat.d),
        # checked against the explicit low-order harmonic table.
        d = np.array([0.3, -0.4, math.sqrt(0.75)])
        for xhat in (
            np.array([0.0, 0.0, 1.0]),
            np.array([1.0, 0.0, 0.0]),
            np.array([-0.6, 0.64, math.sqrt(1 - 0.36 - 0.4096)]),
        ):
            lhs = azimuthal_sum(n, d, xhat)
            t = float(np.dot(d, xhat))
            rhs = (2 * n + 1) / (4.0 * math.pi) * legendre(n, t)[n]
            assert abs(lhs - rhs) < 1e-13
            assert abs(lhs.imag) < 1e-13
