"""Far-field patterns, boundary trace norm, and the explicit bound constants.

The far-field pattern of an outgoing series sum K_n h_n(k|x|) (reduced
coefficients) follows from h_n(t) -> e^{it}/(i^{n+1} t):

    u_inf(gamma) = -(i/k) sum_n (2n+1) K_n P_n(cos gamma).

Both series conventions in circulation (the 1/i^{n+1} per-mode phase and the
i/k prefactor against j_n/h_n ratios) collapse to this single formula once
the azimuthal sum is reduced, which the test suite pins down.

The headline observables:

* D(eps)  = sup over gamma of |u_eps_inf - u_inf|, the far-field gap between
  the lossy-medium sphere and the sound-soft sphere;
* T(eps)  = H^{1/2} norm of the total boundary trace,
  (sum_n (1+n^2)^{1/2} * 4 pi (2n+1) |B_n j_n(z0)|^2)^{1/2};
* the constants bounding both by sqrt(eps):

      a_n = 1 - k^2 r1^2 eta0 / ((2n+3)(n+1)),
      b_n =     k^2 r1^2 tau0 / ((2n+3)(n+1)),
      C_inf = | sum_n (2n+1)^2 / (k^3 r1^2 h_n h_n' sqrt(2 a_n b_n)) |,
      h_v   = sum_n 4 pi (2n+1) (1+n^2)^{1/2} / (k^4 r1^4 |h_n'|^2 2 a_n b_n),
      C_v   = sqrt(h_v).

  C_inf is printed with the azimuthal sum applied to an m-independent
  summand, which contributes one (2n+1) factor beyond the addition-theorem
  one; whether that factor is intended is undecidable from the derivation,
  so the variant without it is computed as well (``c_inf_no_msum``).  Bound
  assertions use the larger printed variant.

Everything lives on a sphere, so all surface integrals collapse to Gauss-
Legendre quadrature in cos(theta), exact for the polynomial degrees present.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mie import (
    ModeCoefficients,
    PhysicalParams,
    effective_medium_coeffs,
    scattered_field_on_sphere,
    soft_sphere_coeffs,
    truncation_order,
)
from .specfun import legendre, spherical_bessel

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class ParameterRegimeError(ValueError):
    """a_n <= 0 at some mode; the sqrt(eps) bound constants are undefined."""

    def __init__(self, n, a_n):
        self.n = n
        self.a_n = a_n
        super().__init__(
            f"bound constant a_n = {a_n!r} is not positive at n = {n}; "
            "requires k^2 r1^2 eta0 < (2n+3)(n+1) for all modes"
        )


def far_field_normalization(k: float, dim: int = 3) -> complex:
    """Green-representation far-field prefactor psi; dim = 2 stored for reference."""
    if dim == 3:
        return complex(1.0 / (4.0 * math.pi))
    if dim == 2:
        return np.exp(1j * math.pi / 4.0) / math.sqrt(8.0 * math.pi * k)
    raise ValueError(f"dim must be 2 or 3, got {dim}")


@dataclass(frozen=True)
class FarFieldPattern:
    """Sampled far-field pattern u_inf(gamma) and the normalization constant."""

    gammas: np.ndarray
    values: np.ndarray
    psi: complex

    def __iter__(self):
        return iter(zip(self.gammas, self.values))


@dataclass(frozen=True)
class BoundConstants:
    """Per-mode constants a_n, b_n and the aggregated C_inf, C_v, h_v."""

    a_n: np.ndarray
    b_n: np.ndarray
    c_inf: float
    c_inf_no_msum: float
    h_v: float
    c_v: float


def _pattern_values(params, coeff_array, cos_gammas):
    n = np.arange(len(coeff_array))
    pn = legendre(len(coeff_array) - 1, cos_gammas)
    return (-1j / params.k) * ((2 * n + 1) * coeff_array) @ pn


def far_field(params, coeffs: ModeCoefficients, gammas, which="auto") -> FarFieldPattern:
    """Far-field pattern at the requested angles for one problem.

    ``which`` selects "soft" or "effective" when the caller holds combined
    coefficients; "auto" uses whatever family is populated.
    """
    gammas = np.atleast_1d(np.asarray(gammas, dtype=np.float64))
    if which == "auto":
        arr = coeffs.exterior()
    elif which == "soft":
        arr = coeffs.c
    elif which == "effective":
        arr = coeffs.a
    else:
        raise ValueError(f"unknown problem selector {which!r}")
    if arr is None:
        raise ValueError(f"coefficients for the {which!r} problem are not populated")
    values = _pattern_values(params, arr, np.cos(gammas))
    return FarFieldPattern(
        gammas=gammas, values=values, psi=far_field_normalization(params.k)
    )


def _golden_section_max(f, lo, hi, tol):
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    return max(f1, f2)


def far_field_difference(params, contrast, n_max=None, grid_points=2001):
    """Sup-norm far-field gap D(eps) over gamma in [0, pi].

    Evaluates |u_eps_inf - u_inf| on a uniform grid, then refines around the
    discrete argmax by golden-section search to 1e-10 in gamma.  The gap
    pattern uses the coefficient differences A_n - C_n directly, so D(0) is
    exactly zero.
    """
    if n_max is None:
        n_max = truncation_order(params, contrast)
    soft = soft_sphere_coeffs(params, n_max)
    eff = effective_medium_coeffs(params, contrast, soft.n_max)
    delta = eff.a - soft.c

    gammas = np.linspace(0.0, math.pi, grid_points)
    diffs = np.abs(_pattern_values(params, delta, np.cos(gammas)))
    i_star = int(np.argmax(diffs))
    best = float(diffs[i_star])
    if best == 0.0:
        return 0.0

    spacing = math.pi / (grid_points - 1)
    lo = max(0.0, gammas[i_star] - spacing)
    hi = min(math.pi, gammas[i_star] + spacing)

    def gap(g):
        return float(abs(_pattern_values(params, delta, np.cos(np.float64(g)))))

    return max(best, _golden_section_max(gap, lo, hi, 1e-10))


def bound_constants(params: PhysicalParams, n_max: int) -> BoundConstants:
    """Explicit constants of the sqrt(eps) bounds, modes 0..n_max.

    Raises ParameterRegimeError when some a_n fails to be positive (the
    binding case is always n = 0, i.e. k^2 r1^2 eta0 >= 3).
    """
    n = np.arange(n_max + 1)
    t = params.k * params.r1
    denom = (2 * n + 3) * (n + 1)
    a_n = 1.0 - t**2 * params.eta0 / denom
    b_n = t**2 * params.tau0 / denom
    bad = np.flatnonzero(a_n <= 0.0)
    if len(bad):
        raise ParameterRegimeError(int(bad[0]), float(a_n[bad[0]]))

    tab = spherical_bessel(n_max, t)
    w = 1.0 / (params.k**3 * params.r1**2 * tab.h1 * tab.dh1 * np.sqrt(2 * a_n * b_n))
    c_inf = float(abs(np.sum((2 * n + 1) ** 2 * w)))
    c_inf_no_msum = float(abs(np.sum((2 * n + 1) * w)))

    h_v = float(
        np.sum(
            np.sqrt(1.0 + n.astype(np.float64) ** 2)
            * 4.0 * math.pi * (2 * n + 1)
            / (params.k**4 * params.r1**4 * np.abs(tab.dh1) ** 2 * 2 * a_n * b_n)
        )
    )
    return BoundConstants(
        a_n=a_n, b_n=b_n, c_inf=c_inf, c_inf_no_msum=c_inf_no_msum,
        h_v=h_v, c_v=math.sqrt(h_v),
    )


def trace_norm(params, contrast, n_max=None) -> float:
    """H^{1/2} norm T(eps) of the total field trace on the sphere.

    Spectral form over reduced coefficients; the azimuthal sum contributes
    sum_m |Y_n^m(d)|^2 = (2n+1)/(4 pi), leaving 4 pi (2n+1) per mode.
    """
    if n_max is None:
        n_max = truncation_order(params, contrast)
    eff = effective_medium_coeffs(params, contrast, n_max)
    z0 = params.k * contrast.sqrt_q0 * params.r1
    intr = spherical_bessel(eff.n_max, z0)
    n = np.arange(eff.n_max + 1)
    terms = (
        np.sqrt(1.0 + n.astype(np.float64) ** 2)
        * 4.0 * math.pi * (2 * n + 1)
        * np.abs(eff.b * intr.j) ** 2
    )
    return float(math.sqrt(np.sum(terms)))


def _gauss_nodes(n_max):
    return np.polynomial.legendre.leggauss(2 * n_max + 16)


def flux_identity(params, coeffs: ModeCoefficients, r):
    """Radiated-flux identity on |x| = r > r1, quadrature vs mode sum.

    Returns (quadrature value, mode sum) of
    Im oint (du_s/dnu) conj(u_s) ds = (4 pi / k) sum_n (2n+1) |K_n|^2.
    """
    if not r > params.r1:
        raise ValueError("flux sphere must enclose the obstacle, r > r1")
    nodes, weights = _gauss_nodes(coeffs.n_max)
    u_s, du_s = scattered_field_on_sphere(params, coeffs, r, nodes)
    quad = 2.0 * math.pi * r**2 * float(np.imag(np.sum(weights * du_s * np.conj(u_s))))
    n = np.arange(coeffs.n_max + 1)
    mode = 4.0 * math.pi / params.k * float(np.sum((2 * n + 1) * np.abs(coeffs.exterior()) ** 2))
    return quad, mode


def far_field_energy(params, coeffs: ModeCoefficients):
    """Total far-field energy, quadrature vs mode sum.

    Returns (quadrature value, mode sum) of
    oint |u_inf|^2 dS = (4 pi / k^2) sum_n (2n+1) |K_n|^2.
    """
    nodes, weights = _gauss_nodes(coeffs.n_max)
    vals = _pattern_values(params, coeffs.exterior(), nodes)
    quad = 2.0 * math.pi * float(np.sum(weights * np.abs(vals) ** 2))
    n = np.arange(coeffs.n_max + 1)
    mode = 4.0 * math.pi / params.k**2 * float(np.sum((2 * n + 1) * np.abs(coeffs.exterior()) ** 2))
    return quad, mode
