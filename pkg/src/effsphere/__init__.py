"""Exact Mie-series study of a sound-soft sphere and its lossy-medium stand-in.

The package computes, for a plane wave hitting a sphere of radius r1:

* the exact sound-soft solution and the exact solution with a penetrable,
  strongly damped interior (conductivity 1/eps, refraction eta0 + i tau0/eps);
* the far-field gap D(eps) and the H^{1/2} boundary trace norm T(eps)
  between the two, together with the explicit constants that bound both by
  sqrt(eps);
* Dirichlet-to-Neumann symbols on spheres and a battery of executable
  identities (transmission conditions, Wronskian, flux, far-field energy)
  that pin every formula to an independent cross-check.
"""

from .dtn import DtnSymbol, dtn_symbols, radiation_consistency
from .harness import (
    DEFAULT_EPS_GRID,
    IdentityCheck,
    IdentityReport,
    RateFit,
    SweepRecord,
    fit_rate,
    rate_report,
    records_to_csv,
    run_identity_suite,
    sweep,
)
from .mie import (
    Contrast,
    DegenerateModeError,
    ModeCoefficients,
    PhysicalParams,
    effective_medium_coeffs,
    eval_field,
    plane_wave,
    scattered_field_on_sphere,
    soft_sphere_coeffs,
    transmission_residuals,
    truncation_order,
)
from .observables import (
    BoundConstants,
    FarFieldPattern,
    ParameterRegimeError,
    bound_constants,
    far_field,
    far_field_difference,
    far_field_energy,
    far_field_normalization,
    flux_identity,
    trace_norm,
)
from .specfun import (
    LegendreEval,
    SphericalBesselEval,
    SphericalBesselTable,
    legendre,
    spherical_bessel,
)

__version__ = "0.1.0"

__all__ = [
    "BoundConstants",
    "Contrast",
    "DEFAULT_EPS_GRID",
    "DegenerateModeError",
    "DtnSymbol",
    "FarFieldPattern",
    "IdentityCheck",
    "IdentityReport",
    "LegendreEval",
    "ModeCoefficients",
    "ParameterRegimeError",
    "PhysicalParams",
    "RateFit",
    "SphericalBesselEval",
    "SphericalBesselTable",
    "SweepRecord",
    "bound_constants",
    "dtn_symbols",
    "effective_medium_coeffs",
    "eval_field",
    "far_field",
    "far_field_difference",
    "far_field_energy",
    "far_field_normalization",
    "fit_rate",
    "flux_identity",
    "legendre",
    "plane_wave",
    "radiation_consistency",
    "rate_report",
    "records_to_csv",
    "run_identity_suite",
    "scattered_field_on_sphere",
    "soft_sphere_coeffs",
    "spherical_bessel",
    "sweep",
    "trace_norm",
    "transmission_residuals",
    "truncation_order",
]
