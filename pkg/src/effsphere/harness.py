"""Sweeps over the contrast parameter, rate fits, and the identity suite.

The harness is the executable restatement of the two sqrt(eps) statements:
the far-field gap D(eps) and the boundary trace norm T(eps) are computed
exactly per eps and compared against C_inf sqrt(eps) and C_v sqrt(eps).
The inequalities are asserted; the empirical convergence exponent is fitted
and reported with its window instead, because the exact per-mode factor
eps / sqrt(a_n^2 eps^2 + b_n^2) scales like eps once eps is well below
b_n / a_n and only like sqrt(eps) near the crossover, so a single exponent
is a property of the chosen grid, not of the problem.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import dtn, observables
from .mie import (
    Contrast,
    PhysicalParams,
    effective_medium_coeffs,
    eval_field,
    soft_sphere_coeffs,
    transmission_residuals,
    truncation_order,
)
from .specfun import spherical_bessel

#: Default contrast grid: 26 log-spaced points, largest first, spanning both
#: the crossover region near eps ~ 0.1 and the linear small-eps regime.
DEFAULT_EPS_GRID = tuple(np.logspace(-1.0, -6.0, 26))

CSV_HEADER = "eps,D,T,bound_D,bound_T,max_trans_resid,flux_resid,n_max"

_INTERIOR_PDE_SEED = 74155
_WRONSKIAN_GRID = (0.1, 50.0, 200)
_WRONSKIAN_N_MAX = 50


@dataclass(frozen=True)
class SweepRecord:
    """One row of the eps sweep with its bounds and attached residuals."""

    eps: float
    D: float
    T: float
    bound_D: float
    bound_T: float
    max_transmission_residual: float
    flux_residual: float
    n_max_used: int
    coeff_gap: float

    def satisfies_bounds(self):
        return self.D <= self.bound_D and self.T <= self.bound_T


@dataclass(frozen=True)
class RateFit:
    """Least-squares slope of log(quantity) against log(eps)."""

    slope: float
    intercept: float
    r_squared: float
    eps_range: tuple
    quantity: str
    n_points: int
    n_excluded: int


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    value: float
    tolerance: float
    passed: bool
    note: str = ""

    def as_dict(self):
        d = {"name": self.name, "value": self.value,
             "tolerance": self.tolerance, "pass": self.passed}
        if self.note:
            d["note"] = self.note
        return d


@dataclass(frozen=True)
class IdentityReport:
    checks: tuple

    @property
    def all_pass(self):
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {"checks": [c.as_dict() for c in self.checks], "all_pass": self.all_pass}

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2) + "\n"


def _format_float(x):
    return f"{x:.16e}"


def records_to_csv(records):
    """Bit-exact CSV for a sweep: pinned header, 17-significant-digit floats."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(",".join([
            _format_float(r.eps), _format_float(r.D), _format_float(r.T),
            _format_float(r.bound_D), _format_float(r.bound_T),
            _format_float(r.max_transmission_residual),
            _format_float(r.flux_residual), str(r.n_max_used),
        ]))
    return "\n".join(lines) + "\n"


def sweep(params: PhysicalParams, eps_grid, n_max=None):
    """One SweepRecord per eps, for a strictly decreasing positive grid.

    Bound constants are computed once (at the largest truncation order used)
    and scaled by sqrt(eps) per record; D, T and the residuals are recomputed
    exactly at every grid point.
    """
    eps_grid = [float(e) for e in eps_grid]
    if not eps_grid:
        raise ValueError("eps grid must contain at least one value")
    if any(e <= 0 for e in eps_grid):
        raise ValueError("eps grid values must be positive")
    if any(b >= a for a, b in zip(eps_grid, eps_grid[1:])):
        raise ValueError("eps grid must be strictly decreasing")

    orders = {
        e: (n_max if n_max is not None
            else truncation_order(params, Contrast.make(e, params)))
        for e in eps_grid
    }
    constants = observables.bound_constants(params, max(orders.values()))

    records = []
    for eps in eps_grid:
        contrast = Contrast.make(eps, params)
        order = orders[eps]
        soft = soft_sphere_coeffs(params, order)
        eff = effective_medium_coeffs(params, contrast, soft.n_max)
        line1, line2 = transmission_residuals(params, contrast, eff)
        quad, mode = observables.flux_identity(params, eff, 2.0 * params.r1)
        records.append(SweepRecord(
            eps=eps,
            D=observables.far_field_difference(params, contrast, soft.n_max),
            T=observables.trace_norm(params, contrast, soft.n_max),
            bound_D=constants.c_inf * math.sqrt(eps),
            bound_T=constants.c_v * math.sqrt(eps),
            max_transmission_residual=float(max(line1.max(), line2.max())),
            flux_residual=abs(quad - mode) / abs(mode),
            n_max_used=soft.n_max,
            coeff_gap=float(np.max(np.abs(eff.a - soft.c))),
        ))
    return records


def fit_rate(records, quantity, eps_range):
    """Fit log(quantity) = slope*log(eps) + intercept over records in range.

    Records with a nonpositive quantity value are excluded (counted in
    ``n_excluded``); fewer than five survivors is an error.
    """
    lo, hi = min(eps_range), max(eps_range)
    getter = {
        "D": lambda r: r.D,
        "T": lambda r: r.T,
        "coeff_gap": lambda r: r.coeff_gap,
    }.get(quantity)
    if getter is None:
        raise ValueError(f"unknown rate quantity {quantity!r}")

    in_range = [r for r in records if lo <= r.eps <= hi]
    survivors = [(r.eps, getter(r)) for r in in_range if getter(r) > 0.0]
    n_excluded = len(in_range) - len(survivors)
    if len(survivors) < 5:
        raise ValueError(
            f"rate fit needs at least 5 positive values in range, "
            f"got {len(survivors)} ({n_excluded} excluded)"
        )
    x = np.log([e for e, _ in survivors])
    y = np.log([v for _, v in survivors])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return RateFit(
        slope=float(slope), intercept=float(intercept), r_squared=r_squared,
        eps_range=(lo, hi), quantity=quantity,
        n_points=len(survivors), n_excluded=n_excluded,
    )


def rate_report(params, records, quantity="D", eps_range=(1e-4, 1e-1)):
    """Fitted convergence exponent with its window and the dominant regime.

    The sqrt(eps) statement is an upper bound whose per-mode form
    eps / sqrt(a^2 eps^2 + b^2) is tight only near eps ~ b/a; well below the
    crossover the exact formulas scale linearly in eps.  The report states
    which regime the fitted slope reflects on the chosen grid.
    """
    fit = fit_rate(records, quantity, eps_range)
    constants = observables.bound_constants(params, 1)
    crossover = float(constants.b_n[0] / constants.a_n[0])
    regime = (
        "exact-formula linear (slope-1) regime"
        if fit.slope >= 0.75
        else "square-root upper-bound (slope-1/2) regime"
    )
    statement = (
        f"{quantity}(eps): fitted slope {fit.slope:.4f} on eps in "
        f"[{fit.eps_range[0]:.3e}, {fit.eps_range[1]:.3e}] "
        f"(r^2 = {fit.r_squared:.6f}); the {regime} dominates on this grid "
        f"(mode-0 crossover near eps ~ {crossover:.3f}; sqrt(eps) remains a "
        f"certified upper bound throughout)."
    )
    return {
        "quantity": quantity,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "window": list(fit.eps_range),
        "n_points": fit.n_points,
        "dominant_regime": regime,
        "crossover_eps_mode0": crossover,
        "statement": statement,
    }


def _wronskian_residual():
    lo, hi, count = _WRONSKIAN_GRID
    worst = 0.0
    for t in np.linspace(lo, hi, count):
        tab = spherical_bessel(_WRONSKIAN_N_MAX, t)
        resid = np.abs(tab.j * tab.dy - tab.dj * tab.y - 1.0 / t**2) * t**2
        worst = max(worst, float(resid.max()))
    return worst


def _derivative_recurrence_residual(sample_args, n_max):
    worst = 0.0
    for z in sample_args:
        tab = spherical_bessel(n_max + 1, z)
        n = np.arange(n_max + 1)
        for vals, derivs in ((tab.j, tab.dj), (tab.h1, tab.dh1)):
            resid = np.abs(derivs[:-1] + vals[1:] - (n / z) * vals[:-1])
            scale = np.maximum(np.abs(vals[:-1]), np.abs(vals[1:]))
            worst = max(worst, float((resid / scale).max()))
    return worst


def _interior_pde_residual(params, contrast, coeffs):
    """Finite-difference check of Delta u + k^2 q0 u = 0 inside the sphere."""
    if contrast.eps == 0.0:
        return 0.0, "interior field vanishes identically at eps = 0"
    rng = np.random.default_rng(_INTERIOR_PDE_SEED)
    h = 1e-4 * params.r1
    k2q0 = params.k**2 * contrast.q0
    worst = 0.0
    for _ in range(20):
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        x = direction * params.r1 * rng.uniform(0.25, 0.85)
        u0 = eval_field(params, contrast, coeffs, x)
        lap = -6.0 * u0
        for axis in range(3):
            step = np.zeros(3)
            step[axis] = h
            lap += eval_field(params, contrast, coeffs, x + step)
            lap += eval_field(params, contrast, coeffs, x - step)
        lap /= h**2
        resid = abs(lap + k2q0 * u0)
        scale = max(abs(k2q0 * u0), abs(lap))
        worst = max(worst, resid / scale)
    return worst, ""


def run_identity_suite(params, contrast, n_max=None, perturb_branch=False):
    """Every named identity with its tolerance and pass flag.

    ``perturb_branch`` re-evaluates the transmission residuals against the
    negated square root of q0 (the t = 1 branch) while keeping the computed
    coefficients, which must make them fail loudly; it guards against any
    inconsistent branch use inside the pipeline.
    """
    if n_max is None:
        n_max = truncation_order(params, contrast)
    soft = soft_sphere_coeffs(params, n_max)
    eff = effective_medium_coeffs(params, contrast, soft.n_max)
    check_contrast = contrast.flipped_branch() if perturb_branch else contrast
    trivial_eps0 = "trivial at eps = 0: B_n = 0" if contrast.eps == 0.0 else ""

    checks = []

    def add(name, value, tolerance, note=""):
        checks.append(IdentityCheck(
            name=name, value=float(value), tolerance=tolerance,
            passed=bool(value <= tolerance), note=note,
        ))

    add("wronskian", _wronskian_residual(), 1e-10)

    t = params.k * params.r1
    z0 = params.k * contrast.sqrt_q0 * params.r1
    add("derivative_recurrence",
        _derivative_recurrence_residual([t, z0, 3.7 + 0.4j], soft.n_max), 1e-10)

    line1, line2 = transmission_residuals(params, check_contrast, eff)
    add("transmission_line1", line1.max(), 1e-10, trivial_eps0)
    add("transmission_line2", line2.max(), 1e-10, trivial_eps0)

    gammas = np.linspace(0.0, math.pi, 16)
    n = np.arange(soft.n_max + 1)
    boundary_scale = 1.0 + float(np.sum((2 * n + 1) * np.abs(soft.c)
                                        * np.abs(spherical_bessel(soft.n_max, t).h1)))
    worst_soft = max(
        abs(eval_field(params, None, soft,
                       params.r1 * _unit_vector(params, g), side="exterior"))
        for g in gammas
    )
    add("soft_boundary_dirichlet", worst_soft / boundary_scale, 1e-9)

    # Continuity residual relative to the trace scale, floored at the unit
    # incident amplitude so the eps = 0 case (both traces vanish) stays sane.
    gap = 0.0
    trace_scale = 1.0
    for g in gammas:
        x = params.r1 * _unit_vector(params, g)
        inner = eval_field(params, contrast, eff, x, side="interior")
        outer = eval_field(params, contrast, eff, x, side="exterior")
        gap = max(gap, abs(inner - outer))
        trace_scale = max(trace_scale, abs(outer))
    add("transmission_continuity", gap / trace_scale, 1e-9, trivial_eps0)

    quad, mode = observables.flux_identity(params, eff, 2.0 * params.r1)
    add("flux_identity", abs(quad - mode) / abs(mode), 1e-9)
    add("flux_nonnegative", max(0.0, -quad) / abs(mode), 1e-12)

    equad, emode = observables.far_field_energy(params, eff)
    add("far_field_energy", abs(equad - emode) / abs(emode), 1e-9)

    add("radiation_consistency",
        dtn.radiation_consistency(eff, params, 2.0 * params.r1), 1e-12)

    constants = observables.bound_constants(params, soft.n_max)
    if contrast.eps > 0.0:
        lhs = contrast.eps / np.sqrt(
            constants.a_n**2 * contrast.eps**2 + constants.b_n**2)
        rhs = math.sqrt(contrast.eps) / np.sqrt(2 * constants.a_n * constants.b_n)
        add("per_mode_sqrt_bound", float(np.max(lhs / rhs - 1.0)), 1e-12)
    else:
        add("per_mode_sqrt_bound", 0.0, 1e-12,
            "trivial at eps = 0: both sides vanish")

    pde_value, pde_note = _interior_pde_residual(params, contrast, eff)
    add("interior_pde", pde_value, 1e-4, pde_note)

    return IdentityReport(checks=tuple(checks))


def _unit_vector(params, gamma):
    """A unit vector at angle gamma from the incidence direction d."""
    d = params.d_vec
    # Any vector orthogonal to d serves as the rotation plane's second axis.
    helper = np.array([1.0, 0.0, 0.0])
    if abs(d[0]) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    perp = np.cross(d, helper)
    perp /= np.linalg.norm(perp)
    return math.cos(gamma) * d + math.sin(gamma) * perp
