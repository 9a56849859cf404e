"""Dirichlet-to-Neumann symbols on a sphere, and the radiating-solution check.

On the sphere |x| = r the exterior DtN maps diagonalize over spherical-
harmonic degree n:

* radiating Helmholtz exterior:  lambda_n  = k h_n'(k r) / h_n(k r);
* decaying harmonic exterior:    lambda0_n = -(n + 1) / r,

the latter from the unique exterior harmonic with |x|^{-1} decay, whose
degree-n component falls off like |x|^{-(n+1)}.  Structural facts used by
the harness: lambda0_n <= -1/r < 0, Im(lambda_n) > 0 (radiating sign, via
the Wronskian of j_n and y_n), and lambda_n - lambda0_n shrinks relative to
lambda0_n as n grows, which is the mode-wise face of the compactness of the
difference operator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .specfun import spherical_bessel


@dataclass(frozen=True)
class DtnSymbol:
    """Diagonal symbols of both exterior maps at one spherical-harmonic degree."""

    n: int
    r: float
    lambda_n: complex
    lambda0_n: float


def dtn_symbols(k, r, n_max):
    """Symbols of the radiating and harmonic DtN maps for n = 0..n_max."""
    if not (k > 0 and r > 0):
        raise ValueError("dtn_symbols needs k > 0 and r > 0")
    tab = spherical_bessel(n_max, k * r)
    lam = k * tab.dh1 / tab.h1
    return [
        DtnSymbol(n=n, r=r, lambda_n=complex(lam[n]), lambda0_n=-(n + 1.0) / r)
        for n in range(n_max + 1)
    ]


def radiation_consistency(coeffs, params, r, symbol_scale=1.0, negligible=1e-280):
    """Max modal residual of du_s/dnu = Lambda u_s on the sphere |x| = r.

    For the series solution this is the identity k h_n' = lambda_n h_n, so
    the residual is zero to rounding; ``symbol_scale`` perturbs the symbol
    to let the harness confirm the check actually bites.  Modes whose
    coefficient is negligible are skipped.
    """
    if not r > params.r1:
        raise ValueError("radiation check needs r > r1")
    ext = coeffs.exterior()
    tab = spherical_bessel(coeffs.n_max, params.k * r)
    lam = params.k * tab.dh1 / tab.h1 * symbol_scale
    keep = np.abs(ext) > negligible
    if not keep.any():
        return 0.0
    num = np.abs(params.k * ext[keep] * tab.dh1[keep] - lam[keep] * ext[keep] * tab.h1[keep])
    den = np.abs(ext[keep] * tab.h1[keep])
    return float(np.max(num / den))
