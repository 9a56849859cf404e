"""Spherical Bessel/Hankel functions of complex argument, and Legendre polynomials.

Every field expansion in this package reduces to the functions computed here:
j_n(z), y_n(z), h_n(z) = j_n(z) + i*y_n(z) and their derivatives, evaluated at
real arguments k*r or complex arguments k*sqrt(q0)*r, together with Legendre
polynomials P_n(t) that carry the angular dependence once the azimuthal sum
has been folded away.

Stability dictates the recurrence directions:

* j_n by downward recurrence, seeded well above the requested order and
  normalized against the closed forms j_0(z) = sin(z)/z and
  j_1(z) = sin(z)/z^2 - cos(z)/z.  Upward recurrence is catastrophically
  unstable once n exceeds |z|.
* the Hankel branch by upward recurrence, which is the stable direction for
  the singular solution.  For Im(z) >= 0 the recurrence runs on h_n directly
  (y_n would lose the exponentially small h_n-component of its starting
  values); for Im(z) < 0 it runs on the conjugate branch j_n - i*y_n.
* derivatives from the recurrence P_n'(z) = -P_{n+1}(z) + (n/z) P_n(z),
  exact to rounding for P in {j, y, h}.

For tiny |z| and large n the singular solution overflows; values saturate to
IEEE infinity and the affected orders are flagged instead of raising.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

# Downward recurrence seed grows like (2n-1)!!/|z|^n; rescale before it
# leaves double range.
_RESCALE_THRESHOLD = 1e250
_N_MAX_LIMIT = 500


@dataclass(frozen=True)
class SphericalBesselEval:
    """Values and derivatives of j_n, y_n, h_n at one order and argument."""

    n: int
    z: complex
    j: complex
    y: complex
    h1: complex
    dj: complex
    dy: complex
    dh1: complex
    overflowed: bool = False


class SphericalBesselTable:
    """All orders 0..n_max at a fixed argument, as a sequence of evaluations.

    Attributes j, y, h1, dj, dy, dh1 are complex arrays of length n_max + 1;
    ``overflowed`` is a boolean array marking orders where the singular
    solution (y_n, hence h_n) saturated to infinity.
    """

    def __init__(self, z, j, y, h1, dj, dy, dh1):
        self.z = z
        self.n_max = len(j) - 1
        self.j = j
        self.y = y
        self.h1 = h1
        self.dj = dj
        self.dy = dy
        self.dh1 = dh1
        self.overflowed = ~(np.isfinite(y) & np.isfinite(dy)
                            & np.isfinite(h1) & np.isfinite(dh1))

    def __len__(self):
        return self.n_max + 1

    def __getitem__(self, n):
        if isinstance(n, slice):
            return [self[i] for i in range(*n.indices(len(self)))]
        if n < 0:
            n += len(self)
        if not 0 <= n <= self.n_max:
            raise IndexError(n)
        return SphericalBesselEval(
            n=n, z=self.z,
            j=complex(self.j[n]), y=complex(self.y[n]), h1=complex(self.h1[n]),
            dj=complex(self.dj[n]), dy=complex(self.dy[n]), dh1=complex(self.dh1[n]),
            overflowed=bool(self.overflowed[n]),
        )

    def __iter__(self):
        return (self[n] for n in range(len(self)))


def _bessel_j_downward(n_max, z):
    """Regular solution j_0..j_{n_max} by normalized downward recurrence."""
    n_start = n_max + 15 + int(np.ceil(abs(z)))
    out = np.zeros(n_start + 1, dtype=np.complex128)
    q_hi = 0.0 + 0.0j          # stands in for j_{n_start+1}
    q = 1e-30 + 0.0j           # arbitrary seed at n_start, rescaled away below
    out[n_start] = q
    for n in range(n_start, 0, -1):
        q_hi, q = q, (2 * n + 1) / z * q - q_hi
        out[n - 1] = q
        if abs(q.real) > _RESCALE_THRESHOLD or abs(q.imag) > _RESCALE_THRESHOLD:
            q_hi /= _RESCALE_THRESHOLD
            q /= _RESCALE_THRESHOLD
            out[n - 1 :] /= _RESCALE_THRESHOLD
    j0 = cmath.sin(z) / z
    j1 = cmath.sin(z) / z**2 - cmath.cos(z) / z
    # Normalize by whichever closed form is larger; they cannot both vanish.
    if abs(j0) >= abs(j1):
        scale = j0 / out[0]
    else:
        scale = j1 / out[1]
    return out[: n_max + 1] * scale


def _hankel_upward(n_max, z):
    """Singular-branch values by upward recurrence, saturating on overflow.

    Runs on h_n = j_n + i y_n when Im(z) >= 0 and on j_n - i y_n otherwise,
    so the recurrence always tracks the branch whose starting values carry
    full relative accuracy.  Returns the pair (y, h1).
    """
    e = cmath.exp(1j * z) if z.imag >= 0 else cmath.exp(-1j * z)
    out = np.empty(n_max + 1, dtype=np.complex128)
    if z.imag >= 0:
        out[0] = -1j * e / z
        if n_max >= 1:
            out[1] = -e * (z + 1j) / z**2
    else:
        out[0] = 1j * e / z
        if n_max >= 1:
            out[1] = -e * (z - 1j) / z**2
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, n_max):
            out[n + 1] = (2 * n + 1) / z * out[n] - out[n - 1]
    return out


def spherical_bessel(n_max, z):
    """Evaluate j_n, y_n, h_n and derivatives for n = 0..n_max at complex z.

    Parameters
    ----------
    n_max : int
        Highest order, 0 <= n_max <= 500.
    z : complex
        Argument, z != 0.

    Returns
    -------
    SphericalBesselTable
    """
    if n_max < 0 or n_max > _N_MAX_LIMIT:
        raise ValueError(f"n_max must be in [0, {_N_MAX_LIMIT}], got {n_max}")
    z = complex(z)
    if z == 0:
        raise ValueError("spherical Bessel functions need z != 0")

    # One extra order feeds the derivative recurrence dP_n = -P_{n+1} + (n/z) P_n.
    j_ext = _bessel_j_downward(n_max + 1, z)
    singular = _hankel_upward(n_max + 1, z)
    with np.errstate(over="ignore", invalid="ignore"):
        if z.imag >= 0:
            h1_ext = singular
            y_ext = -1j * (h1_ext - j_ext)
        else:
            y_ext = 1j * (singular - j_ext)
            h1_ext = j_ext + 1j * y_ext

        n = np.arange(n_max + 1)
        dj = -j_ext[1:] + (n / z) * j_ext[:-1]
        dy = -y_ext[1:] + (n / z) * y_ext[:-1]
        dh1 = -h1_ext[1:] + (n / z) * h1_ext[:-1]
    return SphericalBesselTable(z, j_ext[:-1], y_ext[:-1], h1_ext[:-1], dj, dy, dh1)


@dataclass(frozen=True)
class LegendreEval:
    """One Legendre polynomial value P_n(t), t in [-1, 1]."""

    n: int
    t: float
    value: float

    @classmethod
    def at(cls, n, t):
        return cls(n=n, t=float(t), value=float(legendre(n, t)[n]))


def legendre(n_max, t):
    """Legendre polynomials P_0..P_{n_max} at t, scalar or array, |t| <= 1.

    Uses the three-term recurrence (n+1) P_{n+1} = (2n+1) t P_n - n P_{n-1}.
    Returns an array of shape (n_max + 1,) + shape(t).
    """
    if n_max < 0:
        raise ValueError(f"n_max must be nonnegative, got {n_max}")
    t = np.asarray(t, dtype=np.float64)
    if np.any(np.abs(t) > 1.0):
        raise ValueError("Legendre argument must lie in [-1, 1]")
    out = np.empty((n_max + 1,) + t.shape, dtype=np.float64)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = t
    for n in range(1, n_max):
        out[n + 1] = ((2 * n + 1) * t * out[n] - n * out[n - 1]) / (n + 1)
    return out
