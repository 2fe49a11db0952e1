"""Entropy of wavelet coefficient groups and the inverse of the pair entropy curve.

A group of coefficients is scored by the Shannon entropy (natural log) of its
normalized magnitude distribution. For a pair this collapses to a single-knob
curve f(x) = -(x ln x + (1-x) ln(1-x)) over the magnitude share x of the first
coefficient, which is what embedding steers.
"""

import math

import numpy as np
from scipy.special import xlogy

from .exceptions import NoRootError

LN2 = math.log(2.0)

# magnitudes below this are clamped before any ratio is formed; keeps silence
# and denormals from poisoning the arithmetic while staying far below one
# 16-bit quantization step
MAGNITUDE_FLOOR = 1e-12


def wbe_general(coeffs) -> float:
    """Entropy of the normalized magnitude distribution of a coefficient vector."""
    c = np.asarray(coeffs, dtype=np.float64)
    if c.size == 0:
        raise ValueError("empty coefficient vector")
    mags = np.maximum(np.abs(c), MAGNITUDE_FLOOR)
    z = mags / mags.sum()
    return float(-xlogy(z, z).sum())


def wbe_pair(c0, c1):
    """Pair entropy in [0, ln 2]; accepts scalars or broadcasting arrays."""
    m0 = np.maximum(np.abs(np.asarray(c0, dtype=np.float64)), MAGNITUDE_FLOOR)
    m1 = np.maximum(np.abs(np.asarray(c1, dtype=np.float64)), MAGNITUDE_FLOOR)
    z0 = m0 / (m0 + m1)
    z1 = 1.0 - z0
    out = -(xlogy(z0, z0) + xlogy(z1, z1))
    return float(out) if np.ndim(out) == 0 else out


def f_curve(x):
    """Characteristic curve f(x) = -(x ln x + (1-x) ln(1-x)) on [0, 1].

    Extended by its limits f(0) = f(1) = 0; peaks at ln 2 when x = 1/2.
    Scalars in, scalar out; arrays broadcast.
    """
    xv = np.asarray(x, dtype=np.float64)
    if np.any(xv < 0.0) or np.any(xv > 1.0):
        raise ValueError("f_curve argument outside [0, 1]")
    out = -(xlogy(xv, xv) + xlogy(1.0 - xv, 1.0 - xv))
    return float(out) if np.ndim(out) == 0 else out


def solve_f_inverse(target: float, delta: float = 1e-3,
                    f_tol: float = 1e-9, x_tol: float = 1e-12,
                    max_iter: int = 200) -> float:
    """Root of f(x) = target on the increasing branch (0, 1/2].

    Bisection on [delta, 1/2 - delta]. When the initial bracket does not
    straddle the target, the blocking endpoint's margin is halved
    geometrically until it does; targets outside (0, ln 2) have no root on
    the branch and raise NoRootError.
    """
    if not (0.0 < target < LN2):
        raise NoRootError(f"target {target} outside (0, ln 2)")
    if not (0.0 < delta < 0.25):
        raise ValueError(f"delta {delta} outside (0, 0.25)")

    lo_margin = delta
    hi_margin = delta
    for _ in range(1100):
        if f_curve(lo_margin) < target:
            break
        lo_margin *= 0.5
        if lo_margin < 1e-300:
            raise NoRootError(f"cannot bracket target {target} from below")
    else:
        raise NoRootError(f"cannot bracket target {target} from below")
    for _ in range(80):
        if f_curve(0.5 - hi_margin) > target:
            break
        hi_margin *= 0.5
    else:
        raise NoRootError(f"cannot bracket target {target} from above")

    lo, hi = lo_margin, 0.5 - hi_margin
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f_curve(mid)
        if abs(fm - target) <= f_tol or (hi - lo) <= x_tol:
            return mid
        if fm < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gamma_from_x(x: float, mu: float) -> float:
    """Magnitude scale ratio that moves a pair with magnitude ratio mu to share x."""
    if not (0.0 < x < 1.0):
        raise ValueError(f"share {x} outside (0, 1)")
    if mu <= 0.0:
        raise ValueError(f"magnitude ratio {mu} must be positive")
    return mu * x / (1.0 - x)
