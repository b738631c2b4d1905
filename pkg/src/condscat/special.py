"""Cylindrical special functions: Bessel J (complex argument), Hankel H^(1).

Thin validated wrappers around scipy.special. Everything downstream
(modal series, layer-potential kernels, imaging kernels) goes through
these entry points so the supported envelope is enforced in one place:
integer orders |p| <= 60, |z| <= 200 for J, real x > 0 for H^(1).
Relative accuracy inside the envelope is ~1e-13 or better; the test
suite checks against an independent power-series oracle.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import numpy as np
import scipy.special as _sp

from .errors import DomainError

MAX_ORDER = 60
MAX_ARG = 200.0


def _check_order(order) -> None:
    arr = np.asarray(order)
    if not np.issubdtype(arr.dtype, np.integer):
        raise DomainError(f"order must be an integer, got {order!r}")
    if np.any(np.abs(arr) > MAX_ORDER):
        raise DomainError(f"|order| <= {MAX_ORDER} required, got {order}")


def bessel_j(order, z):
    """Bessel function of the first kind J_order(z), complex z supported."""
    _check_order(order)
    z = np.asarray(z)
    if np.any(np.abs(z) > MAX_ARG):
        raise DomainError(f"|z| <= {MAX_ARG} required, got max |z| = {np.max(np.abs(z))}")
    out = _sp.jv(order, z)
    if not np.all(np.isfinite(out)):
        raise DomainError(f"bessel_j({order}, {z!r}) did not evaluate to a finite value")
    return out[()] if np.ndim(out) == 0 else out


def bessel_j_prime(order, z):
    """Derivative J'_order(z) via (J_{p-1} - J_{p+1})/2; J'_0 = -J_1."""
    _check_order(order)
    z = np.asarray(z)
    if np.any(np.abs(z) > MAX_ARG):
        raise DomainError(f"|z| <= {MAX_ARG} required, got max |z| = {np.max(np.abs(z))}")
    out = _sp.jvp(order, z, 1)
    if not np.all(np.isfinite(out)):
        raise DomainError(f"bessel_j_prime({order}, {z!r}) did not evaluate to a finite value")
    return out[()] if np.ndim(out) == 0 else out


def bessel_y(order, x):
    """Bessel function of the second kind Y_order(x), real x > 0 only."""
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("bessel_y requires x > 0 (logarithmic singularity at 0)")
    return _sp.yv(order, x)[()] if np.ndim(x) == 0 else _sp.yv(order, x)


def hankel1(order, x):
    """Hankel function of the first kind H^(1)_order(x) = J + iY, real x > 0."""
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("hankel1 requires x > 0 (logarithmic singularity at 0)")
    out = _sp.hankel1(order, x)
    return out[()] if np.ndim(out) == 0 else out


def hankel1_prime(order, x):
    """Derivative of H^(1)_order via (H_{p-1} - H_{p+1})/2."""
    _check_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("hankel1_prime requires x > 0")
    out = _sp.h1vp(order, x, 1)
    return out[()] if np.ndim(out) == 0 else out
