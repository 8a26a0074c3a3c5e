"""Bessel functions, sinc and log-factorials used by the beam models.

``bessel_j`` and ``bessel_ive`` are implemented here (series, Miller
backward recurrence and the large-argument Hankel expansion) rather than
delegated; the hot loops live in ``twistlab._kernels``.
"""
import math

import numpy as np

from . import _kernels
from .errors import DomainError, RangeError

# I_n(x) overflows a double shortly after x = 709.78 (I_0(x) ~ e^x / sqrt(2 pi x)).
_I_UNSCALED_MAX = 700.0


def _check_order(n):
    if isinstance(n, (bool, np.bool_)) or int(n) != n:
        raise DomainError(f"Bessel order must be an integer, got {n!r}")
    return int(n)


def _as_array(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _apply(kernel, n, x):
    flat = np.ascontiguousarray(x.reshape(-1))
    return kernel(n, flat).reshape(x.shape)


def bessel_j(n, x):
    """Bessel function of the first kind J_n(x) for integer n and real x.

    Negative orders and arguments use J_{-n} = (-1)^n J_n and
    J_n(-x) = (-1)^n J_n(x). Absolute error is below 1e-13 for |x| <= 1e4.
    """
    n = _check_order(n)
    arr = _as_array(x)
    m = abs(n)
    out = _apply(_kernels.bessel_j_array, m, np.abs(arr))
    sign = np.ones_like(out)
    if m % 2 == 1:
        if n < 0:
            sign = -sign
        sign = np.where(arr < 0, -sign, sign)
    out = out * sign
    return out if out.ndim else float(out)


def bessel_ive(n, x):
    """Exponentially scaled modified Bessel function e^{-x} I_n(x), x >= 0."""
    n = _check_order(n)
    arr = _as_array(x)
    if np.any(arr < 0):
        raise DomainError("bessel_ive needs x >= 0")
    out = _apply(_kernels.bessel_ive_array, abs(n), arr)
    return out if out.ndim else float(out)


def bessel_i(n, x):
    """Modified Bessel function I_n(x) for x >= 0.

    Raises RangeError where the result would overflow; use ``bessel_ive``
    (which returns e^{-x} I_n(x)) for large arguments.
    """
    arr = _as_array(x)
    if np.any(arr > _I_UNSCALED_MAX):
        raise RangeError(
            f"I_n(x) overflows for x > {_I_UNSCALED_MAX:g}; use bessel_ive(n, x) "
            "which returns exp(-x) * I_n(x)")
    scaled = np.asarray(bessel_ive(n, arr))
    out = scaled * np.exp(arr)
    return out if out.ndim else float(out)


def sinc(x):
    """Unnormalised sinc, sin(x)/x with sinc(0) = 1."""
    arr = _as_array(x)
    safe = np.where(arr == 0.0, 1.0, arr)
    out = np.where(arr == 0.0, 1.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


def log_factorial(n):
    """ln(n!) for a non-negative integer n."""
    if isinstance(n, (bool, np.bool_)) or int(n) != n or n < 0:
        raise DomainError(f"log_factorial needs a non-negative integer, got {n!r}")
    return math.lgamma(int(n) + 1.0)
