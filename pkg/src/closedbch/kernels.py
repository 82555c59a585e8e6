"""Scalar kernels of the closed BCH construction.

All functions take and return Python ``complex`` values.  The kernels are
entire or meromorphic; their removable singularities are evaluated by
Maclaurin series or by quadrature of an integral representation, and their
genuine poles raise :class:`~closedbch.errors.PoleError`.

    s(a)          = sinh(a/2) / (a/2)
    s_alpha(a)    = sinh(alpha*a/2) / (a/2)
    f(u, v)       = ((u-v)e^(u+v) - (u e^u - v e^v)) / (u v (e^u - e^v))
    g_alpha(u, v) = 1 + alpha u f(alpha u, v) = e^(alpha u/2) s(v) / s(v - alpha u)
    h_alpha(u, v) = alpha (1 + v f(alpha u, v)) = e^(v/2) s_alpha(u) / s(v - alpha u)
    l_alpha(u, v) = alpha f(alpha u, v)
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np

from .errors import PoleError

SERIES_THRESHOLD = 1e-3
# below this |u - v| the divided difference inside f is integrated instead
DIAGONAL_THRESHOLD = 0.5
POLE_TOL = 1e-12
TWO_PI = 2.0 * math.pi

# Maclaurin coefficients of f(u, v) up to total degree 6, keyed by (deg_u, deg_v)
_F_SERIES = {
    (0, 0): 1 / 2,
    (1, 0): 1 / 12, (0, 1): 1 / 12,
    (1, 1): 1 / 24,
    (3, 0): -1 / 720, (0, 3): -1 / 720,
    (2, 1): 1 / 180, (1, 2): 1 / 180,
    (3, 1): -1 / 1440, (1, 3): -1 / 1440,
    (2, 2): 1 / 360,
    (5, 0): 1 / 30240, (0, 5): 1 / 30240,
    (4, 1): -1 / 5040, (1, 4): -1 / 5040,
    (3, 2): 1 / 3780, (2, 3): 1 / 3780,
    (5, 1): 1 / 60480, (1, 5): 1 / 60480,
    (4, 2): -1 / 10080, (2, 4): -1 / 10080,
    (3, 3): 23 / 120960,
}


def pole_index(x: complex, tol: float = POLE_TOL) -> int:
    """Return k != 0 if ``x`` lies within ``tol`` of 2*pi*i*k, else 0."""
    x = complex(x)
    k = round(x.imag / TWO_PI)
    if k != 0 and abs(x - TWO_PI * k * 1j) <= tol * max(1.0, abs(x)):
        return k
    return 0


def _check_pole(x: complex, what: str) -> None:
    k = pole_index(x)
    if k:
        raise PoleError(f"{what} = {x!r} sits on the pole 2*pi*i*{k}")


def s(a: complex) -> complex:
    """sinh(a/2)/(a/2), equal to 1 at a = 0."""
    a = complex(a)
    if abs(a) < SERIES_THRESHOLD:
        q = a * a / 4.0
        total, term, k = 1.0 + 0j, 1.0 + 0j, 1
        while True:
            term *= q / ((2 * k) * (2 * k + 1))
            if abs(term) < 1e-20:
                break
            total += term
            k += 1
        return total
    return cmath.sinh(a / 2.0) / (a / 2.0)


def s_alpha(alpha: complex, a: complex) -> complex:
    """sinh(alpha a/2)/(a/2); tends to alpha as a -> 0."""
    alpha = complex(alpha)
    return alpha * s(alpha * complex(a))


def _f_series(u: complex, v: complex) -> complex:
    return sum(c * u**i * v**j for (i, j), c in _F_SERIES.items())


@lru_cache(maxsize=None)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    # map [-1, 1] -> [0, 1]
    return 0.5 * (x + 1.0), 0.5 * w


def _diagonal_quadrature(u: complex, v: complex) -> complex | None:
    """int_0^1 t e^((u+v)(1-t)/2) s((u-v) t) dt, or None if too large to integrate."""
    size = abs(u + v) / 2 + abs(u - v) / 2
    if size <= 8:
        n = 32
    elif size <= 24:
        n = 64
    elif size <= 56:
        n = 128
    else:
        return None
    t, w = _gauss_legendre(n)
    d = u - v
    arg = d * t
    # s(d t) for small |d| is 1 + O(d^2 t^2); sinh(x)/x is accurate away from 0
    small = np.abs(arg) < SERIES_THRESHOLD
    safe = np.where(small, 1.0, arg)
    st = np.where(small, 1.0 + arg * arg / 24.0, np.sinh(safe / 2.0) / (safe / 2.0))
    vals = t * np.exp((u + v) * (1.0 - t) / 2.0) * st
    return complex(np.dot(w, vals))


def f_vbv(u: complex, v: complex) -> complex:
    """The symmetric function f(u, v) of the two-element closed BCH formula.

    Raises PoleError when u - v is a nonzero multiple of 2*pi*i.
    """
    u, v = complex(u), complex(v)
    d = u - v
    _check_pole(d, "u - v")
    if abs(u) < SERIES_THRESHOLD and abs(v) < SERIES_THRESHOLD:
        return _f_series(u, v)
    # f = D(u, v) / s(u - v), D(u, v) = (e^(u/2) s(v) - e^(v/2) s(u)) / (u - v)
    if abs(d) < DIAGONAL_THRESHOLD:
        num = _diagonal_quadrature(u, v)
        if num is not None:
            return num / s(d)
    num = (cmath.exp(u / 2) * s(v) - cmath.exp(v / 2) * s(u)) / d
    return num / s(d)


def f_vbv_direct(u: complex, v: complex) -> complex:
    """Literal closed form of f; no special handling of removable points."""
    u, v = complex(u), complex(v)
    eu, ev = cmath.exp(u), cmath.exp(v)
    return ((u - v) * eu * ev - (u * eu - v * ev)) / (u * v * (eu - ev))


def g_kernel(alpha: complex, u: complex, v: complex) -> complex:
    alpha, u, v = complex(alpha), complex(u), complex(v)
    d = v - alpha * u
    _check_pole(d, "v - alpha*u")
    return cmath.exp(alpha * u / 2) * s(v) / s(d)


def h_kernel(alpha: complex, u: complex, v: complex) -> complex:
    alpha, u, v = complex(alpha), complex(u), complex(v)
    d = v - alpha * u
    _check_pole(d, "v - alpha*u")
    return cmath.exp(v / 2) * s_alpha(alpha, u) / s(d)


def l_kernel(alpha: complex, u: complex, v: complex) -> complex:
    alpha, u, v = complex(alpha), complex(u), complex(v)
    _check_pole(v - alpha * u, "v - alpha*u")
    if alpha == 0:
        return 0j
    return alpha * f_vbv(alpha * u, v)


# Second ("f-route") expressions of the three kernels.  Used as independent
# cross-checks of g_kernel/h_kernel/l_kernel.

def g_kernel_f(alpha: complex, u: complex, v: complex) -> complex:
    alpha, u, v = complex(alpha), complex(u), complex(v)
    return 1 + alpha * u * f_vbv(alpha * u, v)


def h_kernel_f(alpha: complex, u: complex, v: complex) -> complex:
    alpha, u, v = complex(alpha), complex(u), complex(v)
    return alpha * (1 + v * f_vbv(alpha * u, v))


def l_kernel_s(alpha: complex, u: complex, v: complex) -> complex:
    """(e^(alpha u/2) s(v)/s(v - alpha u) - 1)/u, without going through f.

    The literal quotient cancels when |alpha u| is small; there the same
    quantity is written as
    alpha (e^(v/2) s(alpha u) - e^(alpha u/2) s(v)) / ((v - alpha u) s(v - alpha u)),
    which only cancels near alpha u = v.  When alpha u and v are both tiny
    the two are 0/0 in floating point and the Maclaurin series is used.
    """
    alpha, u, v = complex(alpha), complex(u), complex(v)
    a = alpha * u
    d = v - a
    _check_pole(d, "v - alpha*u")
    if abs(a) < SERIES_THRESHOLD and abs(v) < SERIES_THRESHOLD:
        return alpha * _f_series(a, v)
    if u != 0 and abs(a) >= abs(d):
        return (g_kernel(alpha, u, v) - 1) / u
    if d == 0:
        return alpha / 2
    return alpha * (cmath.exp(v / 2) * s(a) - cmath.exp(a / 2) * s(v)) / (d * s(d))
