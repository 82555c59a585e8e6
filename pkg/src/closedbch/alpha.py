"""Solving for the decomposition parameter alpha.

exp(Y) is split as exp(alpha Y) exp(beta Y), beta = 1 - alpha, and alpha is
fixed so that the two regrouped factors again close under the bracket.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import AlgebraSpec, AlgebraType, TypeTag, classify
from .errors import (
    DegenerateDenominator,
    InadmissibleOnly,
    NoConvergence,
    NoIsolatedRoots,
    PoleError,
    UnsupportedRatio,
    UnsupportedShape,
)
from .kernels import TWO_PI, g_kernel, h_kernel, s

ADMISSIBLE_DISTANCE = 1e-8
ADMISSIBLE_KMAX = 64
RATIO_MAX = 16
NEWTON_MAXITER = 200


class Branch(str, enum.Enum):
    closed_form = "closed_form"
    quadratic_root_plus = "quadratic_root_plus"
    quadratic_root_minus = "quadratic_root_minus"
    factor_xu = "factor_xu"
    factor_xz = "factor_xz"
    polynomial_root = "polynomial_root"
    newton = "newton"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AlphaSolution:
    alpha: complex
    residual: float
    branch: Branch
    admissible: bool
    beta: complex = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", 1 - self.alpha)


def fundamental_residual(spec: AlgebraSpec, alpha: complex) -> complex:
    """Compatibility condition for alpha; vanishes at a valid decomposition.

    h_a(u,v)[h_b(z,w)(u+z) + g_b(z,w)(m-w)] + g_a(u,v)[h_b(z,w)(p-v) - g_b(z,w) n]
    """
    alpha = complex(alpha)
    beta = 1 - alpha
    u, v, w, z = spec.u, spec.v, spec.w, spec.z
    ga, ha = g_kernel(alpha, u, v), h_kernel(alpha, u, v)
    gb, hb = g_kernel(beta, z, w), h_kernel(beta, z, w)
    return ha * (hb * (u + z) + gb * (spec.m - w)) + ga * (hb * (spec.p - v) - gb * spec.n)


def _distance_to_excluded(x: complex) -> float:
    """Distance from x to the nearest 2*pi*i*k with 0 < |k| <= ADMISSIBLE_KMAX."""
    k = round(x.imag / TWO_PI)
    k = max(-ADMISSIBLE_KMAX, min(ADMISSIBLE_KMAX, k))
    candidates = [k] if k != 0 else [1, -1]
    return min(abs(x - TWO_PI * j * 1j) for j in candidates)


def is_admissible(spec: AlgebraSpec, alpha: complex) -> bool:
    alpha = complex(alpha)
    beta = 1 - alpha
    return (_distance_to_excluded(spec.v - alpha * spec.u) > ADMISSIBLE_DISTANCE
            and _distance_to_excluded(spec.w - beta * spec.z) > ADMISSIBLE_DISTANCE)


def make_solution(spec: AlgebraSpec, alpha: complex, branch: Branch) -> AlphaSolution:
    alpha = complex(alpha)
    ok = cmath.isfinite(alpha) and is_admissible(spec, alpha)
    try:
        res = abs(fundamental_residual(spec, alpha)) if cmath.isfinite(alpha) else math.inf
    except (PoleError, OverflowError, ZeroDivisionError):
        res, ok = math.inf, False
    if not math.isfinite(res):
        ok = False
    return AlphaSolution(alpha, res, Branch(branch), ok)


def _ratio(num: complex, den: complex, what: str, scale: float) -> complex:
    if abs(den) <= 1e-13 * scale or den == 0:
        raise DegenerateDenominator(f"alpha formula denominator {what} vanishes")
    return num / den


def t4_roots(spec: AlgebraSpec) -> tuple[complex, complex]:
    """The two values of x^u solving the type-4 quadratic, labelled (+, -)."""
    u, v, w, n = spec.u, spec.v, spec.w, spec.n
    const = cmath.exp(u + v - w)
    # the n-term carries e^((2u+v-w)/2); this is what the general equation reduces
    # to at u = z and it reproduces the Virasoro root formula
    b = (n * u / 2 * s(v) * s(w) * cmath.exp((2 * u + v - w) / 2)
         - cmath.exp(u) - cmath.exp(v) + cmath.exp(u + v) - const)
    sq = cmath.sqrt(b * b - 4 * const)
    plus, minus = (-b + sq) / 2, (-b - sq) / 2
    # recover the smaller root from the product to avoid cancellation
    if abs(plus) >= abs(minus):
        minus = const / plus
    else:
        plus = const / minus
    return plus, minus


def _closed_form_alphas(spec: AlgebraSpec, tag: TypeTag) -> list[tuple[complex, Branch]]:
    u, v, c, w, z, d, m, n, p, e = (spec.u, spec.v, spec.c, spec.w, spec.z,
                                     spec.d, spec.m, spec.n, spec.p, spec.e)
    sc = max(spec.max_modulus(), 1e-300)
    cf = Branch.closed_form
    # each denominator is compared with the size of the terms it is built from
    if tag is TypeTag.T1a:
        t1, t2 = cmath.exp(w / 2) * v * s(v), cmath.exp(v / 2) * w * s(w)
        num = s(v) / 2 * (2 * cmath.exp(w / 2) * v + n * s(w))
        return [(_ratio(num, t1 - t2, "e^(w/2) v s(v) - e^(v/2) w s(w)", abs(t1) + abs(t2)), cf)]
    if tag is TypeTag.T1b:
        _ratio(1, m - w, "m - w", abs(m) + abs(w))
        t1, t2 = cmath.exp(v / 2) * w * s(w), cmath.exp(w / 2) * v * s(v)
        den = (m - w) * (t1 - t2)
        num = s(v) * (cmath.exp(w / 2) * v * (w - m) + n * w * s(w))
        return [(_ratio(num, den, "(m-w)(e^(v/2) w s(w) - e^(w/2) v s(v))",
                        (abs(m) + abs(w)) * (abs(t1) + abs(t2))), cf)]
    if tag is TypeTag.T1c_i:
        _ratio(1, m - w, "m - w", abs(m) + abs(w))
        den = (m - w) * (w - v) * s(w - v)
        num = n * s(v) * w * s(w) - cmath.exp(w / 2) * v * s(v) * (m - w)
        return [(_ratio(num, den, "(m-w)(w-v)", (abs(m) + abs(w)) * (abs(w) + abs(v))), cf)]
    if tag is TypeTag.T1c_ii:
        return [(_ratio(d * n - c * m, m * (d - c), "m(d-c)", abs(m) * (abs(d) + abs(c))), cf)]
    if tag is TypeTag.T1c_iii:
        return [(_ratio(n, m - w, "m - w", abs(m) + abs(w)), cf)]
    if tag is TypeTag.T1c_iv:
        return [(1 - _ratio(n, p - v, "p - v", abs(p) + abs(v)), cf)]
    if tag is TypeTag.T1c_v:
        return [(_ratio(n - p, m - p, "m - p", abs(m) + abs(p)), cf)]
    if tag is TypeTag.T2a:
        return [(-_ratio(p, z, "z", sc), cf)]
    if tag is TypeTag.T2b:
        return [(-_ratio(n, w, "w", sc), cf)]
    if tag is TypeTag.T3a:
        return [(_ratio(m + u, u, "u", sc), cf)]
    if tag is TypeTag.T3b:
        return [(_ratio(v, u, "u", sc), cf)]
    if tag is TypeTag.T4:
        plus, minus = t4_roots(spec)
        return [(cmath.log(plus) / u, Branch.quadratic_root_plus),
                (cmath.log(minus) / u, Branch.quadratic_root_minus)]
    if tag is TypeTag.T5:
        return [(v / u, Branch.factor_xu), (1 - w / z, Branch.factor_xz)]
    raise ValueError(f"unknown type {tag}")  # pragma: no cover


def _residual_vanishes(spec: AlgebraSpec) -> bool:
    sc = spec.max_modulus()
    tol = 1e-13 * max(sc, sc * sc, 1e-300)
    try:
        return all(abs(fundamental_residual(spec, a)) <= tol for a in (0.5, 0.3 + 0.2j, 0.8 - 0.1j))
    except PoleError:
        return False


def solve_alpha(spec: AlgebraSpec, atype: AlgebraType | TypeTag | str | None = None,
                *, require_admissible: bool = True) -> list[AlphaSolution]:
    """All closed-form alpha values for the spec's type, with residuals."""
    if atype is None:
        atype = classify(spec)
    tag = atype.tag if isinstance(atype, AlgebraType) else TypeTag(atype)
    try:
        sols = [make_solution(spec, a, br) for a, br in _closed_form_alphas(spec, tag)]
    except DegenerateDenominator:
        if not _residual_vanishes(spec):
            raise
        # every alpha solves the equation; the midpoint is as good as any
        sols = [make_solution(spec, 0.5, Branch.closed_form)]
    if require_admissible and not any(sol.admissible for sol in sols):
        raise InadmissibleOnly(
            f"{tag}: no admissible alpha among {[sol.alpha for sol in sols]}")
    return sols


@dataclass(frozen=True)
class AlphaEquation:
    """c_uz x^(u+z) + c_u x^u + c_z x^z + c_0 = 0 in x = e^alpha."""

    c_uz: complex
    c_u: complex
    c_z: complex
    c_0: complex
    u: complex
    z: complex
    spec: AlgebraSpec
    magnitude: float = 1.0    # size of the largest term entering the coefficients

    def coefficients(self) -> tuple[complex, complex, complex, complex]:
        return (self.c_uz, self.c_u, self.c_z, self.c_0)

    def __call__(self, alpha: complex) -> complex:
        alpha = complex(alpha)
        return (self.c_uz * cmath.exp(alpha * (self.u + self.z)) + self.c_u * cmath.exp(alpha * self.u)
                + self.c_z * cmath.exp(alpha * self.z) + self.c_0)

    def derivative(self, alpha: complex) -> complex:
        alpha = complex(alpha)
        return (self.c_uz * (self.u + self.z) * cmath.exp(alpha * (self.u + self.z))
                + self.c_u * self.u * cmath.exp(alpha * self.u)
                + self.c_z * self.z * cmath.exp(alpha * self.z))

    def is_degenerate(self) -> bool:
        return max(abs(c) for c in self.coefficients()) <= 1e-14 * self.magnitude


def build_alpha_polynomial(spec: AlgebraSpec, tol: float = 1e-12) -> AlphaEquation:
    """Coefficients of the alpha equation as an exponential polynomial in x = e^alpha."""
    u, v, w, z, m, n, p = spec.u, spec.v, spec.w, spec.z, spec.m, spec.n, spec.p
    sc = spec.max_modulus()
    if abs(u) <= tol * sc or abs(z) <= tol * sc:
        raise UnsupportedShape("the exponential-polynomial form needs u != 0 and z != 0")
    k = (u + z) / (u * z)
    sv, sw = s(v), s(w)
    ev2, ew2 = cmath.exp(v / 2), cmath.exp(w / 2)
    terms_uz = [k * ev2, (p - v) / z * sv]
    terms_u = [n * sv * sw, -k * ev2 * ew2, -(m - w) / u * sw * ev2, -(p - v) / z * sv * ew2]
    terms_0 = [k * ev2 * ew2, (m - w) / u * sw * ev2]
    c_uz = cmath.exp((w - 2 * z) / 2) * sum(terms_uz)
    c_u = sum(terms_u)
    c_z = -k * cmath.exp((v + w - 2 * z) / 2)
    c_0 = sum(terms_0)
    mag = max(abs(t) for t in terms_uz + terms_u + terms_0 + [c_z])
    return AlphaEquation(c_uz, c_u, c_z, c_0, u, z, spec, mag)


def rational_ratio(u: complex, z: complex, max_den: int = RATIO_MAX, tol: float = 1e-12):
    """Return (P, Q) with u/z = P/Q, |P|, |Q| <= max_den, or None."""
    r = complex(u) / complex(z)
    if abs(r.imag) > tol * abs(r):
        return None
    frac = Fraction(r.real).limit_denominator(max_den)
    if frac == 0 or abs(frac.numerator) > max_den:
        return None
    if abs(float(frac) - r.real) > tol * abs(r):
        return None
    return frac.numerator, frac.denominator


def _newton(eq: AlphaEquation, seed: complex) -> complex:
    spec = eq.spec

    def resid(a):
        return fundamental_residual(spec, a)

    alpha = complex(seed)
    r = resid(alpha)
    for _ in range(NEWTON_MAXITER):
        if abs(r) < 1e-12:
            return alpha
        h = 1e-6 * max(1.0, abs(alpha))
        deriv = (resid(alpha + h) - resid(alpha - h)) / (2 * h)
        if deriv == 0:
            break
        step = -r / deriv
        for _ in range(20):
            try:
                r_new = resid(alpha + step)
            except PoleError:
                r_new = complex(math.inf)
            if abs(r_new) < abs(r):
                break
            step /= 2
        alpha += step
        r = r_new
        if abs(step) < 1e-15 * max(1.0, abs(alpha)):
            if abs(r) < 1e-10:
                return alpha
            break
    raise NoConvergence(f"Newton iteration stalled at alpha={alpha!r}, |residual|={abs(r):.3e}")


def solve_alpha_generic(eq: AlphaEquation, seed: complex | None = None) -> list[AlphaSolution]:
    """Roots of the exponential polynomial.

    For rational u/z = P/Q the substitution y = e^(alpha u / P) turns the
    equation into a polynomial in y, solved through companion-matrix
    eigenvalues.  Otherwise a seed is refined by damped Newton iteration.
    """
    if eq.is_degenerate():
        raise NoIsolatedRoots("the alpha equation vanishes identically")
    ratio = rational_ratio(eq.u, eq.z)
    if ratio is None:
        if seed is None:
            raise UnsupportedRatio(f"u/z = {eq.u / eq.z!r} is not a small rational; pass a seed")
        return [make_solution(eq.spec, _newton(eq, seed), Branch.newton)]
    P, Q = ratio
    t = eq.u / P
    coeffs: dict[int, complex] = {}
    for k, c in ((P + Q, eq.c_uz), (P, eq.c_u), (Q, eq.c_z), (0, eq.c_0)):
        coeffs[k] = coeffs.get(k, 0j) + c
    lo = min(coeffs)
    deg = max(coeffs) - lo
    poly = np.zeros(deg + 1, dtype=complex)      # highest power first
    for k, c in coeffs.items():
        poly[deg - (k - lo)] += c
    nz = np.flatnonzero(np.abs(poly) > 1e-14 * eq.magnitude)
    if len(nz) < 2:
        raise NoIsolatedRoots("polynomial in y has no nonzero roots")
    poly = poly[nz[0]:nz[-1] + 1]
    roots = np.roots(poly)
    sols = []
    for y in roots:
        y = complex(y)
        if y == 0:
            continue
        sols.append(make_solution(eq.spec, cmath.log(y) / t, Branch.polynomial_root))
    return sols
