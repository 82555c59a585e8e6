"""Closed exponent coefficients of exp(X) exp(Y) exp(Z) = exp(AX + BY + CZ + DI).

With exp(Y) = exp(alpha Y) exp(beta Y) the two pairs regroup as

    Xt = log(exp(X) exp(alpha Y)) = g_a X + h_a Y + l_a c I
    Yt = log(exp(beta Y) exp(Z))  = h_b Y + g_b Z + l_b d I

(alpha-kernels at (u, v), beta-kernels at (z, w)).  At a solution alpha,
[Xt, Yt] = ut Xt + vt Yt + ct I and one more two-element composition gives
the result.  Everything is assembled from the kernels, which keeps the
removable 1/u, 1/z structures out of the arithmetic.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraSpec, AlgebraType, TypeTag, classify, complex_to_json, virasoro_spec
from .alpha import AlphaSolution, solve_alpha
from .errors import BCHError, LimitUnstable, PoleError
from .kernels import f_vbv, g_kernel, h_kernel, l_kernel, s

LIMIT_LEVELS = (1e-3, 1e-4, 1e-5)
LIMIT_TOL = 1e-6


@dataclass(frozen=True)
class TildeParams:
    u_tilde: complex
    v_tilde: complex
    c_tilde: complex


@dataclass(frozen=True)
class _Kernels:
    ga: complex
    ha: complex
    la: complex
    gb: complex
    hb: complex
    lb: complex


def _kernels(spec: AlgebraSpec, alpha: complex) -> _Kernels:
    beta = 1 - alpha
    return _Kernels(
        g_kernel(alpha, spec.u, spec.v), h_kernel(alpha, spec.u, spec.v), l_kernel(alpha, spec.u, spec.v),
        g_kernel(beta, spec.z, spec.w), h_kernel(beta, spec.z, spec.w), l_kernel(beta, spec.z, spec.w),
    )


def _tilde(spec: AlgebraSpec, k: _Kernels) -> TildeParams:
    ut = k.hb * spec.u + k.gb * spec.m
    vt = k.ga * spec.p + k.ha * spec.z
    # g - u l = 1 identically, which removes the cancellation in the c and d terms
    ct = ((k.hb - k.gb * k.la * spec.m) * spec.c
          + (k.ha - k.ga * k.lb * spec.p) * spec.d
          + k.ga * k.gb * spec.e)
    return TildeParams(ut, vt, ct)


def tilde_params(spec: AlgebraSpec, alpha: AlphaSolution | complex) -> TildeParams:
    a = alpha.alpha if isinstance(alpha, AlphaSolution) else complex(alpha)
    return _tilde(spec, _kernels(spec, a))


def regrouped_elements(spec: AlgebraSpec, alpha: AlphaSolution | complex) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient vectors of Xt and Yt on (X, Y, Z, I)."""
    a = alpha.alpha if isinstance(alpha, AlphaSolution) else complex(alpha)
    k = _kernels(spec, a)
    xt = np.array([k.ga, k.ha, 0, k.la * spec.c], dtype=complex)
    yt = np.array([0, k.hb, k.gb, k.lb * spec.d], dtype=complex)
    return xt, yt


@dataclass
class ClosedForm:
    A: complex
    B: complex
    C: complex
    D: complex
    alpha: AlphaSolution | None
    tilde: TildeParams | None
    type: AlgebraType | None
    spec: AlgebraSpec | None
    factors: int = 3          # 2 means the coefficients describe exp(X) exp(Z)
    verified: dict = field(default_factory=dict)

    def coefficients(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C, self.D], dtype=complex)

    def to_json(self) -> dict:
        out = {k: complex_to_json(getattr(self, k)) for k in "ABCD"}
        if self.alpha is not None:
            out["alpha"] = complex_to_json(self.alpha.alpha)
            out["alpha_branch"] = str(self.alpha.branch)
            out["admissible"] = self.alpha.admissible
            out["residual"] = self.alpha.residual
        else:
            out["alpha"] = None
            out["residual"] = None
        if self.tilde is not None:
            out["u_tilde"] = complex_to_json(self.tilde.u_tilde)
            out["v_tilde"] = complex_to_json(self.tilde.v_tilde)
            out["c_tilde"] = complex_to_json(self.tilde.c_tilde)
        out["type"] = str(self.type.tag.value) if self.type is not None else None
        out["factors"] = self.factors
        out["verified"] = dict(self.verified)
        return out


def _assemble(spec: AlgebraSpec, sol: AlphaSolution, atype: AlgebraType | None) -> ClosedForm:
    k = _kernels(spec, sol.alpha)
    t = _tilde(spec, k)
    gt = g_kernel(1, t.u_tilde, t.v_tilde)
    ht = h_kernel(1, t.u_tilde, t.v_tilde)
    ft = f_vbv(t.u_tilde, t.v_tilde)
    A = gt * k.ga
    B = gt * k.ha + ht * k.hb
    C = ht * k.gb
    D = gt * k.la * spec.c + ht * k.lb * spec.d + ft * t.c_tilde
    return ClosedForm(A, B, C, D, sol, t, atype, spec)


def compose3(spec: AlgebraSpec, atype: AlgebraType | None = None) -> list[ClosedForm]:
    """One closed form per admissible alpha (T4 and T5 may give two)."""
    if atype is None:
        atype = classify(spec)
    sols = [sol for sol in solve_alpha(spec, atype) if sol.admissible]
    out, last_err = [], None
    for sol in sols:
        try:
            out.append(_assemble(spec, sol, atype))
        except PoleError as exc:
            last_err = exc
    if not out:
        raise last_err if last_err is not None else PoleError("no alpha gives a finite closed form")
    return out


def select_principal(forms: list[ClosedForm], order: int = 12) -> tuple[ClosedForm, list[float]]:
    """The form closest to the series oracle, and all discrepancies."""
    from .oracle import series_coefficients

    errs = []
    for cf in forms:
        ref = series_coefficients(cf.spec, order, factors=cf.factors)
        errs.append(float(np.max(np.abs(cf.coefficients() - ref))))
    return forms[int(np.argmin(errs))], errs


def compose2_vbv(u: complex, v: complex, c: complex) -> tuple[complex, complex, complex]:
    """exp(X) exp(Y) = exp(aX + bY + gI) for [X, Y] = uX + vY + cI."""
    f = f_vbv(u, v)
    return 1 + u * f, 1 + v * f, c * f


def _scaled(spec: AlgebraSpec, lam: float) -> AlgebraSpec:
    """Structure constants after Y -> lam Y."""
    return AlgebraSpec(u=spec.u * lam, v=spec.v, c=spec.c * lam,
                       w=spec.w, z=spec.z * lam, d=spec.d * lam,
                       m=spec.m, n=spec.n / lam, p=spec.p, e=spec.e)


def compose2_limit(spec: AlgebraSpec, levels: tuple[float, ...] = LIMIT_LEVELS) -> ClosedForm:
    """Coefficients of exp(X) exp(Z) as the lam -> 0 limit of exp(X) exp(lam Y) exp(Z).

    B refers to the unscaled Y.  Each level contributes the form closest to
    the previous level (the first is matched against the series oracle), and
    the three levels are Richardson-extrapolated assuming errors of order
    lam and lam^2.
    """
    from .oracle import series_coefficients

    atype = classify(spec)
    ref = series_coefficients(spec, 10, factors=2)
    rows = []
    for lam in levels:
        forms = compose3(_scaled(spec, lam), atype)
        cands = [cf.coefficients() * np.array([1, lam, 1, 1]) for cf in forms]
        target = rows[-1] if rows else ref
        rows.append(min(cands, key=lambda vec: float(np.max(np.abs(vec - target)))))
    h = np.asarray(levels, dtype=float)
    vals = np.array(rows)
    vander = np.vander(h, len(h), increasing=True)
    limit = np.linalg.solve(vander, vals)[0]
    # two-level linear estimates from the coarse and fine pairs must agree
    lin = [(h[i] * vals[i + 1] - h[i + 1] * vals[i]) / (h[i] - h[i + 1]) for i in range(len(h) - 1)]
    spread = float(np.max(np.abs(lin[0] - lin[-1])))
    if spread > LIMIT_TOL * max(1.0, float(np.max(np.abs(limit)))):
        raise LimitUnstable(f"extrapolation levels disagree by {spread:.3e}")
    A, B, C, D = limit
    return ClosedForm(A, B, C, D, None, None, atype, spec, factors=2)


# -- Virasoro ---------------------------------------------------------------

def _log1p(x: complex) -> complex:
    y = 1 + x
    if y == 1:
        return x
    return cmath.log(y) * x / (y - 1)


def _log_divdiff(a: complex, b: complex) -> complex:
    """(Log a - Log b)/(a - b), stable for a close to b."""
    if a == b:
        return 1 / b
    return _log1p((a - b) / b) / (a - b)


@dataclass(frozen=True)
class VirasoroExplicit:
    """Coefficients of the explicit Virasoro formula, on the (X, Y, Z, I) basis."""

    coefficients: np.ndarray
    roots: tuple[complex, complex] | None   # e^{-k lambda_+}, e^{-k lambda_-}
    lambdas: tuple[complex, complex]
    c_k: complex


def virasoro_explicit(k: int, lm: complex, l0: complex, lk: complex, central: complex = 0) -> VirasoroExplicit:
    """Direct evaluation of the Virasoro closed formula.

    For l0 != 0 this uses the two roots r of r^2 - (1 + e^{-k l0} - k^2 lm lk) r + e^{-k l0};
    for l0 = 0 it describes exp(X) exp(Z) with B the coefficient of L_0 itself.
    """
    if k == 0:
        raise ValueError("k must be nonzero")
    lm, l0, lk, central = complex(lm), complex(l0), complex(lk), complex(central)
    lam = lm * lk
    q = k * k * lam
    cfac = central / 12 * (k**4 - k**2)
    if l0 == 0:
        kap = 2 * cmath.asinh(cmath.sqrt(-q) / 2)
        pref = 1 / s(2 * kap)
        c_k = lam * cfac / 2
        coeffs = np.array([pref, pref * q / k, pref, pref * c_k / k], dtype=complex)
        return VirasoroExplicit(coeffs, None, (kap / k, -kap / k), c_k)
    e0 = cmath.exp(-k * l0)
    b = 1 + e0 - q
    sq = cmath.sqrt(b * b - 4 * e0)
    rp, rm = (b + sq) / 2, (b - sq) / 2
    if abs(rp) >= abs(rm):
        rm = e0 / rp
    else:
        rp = e0 / rm
    # lambda_pm = -Log(r_pm)/k; the prefactor (l+ - l-)/(r- - r+) is a log divided difference
    pref = _log_divdiff(rp, rm) / k
    lp, lmn = -cmath.log(rp) / k, -cmath.log(rm) / k

    def phi(x: complex) -> complex:
        # x / (1 - e^{-k x}) without the removable singularity at x = 0
        return cmath.exp(k * x / 2) / (k * s(k * x))

    if abs(lp - lmn) > 1e-6 * max(1.0, abs(lp)):
        dd = (phi(lp) - phi(lmn)) / (lp - lmn)
    else:
        h = 1e-5 * max(1.0, abs(lp))
        mid = (lp + lmn) / 2
        dd = (phi(mid + h) - phi(mid - h)) / (2 * h)
    c_k = lam * dd * cfac
    coeffs = np.array([pref * k, pref * (2 - rp - rm) / l0, pref * k, pref * c_k], dtype=complex)
    return VirasoroExplicit(coeffs, (rp, rm), (lp, lmn), c_k)


def virasoro_compose(k: int, lm: complex, l0: complex, lk: complex, central: complex = 0) -> ClosedForm:
    """exp(lm L_{-k}) exp(l0 L_0) exp(lk L_k) in closed form.

    For l0 != 0 the general construction is run on the Virasoro spec and the
    form closest to the explicit formula is returned; the distance is stored
    under verified["explicit_discrepancy"].  For l0 = 0 the explicit
    two-factor formula is returned, with Y standing for L_0.
    """
    if k == 0:
        raise ValueError("k must be nonzero")
    explicit = virasoro_explicit(k, lm, l0, lk, central)
    # u = z = k l0 != 0 by construction; a relative zero test could misread a tiny l0
    t4 = AlgebraType.of(TypeTag.T4)
    if complex(l0) == 0:
        spec = virasoro_spec(k, lm, 1.0, lk, central)
        A, B, C, D = explicit.coefficients
        return ClosedForm(A, B, C, D, None, None, t4, spec, factors=2,
                          verified={"path": "explicit_two_factor"})
    spec = virasoro_spec(k, lm, l0, lk, central)
    try:
        forms = compose3(spec, t4)
    except BCHError:
        forms = []
    if not forms:
        A, B, C, D = explicit.coefficients
        return ClosedForm(A, B, C, D, None, None, t4, spec,
                          verified={"path": "explicit"})
    dists = [float(np.max(np.abs(cf.coefficients() - explicit.coefficients))) for cf in forms]
    best = forms[int(np.argmin(dists))]
    best.verified["explicit_discrepancy"] = min(dists)
    return best
