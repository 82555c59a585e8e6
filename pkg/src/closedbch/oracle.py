"""Independent ground truth for the closed formulas.

Two engines:

* a truncated BCH series evaluated inside the 4-dimensional algebra defined
  by the structure constants (no representation needed), and
* dense matrix exponentials/logarithms in explicit matrix representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import TYPE_CHECKING, Sequence

import numpy as np
import scipy.linalg
import scipy.special

from .algebra import AlgebraSpec, virasoro_spec
from .errors import NotNearIdentity, OrderOutOfRange, RepSpecMismatch

if TYPE_CHECKING:  # pragma: no cover
    from .closed_form import ClosedForm

BASIS = ("X", "Y", "Z", "I")
X, Y, Z, I = np.eye(4, dtype=complex)
MAX_ORDER = 20


def element(x=0, y=0, z=0, i=0) -> np.ndarray:
    """Coefficient vector on the ordered basis (X, Y, Z, I)."""
    return np.array([x, y, z, i], dtype=complex)


@dataclass(frozen=True)
class StructureAlgebra:
    """Bracket table on (X, Y, Z, I); table[i, j] = [e_i, e_j]."""

    table: np.ndarray
    spec: AlgebraSpec | None = None

    @classmethod
    def from_spec(cls, spec: AlgebraSpec) -> "StructureAlgebra":
        t = np.zeros((4, 4, 4), dtype=complex)
        t[0, 1] = (spec.u, spec.v, 0, spec.c)
        t[1, 2] = (0, spec.w, spec.z, spec.d)
        t[0, 2] = (spec.m, spec.n, spec.p, spec.e)
        for i in range(4):
            for j in range(i):
                t[i, j] = -t[j, i]
        return cls(t, spec)

    def ad(self, a: np.ndarray) -> np.ndarray:
        """Matrix of b -> [a, b] acting on coefficient vectors."""
        return np.einsum("i,ijk->kj", a, self.table)

    @property
    def pair_table(self) -> np.ndarray:
        return self.table[_PAIRS_I, _PAIRS_J]

    def jacobi_defect(self) -> float:
        worst = 0.0
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    ei, ej, ek = np.eye(4, dtype=complex)[[i, j, k]]
                    jac = (bracket(self, ei, bracket(self, ej, ek))
                           + bracket(self, ej, bracket(self, ek, ei))
                           + bracket(self, ek, bracket(self, ei, ej)))
                    worst = max(worst, float(np.max(np.abs(jac))))
        return worst


_PAIRS_I, _PAIRS_J = np.triu_indices(4, 1)


def bracket(alg: StructureAlgebra, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Bilinear bracket; written over i < j so that [a, a] is exactly zero."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    wedge = a[_PAIRS_I] * b[_PAIRS_J] - a[_PAIRS_J] * b[_PAIRS_I]
    return wedge @ alg.pair_table


@lru_cache(maxsize=None)
def _bernoulli_even(order: int) -> tuple[float, ...]:
    """B_{2p}/(2p)! for p = 0 .. order//2."""
    b = scipy.special.bernoulli(order + 1)
    return tuple(b[2 * p] / scipy.special.factorial(2 * p, exact=True)
                 for p in range(order // 2 + 1))


def bch_terms(alg: StructureAlgebra, a: np.ndarray, b: np.ndarray, order: int) -> list[np.ndarray]:
    """Homogeneous components Z_1 .. Z_order of log(exp(a) exp(b)).

    Varadarajan's recursion:
        (n+1) Z_{n+1} = 1/2 [a - b, Z_n]
                        + sum_p B_2p/(2p)! sum_{k_1+..+k_2p = n} [Z_k1, [.., [Z_k2p, a + b]..]]
    """
    if not 1 <= order <= MAX_ORDER:
        raise OrderOutOfRange(f"order must lie in [1, {MAX_ORDER}], got {order}")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    coef = _bernoulli_even(order)
    zs = [None, a + b]
    # nested[q][j]: sum over compositions of j into q positive parts of
    # ad_{Z_k1} ... ad_{Z_kq} (a + b)
    nested = [[a + b] + [np.zeros(4, complex)] * order]
    diff = a - b
    for n in range(1, order):
        for q in range(1, n + 1):
            if len(nested) <= q:
                nested.append([np.zeros(4, complex)] * (order + 1))
            acc = np.zeros(4, complex)
            for k in range(1, n - q + 2):
                acc = acc + bracket(alg, zs[k], nested[q - 1][n - k])
            nested[q][n] = acc
        nxt = 0.5 * bracket(alg, diff, zs[n])
        for p in range(1, n // 2 + 1):
            nxt = nxt + coef[p] * nested[2 * p][n]
        nxt = nxt / (n + 1)
        zs.append(nxt)
    return zs[1:]


def bch_series(alg: StructureAlgebra, a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    """log(exp(a) exp(b)) truncated at total degree ``order``."""
    return np.sum(bch_terms(alg, a, b, order), axis=0)


def triple_product_series(alg: StructureAlgebra, order: int,
                          x: np.ndarray = X, y: np.ndarray = Y, z: np.ndarray = Z) -> np.ndarray:
    """Coefficients (A, B, C, D) of log(exp(x) exp(y) exp(z)) from the series."""
    return bch_series(alg, bch_series(alg, x, y, order), z, order)


def series_coefficients(spec: AlgebraSpec, order: int = 12, factors: int = 3) -> np.ndarray:
    alg = StructureAlgebra.from_spec(spec)
    if factors == 2:
        return bch_series(alg, X, Z, order)
    return triple_product_series(alg, order)


# -- matrices ---------------------------------------------------------------

def matrix_exp(m: np.ndarray) -> np.ndarray:
    return scipy.linalg.expm(np.asarray(m, dtype=complex))


def matrix_log_near_identity(m: np.ndarray) -> np.ndarray:
    """Principal logarithm by inverse scaling and squaring.

    Square roots are taken until ||M - 1|| < 0.25, then the series
    log M = 2 atanh(T), T = (M - 1)(M + 1)^-1, is summed.
    """
    m = np.asarray(m, dtype=complex)
    eye = np.eye(len(m), dtype=complex)
    ev = np.linalg.eigvals(m)
    scale = max(1.0, float(np.max(np.abs(ev))))
    for lam in ev:
        if abs(lam) < 1e-14 * scale or (lam.real < 0 and abs(lam.imag) <= 1e-12 * abs(lam)):
            raise NotNearIdentity(f"eigenvalue {lam!r} has no principal logarithm")
    k = 0
    while np.linalg.norm(m - eye, 2) >= 0.25:
        if k >= 60:
            raise NotNearIdentity("inverse scaling did not approach the identity")
        m = scipy.linalg.sqrtm(m)
        k += 1
    t = np.linalg.solve((m + eye).T, (m - eye).T).T
    t2 = t @ t
    term = t.copy()
    out = np.zeros_like(t)
    for j in range(200):
        contrib = term / (2 * j + 1)
        out += contrib
        if np.linalg.norm(contrib) < 1e-18 * max(1.0, np.linalg.norm(out)):
            break
        term = term @ t2
    return 2.0 ** (k + 1) * out


@dataclass
class MatrixRep:
    """Matrix images of X, Y, Z, I realising ``spec``."""

    name: str
    images: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    spec: AlgebraSpec
    note: str = ""
    dim: int = field(init=False)

    def __post_init__(self):
        self.images = tuple(np.asarray(a, dtype=complex) for a in self.images)
        self.dim = self.images[0].shape[0]

    @property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(np.array([a.ravel() for a in self.images])))

    def image(self, coeffs: Sequence[complex]) -> np.ndarray:
        return sum(c * a for c, a in zip(coeffs, self.images))

    def commutator_defect(self, spec: AlgebraSpec | None = None) -> float:
        spec = self.spec if spec is None else spec
        rx, ry, rz, ri = self.images
        comm = lambda a, b: a @ b - b @ a  # noqa: E731
        checks = [
            comm(rx, ry) - (spec.u * rx + spec.v * ry + spec.c * ri),
            comm(ry, rz) - (spec.w * ry + spec.z * rz + spec.d * ri),
            comm(rx, rz) - (spec.m * rx + spec.n * ry + spec.p * rz + spec.e * ri),
            comm(rx, ri), comm(ry, ri), comm(rz, ri),
        ]
        return max(float(np.max(np.abs(c))) for c in checks)

    def extract_coefficients(self, m: np.ndarray) -> np.ndarray:
        """Least-squares coefficients of log(m) on the images (requires rank 4)."""
        if self.rank < 4:
            raise RepSpecMismatch(f"representation {self.name} has rank {self.rank} < 4")
        log = matrix_log_near_identity(m)
        basis = np.array([a.ravel() for a in self.images]).T
        coeffs, *_ = np.linalg.lstsq(basis, log.ravel(), rcond=None)
        return coeffs


def _elem(dim: int, i: int, j: int) -> np.ndarray:
    a = np.zeros((dim, dim), dtype=complex)
    a[i, j] = 1
    return a


def heisenberg3_rep(c: complex = 1.0) -> MatrixRep:
    """3x3 Heisenberg matrices: X = E12, Y = c E23, I = E13, Z = 0 (rank 3)."""
    spec = AlgebraSpec(c=c)
    return MatrixRep("heisenberg3", (_elem(3, 0, 1), c * _elem(3, 1, 2), np.zeros((3, 3)), _elem(3, 0, 2)),
                     spec, note="Z maps to 0; for two-factor checks")


def heisenberg_rep(c: complex = 1.0, d: complex = 1.0, e: complex = 1.0) -> MatrixRep:
    """5x5 Heisenberg-group matrices with [X,Y]=cI, [Y,Z]=dI, [X,Z]=eI (rank 4).

    Element (a, b, s) -> [[0, a^T, s], [0, 0, b], [0, 0, 0]] with a, b in C^3;
    the commutator of two such is (a1.b2 - a2.b1) E_15.
    """

    def mat(a, b):
        out = np.zeros((5, 5), dtype=complex)
        out[0, 1:4] = a
        out[1:4, 4] = b
        return out

    rx = mat([1, 0, 0], [0, 0, 0])
    ry = mat([0, 1, 0], [c, 0, 0])
    rz = mat([0, 0, 1], [e, d, 0])
    return MatrixRep("heisenberg5", (rx, ry, rz, _elem(5, 0, 4)), AlgebraSpec(c=c, d=d, e=e))


# sl2 images of the Virasoro generators L_-1, L_0, L_1: [L_j, L_k] = (k - j) L_{j+k}
SL2_L = {
    -1: np.array([[0, 0], [-1, 0]], dtype=complex),
    0: np.array([[0.5, 0], [0, -0.5]], dtype=complex),
    1: np.array([[0, 1], [0, 0]], dtype=complex),
}


def sl2_virasoro_rep(lm: complex, l0: complex, lk: complex, k: int = 1) -> MatrixRep:
    """X = lm L_{-k}, Y = l0 L_0, Z = lk L_k in 2x2 matrices, I = identity.

    With l0 = 0 the Y slot holds L_0 itself and the spec is the one of
    (X, L_0, Z); this is the convention of the two-factor limit.
    """
    if k not in (1, -1):
        raise ValueError("the 2x2 representation only covers k = +-1")
    y = l0 * SL2_L[0] if l0 != 0 else SL2_L[0]
    spec = virasoro_spec(k, lm, l0 if l0 != 0 else 1.0, lk, 0.0)
    return MatrixRep(f"sl2_virasoro_k{k}", (lm * SL2_L[-k], y, lk * SL2_L[k], np.eye(2, dtype=complex)),
                     spec, note="I maps to the identity")


def builtin_reps() -> list[MatrixRep]:
    return [
        heisenberg3_rep(1.0),
        heisenberg_rep(0.7, -0.4, 0.3),
        sl2_virasoro_rep(0.1, 0.2, 0.1, k=1),
        sl2_virasoro_rep(0.15, -0.1, 0.05, k=-1),
    ]


def verify_matrix(rep: MatrixRep, cf: "ClosedForm", tol: float = 1e-12) -> float:
    """Frobenius norm of exp(X)exp(Y)exp(Z) - exp(AX + BY + CZ + DI) in ``rep``.

    Two-factor closed forms compare against exp(X)exp(Z) instead.
    """
    spec = cf.spec
    if spec is not None:
        defect = rep.commutator_defect(spec)
        if defect > tol * max(1.0, spec.max_modulus()):
            raise RepSpecMismatch(f"{rep.name} violates the closed form's commutators by {defect:.2e}")
    rx, ry, rz, ri = rep.images
    if cf.factors == 2:
        lhs = matrix_exp(rx) @ matrix_exp(rz)
    else:
        lhs = matrix_exp(rx) @ matrix_exp(ry) @ matrix_exp(rz)
    rhs = matrix_exp(rep.image(cf.coefficients()))
    return float(np.linalg.norm(lhs - rhs))


def rep_for_spec(spec: AlgebraSpec, tol: float = 1e-13) -> MatrixRep | None:
    """A builtin representation realising ``spec``, if one applies.

    Central-only specs use the 5x5 Heisenberg matrices.  Specs of the sl2
    shape (u = z, only n and e besides, e = 0) use the 2x2 matrices with
    k = 1, l0 = u and lm lk = n u / 2.
    """
    vals = spec.as_dict()
    sc = max(spec.max_modulus(), 1e-300)
    nz = {k for k, x in vals.items() if abs(x) > tol * sc}
    if nz <= {"c", "d", "e"}:
        return heisenberg_rep(spec.c, spec.d, spec.e)
    if nz <= {"u", "z", "n"} and abs(spec.u - spec.z) <= tol * sc and "u" in nz:
        lam = spec.n * spec.u / 2
        rep = sl2_virasoro_rep(lam, spec.u, 1.0, k=1)
        if rep.commutator_defect(spec) <= 1e-12 * max(1.0, sc):
            return MatrixRep(rep.name, rep.images, spec, rep.note)
    return None
