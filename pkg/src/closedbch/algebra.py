"""Commutator algebras on span{X, Y, Z, I}: Jacobi system and the 13 types.

    [X, Y] = u X + v Y + c I
    [Y, Z] = w Y + z Z + d I
    [X, Z] = m X + n Y + p Z + e I
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields, replace
from typing import Mapping

import numpy as np

from .errors import (
    AmbiguousClassification,
    DegenerateDivision,
    ExtraneousParameter,
    JacobiViolation,
    MissingParameter,
)

PARAM_NAMES = ("u", "v", "c", "w", "z", "d", "m", "n", "p", "e")
SCHEMA = "bch-spec/1"


@dataclass(frozen=True)
class AlgebraSpec:
    u: complex = 0j
    v: complex = 0j
    c: complex = 0j
    w: complex = 0j
    z: complex = 0j
    d: complex = 0j
    m: complex = 0j
    n: complex = 0j
    p: complex = 0j
    e: complex = 0j

    def __post_init__(self):
        for f in fields(self):
            val = complex(getattr(self, f.name))
            if not (np.isfinite(val.real) and np.isfinite(val.imag)):
                raise ValueError(f"parameter {f.name} is not finite: {val!r}")
            object.__setattr__(self, f.name, val)

    def as_dict(self) -> dict[str, complex]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def max_modulus(self) -> float:
        return max(abs(x) for x in self.as_dict().values())

    def replace(self, **changes) -> "AlgebraSpec":
        return replace(self, **changes)

    def to_json_dict(self) -> dict:
        out: dict = {"schema": SCHEMA}
        for name, val in self.as_dict().items():
            out[name] = [val.real, val.imag]
        return out

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "AlgebraSpec":
        """Parse ``{"u": [re, im], ...}``; bare numbers are accepted, missing keys are 0."""
        if not isinstance(data, Mapping):
            raise ValueError("algebra spec must be a JSON object")
        schema = data.get("schema", SCHEMA)
        if schema != SCHEMA:
            raise ValueError(f"unsupported schema {schema!r}")
        unknown = set(data) - set(PARAM_NAMES) - {"schema"}
        if unknown:
            raise ValueError(f"unknown keys: {sorted(unknown)}")
        kwargs = {}
        for name in PARAM_NAMES:
            if name in data:
                kwargs[name] = parse_complex(data[name])
        return cls(**kwargs)


def parse_complex(obj) -> complex:
    if isinstance(obj, bool):
        raise ValueError(f"not a number: {obj!r}")
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        re, im = obj
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (re, im)):
            return complex(re, im)
    raise ValueError(f"expected [re, im], got {obj!r}")


def complex_to_json(x: complex) -> list[float]:
    x = complex(x)
    return [x.real, x.imag]


class TypeTag(str, enum.Enum):
    T1a = "T1a"
    T1b = "T1b"
    T1c_i = "T1c_i"
    T1c_ii = "T1c_ii"
    T1c_iii = "T1c_iii"
    T1c_iv = "T1c_iv"
    T1c_v = "T1c_v"
    T2a = "T2a"
    T2b = "T2b"
    T3a = "T3a"
    T3b = "T3b"
    T4 = "T4"
    T5 = "T5"

    def __str__(self) -> str:
        return self.value


ALL_TAGS = tuple(TypeTag)


@dataclass(frozen=True)
class _TypeInfo:
    unfixed: tuple[str, ...]      # parameters of [X, Z] left free by Jacobi
    inputs: tuple[str, ...]       # independent parameters accepted by complete_spec
    dimension: int
    case: str
    constraints: str


_TYPE_TABLE: dict[TypeTag, _TypeInfo] = {
    TypeTag.T1a: _TypeInfo(("e", "n"), ("c", "d", "v", "w", "e", "n"), 6,
                           "u=z=0, cw!=dv", "m=-w, p=-v"),
    TypeTag.T1b: _TypeInfo(("e", "m", "n"), ("c", "v", "w", "e", "m", "n"), 6,
                           "u=z=0, cw=dv!=0", "p=vm/w"),
    TypeTag.T1c_i: _TypeInfo(("e", "m", "n"), ("v", "w", "e", "m", "n"), 5,
                             "(v,w)", "p=mv/w"),
    TypeTag.T1c_ii: _TypeInfo(("e", "m", "n"), ("c", "d", "e", "m", "n"), 5,
                              "(c,d)", "p=cm/d"),
    TypeTag.T1c_iii: _TypeInfo(("e", "m", "n"), ("d", "w", "e", "m", "n"), 5,
                               "(d,w) or (d) or (w)", "p=0"),
    TypeTag.T1c_iv: _TypeInfo(("e", "n", "p"), ("c", "v", "e", "n", "p"), 5,
                              "(c,v) or (c) or (v)", "m=0"),
    TypeTag.T1c_v: _TypeInfo(("e", "m", "n", "p"), ("e", "m", "n", "p"), 4,
                             "(0,0,0,0,0,0)", ""),
    TypeTag.T2a: _TypeInfo(("p",), ("c", "d", "z", "p"), 4,
                           "u=w=0, z!=0", "m=n=v=0, e=pd/z"),
    TypeTag.T2b: _TypeInfo(("n",), ("c", "d", "w", "z", "n"), 5,
                           "u=0, w!=0, z!=0", "m=v=0, p=nz/w, e=dn/w-cw/z"),
    TypeTag.T3a: _TypeInfo(("m",), ("c", "d", "u", "m"), 4,
                           "v=z=0, u!=0", "n=p=w=0, e=cm/u"),
    TypeTag.T3b: _TypeInfo(("n",), ("c", "d", "u", "v", "n"), 5,
                           "z=0, u!=0, v!=0", "p=w=0, m=nu/v, e=cn/v-dv/u"),
    TypeTag.T4: _TypeInfo(("e", "n"), ("u", "v", "c", "w", "d", "e", "n"), 8,
                          "u=z!=0", "m=-w, p=-v"),
    TypeTag.T5: _TypeInfo((), ("u", "v", "c", "w", "z", "d"), 6,
                          "u!=z, uz!=0",
                          "m=-uw/z, n=-vw(1/u+1/z), p=-vz/u, e=-cw/z-dv/u"),
}


@dataclass(frozen=True)
class AlgebraType:
    tag: TypeTag
    free_params: tuple[str, ...]
    dimension: int

    @classmethod
    def of(cls, tag: "TypeTag | str", dimension: int | None = None) -> "AlgebraType":
        tag = TypeTag(tag)
        info = _TYPE_TABLE[tag]
        return cls(tag, info.unfixed, info.dimension if dimension is None else dimension)

    @property
    def inputs(self) -> tuple[str, ...]:
        return _TYPE_TABLE[self.tag].inputs

    @property
    def case(self) -> str:
        return _TYPE_TABLE[self.tag].case

    @property
    def constraints(self) -> str:
        return _TYPE_TABLE[self.tag].constraints

    def __str__(self) -> str:
        return self.tag.value


def _as_type(t: "AlgebraType | TypeTag | str") -> AlgebraType:
    return t if isinstance(t, AlgebraType) else AlgebraType.of(t)


@dataclass(frozen=True)
class JacobiResidual:
    r1: complex
    r2: complex
    r3: complex
    r4: complex

    def as_tuple(self) -> tuple[complex, complex, complex, complex]:
        return (self.r1, self.r2, self.r3, self.r4)

    def max_modulus(self) -> float:
        return max(abs(r) for r in self.as_tuple())


def _jacobi_terms(sp: AlgebraSpec) -> list[list[complex]]:
    u, v, c, w, z, d, m, n, p, e = (sp.u, sp.v, sp.c, sp.w, sp.z, sp.d, sp.m, sp.n, sp.p, sp.e)
    return [
        [u * w, m * z],
        [v * m, -w * p, n * z, -n * u],
        [p * u, z * v],
        [c * w, c * m, e * z, -e * u, -d * p, -d * v],
    ]


def jacobi_residual(spec: AlgebraSpec) -> JacobiResidual:
    """Left-hand sides of the linear system the Jacobi identity imposes."""
    u, v, c, w, z, d, m, n, p, e = (spec.u, spec.v, spec.c, spec.w, spec.z,
                                     spec.d, spec.m, spec.n, spec.p, spec.e)
    return JacobiResidual(
        u * w + m * z,
        v * m - w * p + n * (z - u),
        p * u + z * v,
        c * (w + m) + e * (z - u) - d * (p + v),
    )


def jacobi_defect(spec: AlgebraSpec) -> float:
    """Largest Jacobi residual component relative to the size of its terms."""
    worst = 0.0
    for r, terms in zip(jacobi_residual(spec).as_tuple(), _jacobi_terms(spec)):
        size = sum(abs(t) for t in terms)
        if size > 0:
            worst = max(worst, abs(r) / size)
    return worst


def check_jacobi(spec: AlgebraSpec, tol: float = 1e-10) -> None:
    defect = jacobi_defect(spec)
    if defect > tol:
        raise JacobiViolation(
            f"Jacobi identity violated: relative residual {defect:.3e} > {tol:.1e} "
            f"(residual {jacobi_residual(spec).as_tuple()})")


class _ZeroTest:
    def __init__(self, spec: AlgebraSpec, tol: float):
        self.scale = spec.max_modulus()
        self.tol = tol

    def __call__(self, x: complex, name: str, degree: int = 1) -> bool:
        ref = self.scale ** degree
        if ref == 0:
            return True
        r = abs(x) / ref
        if self.tol <= r < 10 * self.tol:
            raise AmbiguousClassification(
                f"{name} = {x!r} is within (tol, 10 tol) of zero (relative {r:.2e})")
        return r < self.tol


_SUBTYPE_1C = {
    frozenset("vw"): TypeTag.T1c_i,
    frozenset("cd"): TypeTag.T1c_ii,
    frozenset("dw"): TypeTag.T1c_iii,
    frozenset("d"): TypeTag.T1c_iii,
    frozenset("w"): TypeTag.T1c_iii,
    frozenset("cv"): TypeTag.T1c_iv,
    frozenset("c"): TypeTag.T1c_iv,
    frozenset("v"): TypeTag.T1c_iv,
    frozenset(): TypeTag.T1c_v,
}


def classify(spec: AlgebraSpec, tol: float = 1e-12, jacobi_tol: float = 1e-10) -> AlgebraType:
    """Assign the spec to one of the 13 Jacobi-consistent types.

    A parameter counts as zero when its modulus is below ``tol`` times the
    largest parameter modulus (products are compared against its square).
    """
    check_jacobi(spec, jacobi_tol)
    zero = _ZeroTest(spec, tol)
    u0, z0 = zero(spec.u, "u"), zero(spec.z, "z")
    if u0 and z0:
        cw, dv = spec.c * spec.w, spec.d * spec.v
        if not zero(cw - dv, "cw-dv", 2):
            return AlgebraType.of(TypeTag.T1a)
        if not zero(cw, "cw", 2):
            return AlgebraType.of(TypeTag.T1b)
        nonzero = frozenset(k for k in "cdvw" if not zero(getattr(spec, k), k))
        tag = _SUBTYPE_1C.get(nonzero)
        if tag is None:
            raise AmbiguousClassification(f"cw=dv=0 with nonzero set {sorted(nonzero)}")
        dim = _TYPE_TABLE[tag].dimension
        if tag in (TypeTag.T1c_iii, TypeTag.T1c_iv) and len(nonzero) < 2:
            dim = 4
        return AlgebraType.of(tag, dim)
    if u0:
        return AlgebraType.of(TypeTag.T2a if zero(spec.w, "w") else TypeTag.T2b)
    if z0:
        return AlgebraType.of(TypeTag.T3a if zero(spec.v, "v") else TypeTag.T3b)
    if zero(spec.u - spec.z, "u-z"):
        return AlgebraType.of(TypeTag.T4)
    return AlgebraType.of(TypeTag.T5)


def _div(num: complex, den: complex, what: str) -> complex:
    if den == 0:
        raise DegenerateDivision(f"constraint denominator {what} vanishes")
    return num / den


def complete_spec(atype: "AlgebraType | TypeTag | str", free_values: Mapping[str, complex]) -> AlgebraSpec:
    """Fill in the parameters fixed by the Jacobi identity for the given type."""
    atype = _as_type(atype)
    expected = set(atype.inputs)
    given = set(free_values)
    if expected - given:
        raise MissingParameter(f"{atype.tag}: missing {sorted(expected - given)}")
    if given - expected:
        raise ExtraneousParameter(f"{atype.tag}: unexpected {sorted(given - expected)}")
    q = {k: complex(val) for k, val in free_values.items()}
    tag = atype.tag

    if tag is TypeTag.T1a:
        q.update(u=0, z=0, m=-q["w"], p=-q["v"])
    elif tag is TypeTag.T1b:
        q["d"] = _div(q["c"] * q["w"], q["v"], "v")
        q.update(u=0, z=0, p=_div(q["v"] * q["m"], q["w"], "w"))
    elif tag is TypeTag.T1c_i:
        q.update(u=0, z=0, c=0, d=0, p=_div(q["m"] * q["v"], q["w"], "w"))
    elif tag is TypeTag.T1c_ii:
        q.update(u=0, z=0, v=0, w=0, p=_div(q["c"] * q["m"], q["d"], "d"))
    elif tag is TypeTag.T1c_iii:
        q.update(u=0, z=0, v=0, c=0, p=0)
    elif tag is TypeTag.T1c_iv:
        q.update(u=0, z=0, w=0, d=0, m=0)
    elif tag is TypeTag.T1c_v:
        q.update(u=0, z=0, v=0, c=0, w=0, d=0)
    elif tag is TypeTag.T2a:
        q.update(u=0, w=0, m=0, n=0, v=0, e=_div(q["p"] * q["d"], q["z"], "z"))
    elif tag is TypeTag.T2b:
        w, z, n = q["w"], q["z"], q["n"]
        q.update(u=0, m=0, v=0, p=_div(n * z, w, "w"),
                 e=_div(q["d"] * n, w, "w") - _div(q["c"] * w, z, "z"))
    elif tag is TypeTag.T3a:
        q.update(v=0, z=0, n=0, p=0, w=0, e=_div(q["c"] * q["m"], q["u"], "u"))
    elif tag is TypeTag.T3b:
        u, v, n = q["u"], q["v"], q["n"]
        q.update(z=0, p=0, w=0, m=_div(n * u, v, "v"),
                 e=_div(q["c"] * n, v, "v") - _div(q["d"] * v, u, "u"))
    elif tag is TypeTag.T4:
        q.update(z=q["u"], m=-q["w"], p=-q["v"])
    elif tag is TypeTag.T5:
        u, v, c, w, z, d = (q[k] for k in ("u", "v", "c", "w", "z", "d"))
        q.update(m=-_div(u * w, z, "z"),
                 n=-v * w * (_div(1, u, "u") + _div(1, z, "z")),
                 p=-_div(v * z, u, "u"),
                 e=-_div(c * w, z, "z") - _div(d * v, u, "u"))
    return AlgebraSpec(**q)


def _draw(rng: np.random.Generator, scale: float) -> complex:
    r = scale * rng.uniform(0.1, 1.0)
    phi = rng.uniform(0.0, 2.0 * np.pi)
    return complex(r * np.cos(phi), r * np.sin(phi))


def _margins_ok(tag: TypeTag, sp: AlgebraSpec, scale: float) -> bool:
    """Defining (in)equalities and solver denominators, with relative margin 0.1."""
    eps = 0.1 * scale
    if sp.max_modulus() > scale * (1 + 1e-12):
        return False
    if tag is TypeTag.T1a:
        cw, dv = sp.c * sp.w, sp.d * sp.v
        return abs(cw - dv) >= 0.1 * max(abs(cw), abs(dv)) and abs(sp.v * sp.w) > 0 and \
            abs(sp.w - sp.v) >= eps
    if tag in (TypeTag.T1b, TypeTag.T1c_i):
        return abs(sp.m - sp.w) >= eps and abs(sp.w - sp.v) >= eps
    if tag is TypeTag.T1c_ii:
        return abs(sp.d - sp.c) >= eps
    if tag is TypeTag.T1c_iii:
        return abs(sp.m - sp.w) >= eps
    if tag is TypeTag.T1c_iv:
        return abs(sp.p - sp.v) >= eps
    if tag is TypeTag.T1c_v:
        return abs(sp.m - sp.p) >= eps
    if tag is TypeTag.T5:
        return abs(sp.u - sp.z) >= eps
    return True


def sample_spec(atype: "AlgebraType | TypeTag | str", seed: int, scale: float) -> AlgebraSpec:
    """Deterministic pseudo-random Jacobi-consistent spec of the given type.

    Every parameter (free or constrained) has modulus <= scale and every
    nonzero free parameter has modulus >= scale/10.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    atype = _as_type(atype)
    tag = atype.tag
    rng = np.random.default_rng([int(seed), ALL_TAGS.index(tag)])
    for _ in range(10_000):
        free = {k: _draw(rng, scale) for k in atype.inputs}
        if tag is TypeTag.T1c_iii:
            pattern = rng.integers(3)      # (d,w), (d), (w)
            if pattern == 1:
                free["w"] = 0j
            elif pattern == 2:
                free["d"] = 0j
        elif tag is TypeTag.T1c_iv:
            pattern = rng.integers(3)      # (c,v), (c), (v)
            if pattern == 1:
                free["v"] = 0j
            elif pattern == 2:
                free["c"] = 0j
        sp = complete_spec(atype, free)
        if _margins_ok(tag, sp, scale):
            return sp
    raise RuntimeError(f"could not sample a spec of type {tag}")  # pragma: no cover


def structure_summary(spec: AlgebraSpec) -> str:
    return (f"[X,Y] = {spec.u}X + {spec.v}Y + {spec.c}I; "
            f"[Y,Z] = {spec.w}Y + {spec.z}Z + {spec.d}I; "
            f"[X,Z] = {spec.m}X + {spec.n}Y + {spec.p}Z + {spec.e}I")


def virasoro_spec(k: int, lm: complex, l0: complex, lk: complex, central: complex = 0) -> AlgebraSpec:
    """Spec of X = lm L_{-k}, Y = l0 L_0, Z = lk L_k in the Virasoro algebra.

    [L_j, L_k] = (k - j) L_{j+k} + (central/12)(k^3 - k) delta_{j+k,0} I.
    """
    if k == 0:
        raise ValueError("k must be nonzero")
    if l0 == 0:
        raise DegenerateDivision("l0 = 0 has no three-factor spec; use the two-factor limit")
    lam = complex(lm) * complex(lk)
    return AlgebraSpec(u=k * l0, z=k * l0, n=2 * k * lam / l0,
                       e=lam * complex(central) / 12 * (k**3 - k))
