import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from closedbch.algebra import ALL_TAGS, AlgebraSpec, TypeTag, complete_spec, sample_spec, virasoro_spec
from closedbch.alpha import (
    Branch,
    build_alpha_polynomial,
    fundamental_residual,
    is_admissible,
    rational_ratio,
    solve_alpha,
    solve_alpha_generic,
    t4_roots,
)
from closedbch.closed_form import virasoro_explicit
from closedbch.errors import InadmissibleOnly, UnsupportedRatio, UnsupportedShape
from closedbch.kernels import TWO_PI, s


def test_t3a_alpha():
    sp = complete_spec("T3a", dict(c=0.1, d=0.2, u=0.3, m=0.5))
    (sol,) = solve_alpha(sp)
    assert sol.alpha == pytest.approx((0.5 + 0.3) / 0.3)
    assert sol.residual < 1e-15 and sol.admissible


def test_t3b_alpha():
    sp = complete_spec("T3b", dict(c=0.1, d=0.2, u=0.3, v=0.4, n=0.1))
    assert solve_alpha(sp)[0].alpha == pytest.approx(0.4 / 0.3)


def test_t2_alphas():
    sp = complete_spec("T2a", dict(c=0.1, d=0.2, z=0.3, p=0.6))
    assert solve_alpha(sp)[0].alpha == pytest.approx(-2.0)
    sp = complete_spec("T2b", dict(c=0.1, d=0.2, w=0.5, z=0.3, n=0.1))
    assert solve_alpha(sp)[0].alpha == pytest.approx(-0.2)


def test_t1c_alphas():
    sp = complete_spec("T1c_v", dict(e=0.1, m=0.5, n=0.3, p=0.1))
    assert solve_alpha(sp)[0].alpha == pytest.approx(0.5)
    sp = complete_spec("T1c_iii", dict(d=0.1, w=0.2, e=0.1, m=0.6, n=0.2))
    assert solve_alpha(sp)[0].alpha == pytest.approx(0.5)
    sp = complete_spec("T1c_iv", dict(c=0.1, v=0.2, e=0.1, n=0.3, p=0.5))
    assert solve_alpha(sp)[0].alpha == pytest.approx(0.0)


def test_t5_two_solutions():
    sp = complete_spec("T5", dict(u=1, v=1, c=0, w=1, z=2, d=0))
    sols = solve_alpha(sp)
    assert [x.branch for x in sols] == [Branch.factor_xu, Branch.factor_xz]
    assert sols[0].alpha == pytest.approx(1.0)
    assert sols[1].alpha == pytest.approx(0.5)
    assert all(x.residual < 1e-13 for x in sols)


def test_beta_is_one_minus_alpha():
    sol = solve_alpha(sample_spec("T4", 0, 0.2))[0]
    assert sol.beta == 1 - sol.alpha


@pytest.mark.parametrize("tag", ALL_TAGS)
@pytest.mark.parametrize("scale", [0.05, 1.0])
def test_residual_small_for_sampled_specs(tag, scale):
    for seed in range(30):
        sols = solve_alpha(sample_spec(tag, seed, scale))
        assert min(x.residual for x in sols if x.admissible) < 1e-10


def test_t4_roots_reproduce_virasoro_roots():
    # e^{-alpha u} are the two roots e^{-k lambda_pm}
    for k, lm, l0, lk in ((1, 0.1, 0.2, 0.3), (2, -0.2, 0.15, 0.1), (1, 0.3j, -0.3, 0.2)):
        sp = virasoro_spec(k, lm, l0, lk)
        xs = t4_roots(sp)
        ref = virasoro_explicit(k, lm, l0, lk).roots
        assert sorted(np.abs([1 / x for x in xs])) == pytest.approx(sorted(np.abs(ref)), abs=1e-14)
        assert abs(xs[0] * xs[1] - cmath.exp(sp.u)) < 1e-13   # product e^{u+v-w} at v=w=0


def test_t4_quadratic_n_term_factor():
    # the n-term needs e^{(2u+v-w)/2}; with e^{(u+v-w)/2} the residual is not small
    sp = sample_spec("T4", 5, 1.0)
    u, v, w, n = sp.u, sp.v, sp.w, sp.n
    const = cmath.exp(u + v - w)
    rest = -cmath.exp(u) - cmath.exp(v) + cmath.exp(u + v) - const
    good = n * u / 2 * s(v) * s(w) * cmath.exp((2 * u + v - w) / 2) + rest
    bad = n * u / 2 * s(v) * s(w) * cmath.exp((u + v - w) / 2) + rest

    def resid(b):
        x = (-b + cmath.sqrt(b * b - 4 * const)) / 2
        return abs(fundamental_residual(sp, cmath.log(x) / u))

    assert resid(good) < 1e-12
    assert resid(bad) > 1e-6


def test_admissibility_excludes_poles():
    sp = AlgebraSpec(u=1.0, v=2j * np.pi + 0.5, z=1.0)
    assert not is_admissible(sp, 0.5)
    assert is_admissible(sp, 0.4)


def test_inadmissible_only():
    # T2a with alpha = -p/z placing w - beta z on 2 pi i
    z = 0.5
    beta = 2j * np.pi / -z          # w = 0 so w - beta z = 2 pi i
    p = -(1 - beta) * z
    sp = complete_spec("T2a", dict(c=0.1, d=0.1, z=z, p=p))
    with pytest.raises(InadmissibleOnly):
        solve_alpha(sp)
    assert not solve_alpha(sp, require_admissible=False)[0].admissible


@pytest.mark.parametrize("tag", ["T4", "T5"])
def test_generic_polynomial_finds_closed_form_roots(tag):
    for seed in range(10):
        sp = sample_spec(tag, seed, 0.5)
        if tag == "T5":
            # force a small rational ratio u/z
            sp = complete_spec("T5", dict(u=sp.u, v=sp.v, c=sp.c, w=sp.w, z=2 * sp.u, d=sp.d))
        eq = build_alpha_polynomial(sp)
        roots = solve_alpha_generic(eq)
        for sol in solve_alpha(sp):
            # equal up to the 2 pi i / u ambiguity of the logarithm
            dist = min(abs(cmath.exp(sol.alpha * sp.u) - cmath.exp(r.alpha * sp.u)) for r in roots)
            assert dist < 1e-10
        assert all(r.residual < 1e-9 for r in roots if r.admissible)


def test_equation_zero_at_alpha_and_not_nearby():
    for tag in ("T4", "T5"):
        for seed in range(20):
            sp = sample_spec(tag, seed, 0.5)
            eq = build_alpha_polynomial(sp)
            for sol in solve_alpha(sp):
                assert abs(eq(sol.alpha)) < 1e-10
                assert abs(eq(sol.alpha + 1e-2)) > 1e-6


def test_newton_for_irrational_ratio():
    u = 0.3
    z = u * np.sqrt(2)
    sp = complete_spec("T5", dict(u=u, v=0.2, c=0.1, w=0.1, z=z, d=0.05))
    eq = build_alpha_polynomial(sp)
    with pytest.raises(UnsupportedRatio):
        solve_alpha_generic(eq)
    (sol,) = solve_alpha_generic(eq, seed=0.6)
    assert sol.branch is Branch.newton and sol.residual < 1e-10
    closed = [x.alpha for x in solve_alpha(sp)]
    assert min(abs(sol.alpha - a) for a in closed) < 1e-8


def test_polynomial_shape_errors():
    with pytest.raises(UnsupportedShape):
        build_alpha_polynomial(sample_spec("T3a", 0, 0.1))


def test_rational_ratio():
    assert rational_ratio(0.3, 0.6) == (1, 2)
    assert rational_ratio(0.3, -0.2) == (-3, 2)
    assert rational_ratio(1.0, np.pi) is None
    assert rational_ratio(1j, 1.0) is None


def test_central_only_any_alpha():
    sp = AlgebraSpec(c=0.2, d=0.3, e=0.1)
    (sol,) = solve_alpha(sp)
    assert sol.alpha == 0.5 and sol.residual == 0


@given(st.sampled_from(ALL_TAGS), st.integers(0, 10**6))
@settings(max_examples=80, deadline=None)
def test_residual_property(tag, seed):
    sols = solve_alpha(sample_spec(tag, seed, 0.3))
    assert any(x.admissible and x.residual < 1e-10 for x in sols)
