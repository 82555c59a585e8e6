import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from closedbch.errors import PoleError
from closedbch.kernels import (
    f_vbv,
    f_vbv_direct,
    g_kernel,
    g_kernel_f,
    h_kernel,
    h_kernel_f,
    l_kernel,
    l_kernel_s,
    pole_index,
    s,
    s_alpha,
)

small = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False)


def f_mp(u, v):
    mpmath.mp.dps = 40
    u, v = mpmath.mpc(u), mpmath.mpc(v)
    eu, ev = mpmath.exp(u), mpmath.exp(v)
    return complex(((u - v) * eu * ev - (u * eu - v * ev)) / (u * v * (eu - ev)))


def test_s_at_zero_and_small():
    assert s(0) == 1
    assert abs(s(1e-5) - 1) < 1e-11
    assert abs(s(2.0) - math.sinh(1.0)) < 1e-15


def test_s_alpha_limit_is_alpha():
    assert s_alpha(0.3, 0) == pytest.approx(0.3)
    assert abs(s_alpha(0.3, 1e-9) - 0.3) < 1e-15


def test_f_at_origin_is_half():
    assert f_vbv(0, 0) == pytest.approx(0.5, abs=1e-16)


@pytest.mark.parametrize("u,v", [(0.3, 0.1), (1e-4, 2e-4), (1.0, 1.0 + 1e-9),
                                 (2 + 1j, -0.5j), (5.0, -3.0), (1e-4, 0.8), (30.0, 29.9)])
def test_f_matches_high_precision(u, v):
    ref = f_mp(u, v)
    # e^u carries a relative condition number |u|
    tol = 5e-15 * (1 + abs(u) + abs(v)) * max(1.0, abs(ref))
    assert abs(f_vbv(u, v) - ref) <= tol


def test_f_diagonal_limit():
    # f(u, u) by mpmath at a tiny offset
    for u in (0.2, 1.5, -0.7 + 0.4j):
        mpmath.mp.dps = 50
        ref = f_mp(mpmath.mpc(u) + mpmath.mpf("1e-25"), u)
        assert abs(f_vbv(u, u) - ref) < 1e-14


def test_direct_form_agrees_away_from_singular_set():
    assert abs(f_vbv(0.4, -0.9) - f_vbv_direct(0.4, -0.9)) < 1e-14


@given(small, small)
@settings(max_examples=200, deadline=None)
def test_f_symmetric(u, v):
    if pole_index(u - v):
        return
    a, b = f_vbv(u, v), f_vbv(v, u)
    assert abs(a - b) <= 1e-13 * max(1.0, abs(a))


@given(small, small, small)
@settings(max_examples=200, deadline=None)
def test_dual_forms(alpha, u, v):
    if pole_index(v - alpha * u):
        return
    for k1, k2 in ((g_kernel, g_kernel_f), (h_kernel, h_kernel_f), (l_kernel, l_kernel_s)):
        a, b = k1(alpha, u, v), k2(alpha, u, v)
        assert abs(a - b) <= 1e-12 * max(abs(a), 1e-300) or abs(a - b) < 1e-15


def test_pole_raises():
    with pytest.raises(PoleError):
        f_vbv(2j * math.pi, 0)
    with pytest.raises(PoleError):
        g_kernel(1, -2j * math.pi, 0)


def test_vbv_identity_in_matrices():
    from closedbch.oracle import matrix_exp

    # X = E12, Y = b E11 + a E22: [X, Y] = (a - b) X, so u = a - b, v = 0
    for a, b in ((0.3, -0.2), (1.1, 0.4), (0.5j, 0.0)):
        x = np.array([[0, 1], [0, 0]], dtype=complex)
        y = np.diag([b, a]).astype(complex)
        f = f_vbv(a - b, 0)
        lhs = matrix_exp(x) @ matrix_exp(y)
        rhs = matrix_exp(x + y + f * (x @ y - y @ x))
        assert np.abs(lhs - rhs).max() < 1e-14
