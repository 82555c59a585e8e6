"""Closed-form Baker-Campbell-Hausdorff coefficients for exp(X) exp(Y) exp(Z)."""

from .algebra import (
    ALL_TAGS,
    AlgebraSpec,
    AlgebraType,
    TypeTag,
    check_jacobi,
    classify,
    complete_spec,
    jacobi_residual,
    sample_spec,
    virasoro_spec,
)
from .alpha import AlphaSolution, Branch, build_alpha_polynomial, fundamental_residual, solve_alpha, solve_alpha_generic
from .closed_form import (
    ClosedForm,
    TildeParams,
    compose2_limit,
    compose2_vbv,
    compose3,
    select_principal,
    tilde_params,
    virasoro_compose,
    virasoro_explicit,
)
from .kernels import f_vbv, g_kernel, h_kernel, l_kernel, s, s_alpha

__all__ = [
    "ALL_TAGS", "AlgebraSpec", "AlgebraType", "TypeTag", "check_jacobi", "classify", "complete_spec",
    "jacobi_residual", "sample_spec", "virasoro_spec",
    "AlphaSolution", "Branch", "build_alpha_polynomial", "fundamental_residual", "solve_alpha",
    "solve_alpha_generic",
    "ClosedForm", "TildeParams", "compose2_limit", "compose2_vbv", "compose3", "select_principal",
    "tilde_params", "virasoro_compose", "virasoro_explicit",
    "f_vbv", "g_kernel", "h_kernel", "l_kernel", "s", "s_alpha",
]
