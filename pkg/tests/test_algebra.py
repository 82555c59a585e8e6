import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from closedbch.algebra import (
    ALL_TAGS,
    AlgebraSpec,
    AlgebraType,
    TypeTag,
    check_jacobi,
    classify,
    complete_spec,
    jacobi_defect,
    jacobi_residual,
    sample_spec,
    virasoro_spec,
)
from closedbch.errors import (
    AmbiguousClassification,
    DegenerateDivision,
    ExtraneousParameter,
    JacobiViolation,
    MissingParameter,
)


def test_json_round_trip():
    sp = AlgebraSpec(u=0.1 + 0.2j, e=-3)
    data = json.loads(json.dumps(sp.to_json_dict()))
    assert data["schema"] == "bch-spec/1"
    assert AlgebraSpec.from_json_dict(data) == sp


def test_json_rejects_unknown_keys_and_schema():
    with pytest.raises(ValueError):
        AlgebraSpec.from_json_dict({"q": 1})
    with pytest.raises(ValueError):
        AlgebraSpec.from_json_dict({"schema": "other/2"})
    with pytest.raises(ValueError):
        AlgebraSpec(u=float("nan"))


def test_zero_spec_is_t1c_v():
    t = classify(AlgebraSpec())
    assert t.tag is TypeTag.T1c_v and t.dimension == 4


@pytest.mark.parametrize("tag,dim", [("T1a", 6), ("T1b", 6), ("T1c_i", 5), ("T1c_ii", 5), ("T1c_v", 4),
                                     ("T2a", 4), ("T2b", 5), ("T3a", 4), ("T3b", 5), ("T4", 8), ("T5", 6)])
def test_type_dimensions(tag, dim):
    assert AlgebraType.of(tag).dimension == dim


def test_t1a_free_params():
    assert AlgebraType.of("T1a").free_params == ("e", "n")


def test_t1c_iii_single_nonzero_has_dimension_4():
    sp = complete_spec("T1c_iii", dict(d=0.2, w=0, e=0.1, m=0.3, n=0.1))
    t = classify(sp)
    assert t.tag is TypeTag.T1c_iii and t.dimension == 4


def test_complete_spec_t1a_constraints():
    sp = complete_spec("T1a", dict(c=1, d=2, v=3, w=4, e=5, n=6))
    assert (sp.m, sp.p, sp.u, sp.z) == (-4, -3, 0, 0)


def test_complete_spec_t5():
    sp = complete_spec("T5", dict(u=1, v=1, c=0, w=1, z=2, d=0))
    assert sp.m == -0.5 and sp.p == -2 and sp.n == pytest.approx(-1.5)
    assert jacobi_defect(sp) == 0


def test_complete_spec_parameter_errors():
    with pytest.raises(MissingParameter):
        complete_spec("T3a", dict(c=1, d=1, u=1))
    with pytest.raises(ExtraneousParameter):
        complete_spec("T3a", dict(c=1, d=1, u=1, m=1, n=2))
    with pytest.raises(DegenerateDivision):
        complete_spec("T3a", dict(c=1, d=1, u=0, m=1))


def test_jacobi_violation():
    sp = AlgebraSpec(u=1, w=1)
    assert jacobi_residual(sp).r1 == 1
    with pytest.raises(JacobiViolation):
        check_jacobi(sp)
    with pytest.raises(JacobiViolation):
        classify(sp)


def test_ambiguous_zero():
    sp = complete_spec("T3a", dict(c=1, d=1, u=1, m=1)).replace(z=5e-12, p=0, n=0)
    # z sits in the (tol, 10 tol) band; Jacobi residual stays tiny relative to its terms
    with pytest.raises((AmbiguousClassification, JacobiViolation)):
        classify(sp)


@pytest.mark.parametrize("tag", ALL_TAGS)
def test_sampled_specs_classify_back(tag):
    for seed in range(20):
        sp = sample_spec(tag, seed, 0.5)
        assert jacobi_defect(sp) < 1e-13
        assert classify(sp).tag is tag
        assert sp.max_modulus() <= 0.5 * (1 + 1e-12)


def test_sampling_is_deterministic():
    assert sample_spec("T4", 3, 0.1) == sample_spec("T4", 3, 0.1)
    assert sample_spec("T4", 3, 0.1) != sample_spec("T4", 4, 0.1)


@given(st.sampled_from(ALL_TAGS), st.integers(0, 10_000), st.floats(1e-3, 1.0))
@settings(max_examples=100, deadline=None)
def test_sampled_jacobi_property(tag, seed, scale):
    sp = sample_spec(tag, seed, scale)
    assert jacobi_defect(sp) < 1e-13
    assert classify(sp).tag is tag


def test_virasoro_spec_is_t4():
    sp = virasoro_spec(2, 0.1, 0.2, 0.3, central=1.0)
    assert sp.u == sp.z == 0.4
    assert sp.n == pytest.approx(2 * 2 * 0.03 / 0.2)
    assert sp.e == pytest.approx(0.03 / 12 * 6)
    assert classify(sp).tag is TypeTag.T4
    with pytest.raises(ValueError):
        virasoro_spec(0, 1, 1, 1)


def test_classify_scale_invariance(rng):
    for tag in ALL_TAGS:
        sp = sample_spec(tag, 1, 0.3)
        scaled = AlgebraSpec(**{k: 7.5 * x for k, x in sp.as_dict().items()})
        assert classify(scaled).tag is tag
