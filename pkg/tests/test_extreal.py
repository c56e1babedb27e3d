import math

import pytest
from hypothesis import given, strategies as st

from econv.extreal import (
    EXACT,
    INF,
    NEG_INF,
    TolerancePolicy,
    add_conj,
    as_extreal,
    sub_conj,
    sub_dc,
)

EXT_VALUES = st.one_of(
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
    st.just(INF),
    st.just(NEG_INF),
)

# finite values with exact float sums, so the associativity law is about the
# infinity conventions rather than IEEE rounding
EXT_EXACT = st.one_of(
    st.integers(min_value=-1000, max_value=1000).map(float),
    st.just(INF),
    st.just(NEG_INF),
)


def test_add_conj_convention_table():
    assert add_conj(INF, NEG_INF) == NEG_INF
    assert add_conj(NEG_INF, INF) == NEG_INF
    assert sub_conj(INF, INF) == NEG_INF
    assert sub_conj(NEG_INF, NEG_INF) == NEG_INF
    assert add_conj(1.0, 2.0) == 3.0
    assert add_conj(INF, 5.0) == INF
    assert add_conj(NEG_INF, 5.0) == NEG_INF
    assert add_conj(INF, INF) == INF


def test_sub_dc_convention_table():
    assert sub_dc(INF, INF) == INF
    assert sub_dc(0.0, INF) == NEG_INF
    assert sub_dc(5.0, 3.0) == 2.0
    assert sub_dc(5.0, NEG_INF) == INF
    assert sub_dc(INF, 3.0) == INF
    assert sub_dc(INF, NEG_INF) == INF
    assert sub_dc(NEG_INF, 3.0) == NEG_INF
    assert sub_dc(NEG_INF, INF) == NEG_INF


def test_sub_dc_double_negative_infinity_warns():
    with pytest.warns(RuntimeWarning):
        assert sub_dc(NEG_INF, NEG_INF) == INF


def test_nan_rejected():
    with pytest.raises(ValueError):
        as_extreal(float("nan"))
    assert as_extreal(INF) == INF


@given(a=EXT_VALUES, b=EXT_VALUES)
def test_add_conj_commutative(a, b):
    assert add_conj(a, b) == add_conj(b, a)


@given(a=EXT_EXACT, b=EXT_EXACT, c=EXT_EXACT)
def test_add_conj_associative_without_mixed_infinities(a, b, c):
    vals = (a, b, c)
    if INF in vals and NEG_INF in vals:
        return  # mixed infinities are exactly where associativity breaks
    assert add_conj(add_conj(a, b), c) == add_conj(a, add_conj(b, c))


@given(a=EXT_VALUES, b=EXT_VALUES)
def test_sub_dc_matches_conjugation_outside_special_pairs(a, b):
    if a == b == INF or a == b == NEG_INF:
        return
    assert sub_dc(a, b) == add_conj(a, -b)


def test_exact_policy_invariant():
    with pytest.raises(ValueError):
        TolerancePolicy("EXACT", eq_tol=1e-9)
    assert EXACT.eq_tol == 0.0 and EXACT.strict_margin == 0.0
    assert EXACT.lt(0.0, 1e-300)
    assert not EXACT.lt(0.0, 0.0)


def test_grid_policy_margins():
    pol = TolerancePolicy.grid(eq_tol=1e-6, strict_margin=1e-9)
    # strict inequalities must clear a relative margin
    assert pol.lt(0.0, 1.0)
    assert not pol.lt(1.0 - 1e-12, 1.0)
    assert pol.leq(1.0 + 5e-7, 1.0)
    assert not pol.leq(1.0 + 5e-6, 1.0)
    assert pol.eq(2.0, 2.0 + 1e-7)
    # infinities compare exactly
    assert pol.lt(NEG_INF, 0.0)
    assert not pol.lt(INF, INF)
    assert pol.eq(INF, INF)


def test_policy_round_trip():
    pol = TolerancePolicy.grid(eq_tol=1e-3, strict_margin=1e-8)
    assert TolerancePolicy.from_json(pol.to_json()) == pol
    assert math.isclose(pol.margin_at(100.0, 0.0), 1e-6)
