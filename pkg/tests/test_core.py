import json
from decimal import Decimal
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from strategies import instances
from manna.core import (Allocation, Instance, SolverParams, bundle_value, check_tau_condition,
                        classify_items, format_rational, normalize, parse_allocation,
                        parse_instance, satisfies_alpha_mms, scale, serialize_allocation,
                        serialize_instance, to_rational, welfare, welfare_max_allocation)
from manna.errors import (DuplicateLabelError, InvalidAllocationError, MalformedJsonError,
                          ParameterError, RaggedMatrixError, ZeroDenominatorError,
                          ZeroTotalError)
from manna.generators import gen_nonexistence


# rationals

@pytest.mark.parametrize("raw, want", [
    (3, F(3)), ("-1/2", F(-1, 2)), ("0.25", F(1, 4)), ("2/4", F(1, 2)),
    (Decimal("1.1"), F(11, 10)), ("-3", F(-3)), (F(5, 7), F(5, 7)),
])
def test_to_rational_is_exact(raw, want):
    assert to_rational(raw) == want


def test_to_rational_rejects_zero_denominator_and_bool():
    with pytest.raises(ZeroDenominatorError):
        to_rational("1/0")
    with pytest.raises(ValueError):
        to_rational(True)


def test_format_rational_lowest_terms():
    assert format_rational(F(6, 4)) == "3/2"
    assert format_rational(F(-4, 2)) == "-2"
    assert format_rational(F(0)) == "0"


# parsing

def test_parse_decimal_and_fraction_strings():
    inst = parse_instance('{"agents":2,"items":["a","b"],"values":[["1","-1/2"],["3","0.25"]]}')
    assert inst.values[0][1] == F(-1, 2)
    assert inst.values[1][1] == F(1, 4)


def test_parse_empty_manna():
    inst = parse_instance('{"agents":1,"items":[],"values":[[]]}')
    assert (inst.n, inst.m) == (1, 0)


def test_parse_json_float_is_taken_literally():
    inst = parse_instance('{"agents":1,"items":["a"],"values":[[0.1]]}')
    assert inst.values[0][0] == F(1, 10)


@pytest.mark.parametrize("text, error, field", [
    ('{"agents":1,"items":["a","b"],"values":[[1,2,3]]}', RaggedMatrixError, "values[0]"),
    ('{"agents":2,"items":["a","b"],"values":[[1,2],[1,2,3]]}', RaggedMatrixError, "values[1]"),
    ('{"agents":1,"items":["a"],"values":[["1/0"]]}', ZeroDenominatorError, "values[0][0]"),
    ('{"agents":1,"items":["a","a"],"values":[[1,2]]}', DuplicateLabelError, "items"),
    ('{"agents":1,"items":["a"]', MalformedJsonError, None),
    ('{"agents":1,"items":["a"]}', MalformedJsonError, "values"),
])
def test_parse_errors_are_distinct(text, error, field):
    with pytest.raises(error) as info:
        parse_instance(text)
    if field is not None:
        assert info.value.field == field


@given(instances())
def test_serialize_round_trip(inst):
    assert parse_instance(serialize_instance(inst)) == inst


def test_serialization_is_deterministic():
    inst = Instance.from_rows([[F(1, 2), -3]], items=["z", "a"])
    text = serialize_instance(inst)
    assert text == serialize_instance(parse_instance(text))
    assert json.loads(text)["values"] == [["1/2", "-3"]]


def test_allocation_round_trip_and_sorted_labels():
    inst = Instance.from_rows([[1, 2, 3]], items=["c", "a", "b"])
    alloc = Allocation.from_bundles([[0, 1, 2]])
    text = serialize_allocation(inst, alloc)
    assert json.loads(text) == {"bundles": [["a", "b", "c"]]}
    assert parse_allocation(inst, text) == alloc


def test_allocation_must_partition():
    inst = Instance.from_rows([[1, 2]], items=["a", "b"])
    with pytest.raises(InvalidAllocationError):
        parse_allocation(inst, '{"bundles": [["a"]]}')
    with pytest.raises(InvalidAllocationError):
        parse_allocation(inst, '{"bundles": [["a", "b", "x"]]}')
    with pytest.raises(InvalidAllocationError):
        Allocation.from_bundles([[0], [0, 1]]).validate(2, 2)


# classification and normalization

def test_classify_sign_split():
    c = classify_items(Instance.from_rows([[2, -3]]))
    assert c.goods_of[0] == {0} and c.chores_of[0] == {1}
    assert (c.v_plus[0], c.v_minus[0]) == (2, 3)


def test_zero_counts_as_good():
    assert classify_items(Instance.from_rows([[0]])).goods_of[0] == {0}


def test_chore_only_if_negative_for_everyone():
    c = classify_items(Instance.from_rows([[1, -1], [-1, 1]]))
    assert c.global_goods == {0, 1} and not c.global_chores


@given(instances(m_range=(1, 6)))
def test_classification_partitions_and_totals(inst):
    c = classify_items(inst)
    for i in range(inst.n):
        assert c.goods_of[i] | c.chores_of[i] == set(range(inst.m))
        assert not c.goods_of[i] & c.chores_of[i]
        assert inst.total(i) == c.v_plus[i] - c.v_minus[i]


def test_normalize_examples():
    norm, scales = normalize(Instance.from_rows([[3, 1], [-3, -1]]))
    assert scales == [F(1, 2), F(1, 2)]
    assert norm.values[0] == (F(3, 2), F(1, 2))
    assert norm.values[1] == (F(-3, 2), F(-1, 2))
    with pytest.raises(ZeroTotalError) as info:
        normalize(Instance.from_rows([[1, -1], [1, 1]]))
    assert info.value.agent == 0


@given(instances(m_range=(1, 6)), st.lists(st.integers(1, 9), min_size=3, max_size=3))
def test_normalize_idempotent_and_scale_invariant(inst, factors):
    if any(inst.total(i) == 0 for i in range(inst.n)):
        return
    norm, _ = normalize(inst)
    assert all(abs(norm.total(i)) == inst.n for i in range(inst.n))
    assert normalize(norm)[0] == norm
    scaled = scale(inst, [F(c, 7) for c in factors[:inst.n]])
    assert normalize(scaled)[0] == norm


@pytest.mark.parametrize("rows, tau, want", [
    ([[10, -1]], 1, True), ([[5, -5]], F(1, 10), False), ([[5, 0]], 100, True),
])
def test_tau_condition(rows, tau, want):
    assert check_tau_condition(Instance.from_rows(rows), tau) == [want]


# values and predicates

def test_bundle_value():
    inst = Instance.from_rows([[1, 2, -4]])
    assert bundle_value(inst, 0, {0, 2}) == -3
    assert bundle_value(inst, 0, set()) == 0
    with pytest.raises(IndexError):
        bundle_value(inst, 0, {3})


def test_nonexistence_instance_total_is_three_quarters():
    inst = gen_nonexistence()
    assert all(inst.total(i) == F(3, 4) for i in range(3))


@pytest.mark.parametrize("mms, value, alpha, want", [
    (1, F(3, 4), F(3, 4), True), (-2, -3, F(1, 2), True), (-2, -5, F(1, 2), False),
])
def test_satisfies_alpha_mms(mms, value, alpha, want):
    inst = Instance.from_rows([[value]])
    alloc = Allocation.from_bundles([[0]])
    assert satisfies_alpha_mms(inst, alloc, [F(mms)], alpha) is want


def test_alpha_at_most_zero_is_always_satisfied():
    inst = Instance.from_rows([[-9]])
    assert satisfies_alpha_mms(inst, Allocation.from_bundles([[0]]), [F(1)], 0)


@given(instances(n_range=(1, 2), m_range=(1, 4)), st.fractions(0, 1), st.fractions(0, 1))
def test_satisfies_alpha_mms_is_monotone(inst, a, b):
    lo, hi = sorted((a, b))
    if lo == 0:
        return
    alloc = Allocation.from_assignment([j % inst.n for j in range(inst.m)], inst.n)
    mms = [F(1), F(-2)][:inst.n]
    if satisfies_alpha_mms(inst, alloc, mms, hi):
        assert satisfies_alpha_mms(inst, alloc, mms, lo)


def test_satisfies_alpha_mms_length_mismatch():
    inst = Instance.from_rows([[1]])
    with pytest.raises(ValueError):
        satisfies_alpha_mms(inst, Allocation.from_bundles([[0]]), [1, 1], 1)


def test_welfare(two_by_two):
    eye = Instance.from_rows([[1, 0], [0, 1]])
    assert welfare(eye, Allocation.from_bundles([[0], [1]])) == 2
    assert welfare(eye, Allocation.from_bundles([[1], [0]])) == 0
    assert welfare(Instance.from_rows([[2, -1]]), Allocation.from_bundles([[0, 1]])) == 1


def test_welfare_max_allocation(two_by_two):
    assert welfare_max_allocation(two_by_two).bundles == (frozenset({0}), frozenset({1}))
    tie = Instance.from_rows([[1], [1]])
    assert welfare_max_allocation(tie).bundles[0] == {0}
    chore = Instance.from_rows([[-3], [-1]])
    assert welfare_max_allocation(chore).bundles[1] == {0}


def test_solver_params_validation():
    SolverParams(alpha=1, epsilon=F(1, 10), gamma=F(1, 10))
    with pytest.raises(ParameterError):
        SolverParams(alpha=0, epsilon=F(1, 10), gamma=F(1, 10))
    with pytest.raises(ParameterError):
        SolverParams(alpha=1, epsilon=0, gamma=F(1, 10))
