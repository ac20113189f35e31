import itertools
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, strategies as st

from manna.core import classify_items, normalize, Instance
from manna.errors import BagFillPreconditionError, BudgetExceededError, ParameterError
from manna.identical import (approx_mms, approx_mms_negative, approx_mms_nonneg, bag_fill,
                             canonical_assignments, classify_bsets, goods_only_mms,
                             is_partition_valid, negative_threshold, normalize_row,
                             split_big_small, BigSmallSplit)
from manna.oracle import exact_mms

row_st = st.lists(st.integers(-20, 20), min_size=1, max_size=7)


def min_bundle(values, alloc):
    return min(sum((values[j] for j in b), F(0)) for b in alloc.bundles)


def covers(alloc, m):
    items = [j for b in alloc.bundles for j in b]
    return sorted(items) == list(range(m))


# approx_mms

def test_approx_mms_examples():
    value, alloc = approx_mms([1, 1], 2, F(1, 10))
    assert value == 1 and sorted(map(sorted, alloc.bundles)) == [[0], [1]]
    assert approx_mms([-1, -1], 2, F(1, 10))[0] == -1
    value, alloc = approx_mms([0, 0, 0], 2, F(1, 10))
    assert value == 0 and alloc.bundles[0] == {0, 1, 2}


def test_nonneg_exact_split_survives():
    values = [F(v, 9) for v in (5, 5, 4, 4)]  # total 2
    alloc = approx_mms_nonneg(values, 2, F(1, 5))
    assert min_bundle(values, alloc) == 1


def test_negative_examples():
    alloc = approx_mms_negative([-1, -1], 2, F(1, 10))
    assert min_bundle([-1, -1], alloc) == -1
    vals = [F(-3, 2), F(-1, 2)]
    assert min_bundle(vals, approx_mms_negative(vals, 2, F(1, 10))) == F(-3, 2)
    assert exact_mms(vals, 2)[0] == F(-3, 2)


def test_negative_small_goods_go_to_lower_bundle():
    eps = F(1, 10)
    values = [F(-1), F(-1)] + [F(1, 100)] * 20  # total -9/5
    alloc = approx_mms_negative(values, 2, eps)
    mu = exact_mms(values, 2)[0]
    assert min_bundle(values, alloc) >= mu / (1 - eps)
    assert negative_threshold(eps) == F(1, 9)


def test_epsilon_range():
    with pytest.raises(ParameterError):
        approx_mms([1, 1], 2, 1)
    with pytest.raises(ParameterError):
        approx_mms([1, 1], 2, 0)


@given(row_st, st.integers(2, 3), st.sampled_from([F(1, 10), F(1, 4), F(1, 2)]))
def test_guarantee_against_oracle(row, n, eps):
    mu = exact_mms(row, n)[0]
    value, alloc = approx_mms(row, n, eps)
    assert covers(alloc, len(row))
    assert value == min_bundle([F(v) for v in row], alloc)
    assert value <= mu
    if mu >= 0:
        assert value >= (1 - eps) * mu
    else:
        assert value >= mu / (1 - eps)


@given(st.lists(st.integers(10, 40), min_size=1, max_size=4),
       st.lists(st.integers(-2, 2), min_size=1, max_size=6),
       st.integers(2, 3), st.sampled_from([F(1, 4), F(1, 2)]))
def test_guarantee_with_small_items(big, small, n, eps):
    # a few large goods next to tiny goods and chores exercise drain, bag-fill
    # and the goods-only reduction
    row = big + small
    assume(sum(row) > 0)
    mu = exact_mms(row, n)[0]
    value, alloc = approx_mms(row, n, eps)
    assert covers(alloc, len(row))
    assert (1 - eps) * mu <= value <= mu


def test_deterministic():
    row = [7, -3, 5, 5, 1, 2, -1]
    assert approx_mms(row, 3, F(1, 10)) == approx_mms(row, 3, F(1, 10))


def test_budget_guard():
    with pytest.raises(BudgetExceededError):
        approx_mms_nonneg(list(range(1, 16)), 3, F(1, 10), big_budget=100)


# big sets and B-sets

def test_split_big_small_partitions_items():
    values = normalize_row([40, 1, -1, 8], 2)  # 1 and -1 scale to 1/24
    split = split_big_small(values, F(1, 20))
    assert split.big | split.small_goods | split.small_chores == {0, 1, 2, 3}
    assert split.big == {0, 3}
    assert all(abs(values[j]) < split.threshold for j in split.small_goods | split.small_chores)


@pytest.mark.parametrize("values, want", [
    ([F(3, 2), 1, F(1, 2), F(-1, 4)], ((0,), (1,), (2,), (3,))),
    ([F(4, 5)], ((), (0,), (), ())),
    ([0], ((), (), (0,), ())),
])
def test_classify_bsets(values, want):
    b = classify_bsets(values, F(1, 5))
    assert (b.b1, b.b2, b.b3, b.b4) == want


@given(st.lists(st.integers(-20, 20), min_size=2, max_size=8), st.integers(2, 3),
       st.sampled_from([F(1, 10), F(1, 4)]))
def test_big_size_bound(row, n, eps):
    inst = Instance.from_rows([row])
    tau = F(1, 4)
    total = sum(row)
    c = classify_items(inst)
    assume(total != 0 and abs(total) >= tau * min(c.v_plus[0], c.v_minus[0]))
    values = normalize_row(row, n)
    split = split_big_small(values, eps / 2)
    big_goods = [j for j in split.big if values[j] >= 0]
    big_chores = [j for j in split.big if values[j] < 0]
    if total > 0:
        assert len(big_goods) <= 2 * n * (1 + tau) / (eps * tau)
        assert len(big_chores) <= 2 * n / (eps * tau)


# partition validity

def test_partition_valid_without_big_chores():
    values = [F(1, 2)] * 4
    split = BigSmallSplit(frozenset(range(4)), frozenset(), frozenset(), F(1, 20))
    assert is_partition_valid(values, [[0, 1], [2, 3]], split, F(1, 10))


def test_partition_valid_when_b4_empty():
    values = [F(3, 2), F(1, 2)]
    split = BigSmallSplit(frozenset({0, 1}), frozenset(), frozenset(), F(1, 20))
    assert is_partition_valid(values, [[0], [1]], split, F(1, 10))


def test_partition_invalid():
    # bundle values 5/2 (B1) and -1/2 (B4); nothing small to rescue the B4 bundle
    values = [F(5, 2), F(-1, 2)]
    split = BigSmallSplit(frozenset({0, 1}), frozenset(), frozenset(), F(1, 20))
    assert not is_partition_valid(values, [[0], [1]], split, F(1, 10))


# Bag-Fill

def test_bag_fill_twenty_goods():
    values = [F(1, 10)] * 20
    alloc = bag_fill(values, [[], []], range(20), F(1, 5), 1)
    assert all(sum(values[j] for j in b) >= F(4, 5) for b in alloc.bundles)


def test_bag_fill_already_full():
    alloc = bag_fill([F(1)], [[0]], [], F(1, 10), 1)
    assert alloc.bundles == (frozenset({0}),)
    # a lone bag worth 1 - eps is below both total requirements
    for cs in (1, 2):
        with pytest.raises(BagFillPreconditionError):
            bag_fill([F(9, 10)], [[0]], [], F(1, 10), cs)


def test_bag_fill_item_cap_boundary():
    values = [F(1, 5)] * 10
    with pytest.raises(BagFillPreconditionError) as info:
        bag_fill(values, [[], []], range(10), F(1, 5), 1)
    assert info.value.condition == "item_cap"


def test_bag_fill_rejects_short_total_and_full_bags():
    with pytest.raises(BagFillPreconditionError) as info:
        bag_fill([F(1, 20)] * 10, [[], []], range(10), F(1, 5), 1)
    assert info.value.condition == "total"
    with pytest.raises(BagFillPreconditionError) as info:
        bag_fill([F(3, 2)] + [F(1, 20)] * 10, [[0], []], range(1, 11), F(1, 5), 1)
    assert info.value.condition == "bag_cap"


# goods-only

def test_goods_only_examples():
    alloc = goods_only_mms([1, 1, 1], 3, F(1, 10))
    assert min_bundle([1, 1, 1], alloc) == 1
    alloc = goods_only_mms([4, 3, 3, 2], 2, F(1, 10))
    assert min_bundle([4, 3, 3, 2], alloc) >= F(9, 10) * 6
    assert min_bundle([1], goods_only_mms([1], 3, F(1, 10))) == 0


@given(st.lists(st.integers(0, 40), min_size=1, max_size=7), st.integers(2, 3),
       st.sampled_from([F(1, 10), F(1, 4)]))
def test_goods_only_rounding_backend(row, n, eps):
    # budget 0 forces the bucket-rounding search
    alloc = goods_only_mms(row, n, eps, budget=0)
    assert covers(alloc, len(row))
    assert min_bundle(row, alloc) >= (1 - eps) * exact_mms(row, n)[0]


def test_canonical_assignments_cover_partitions():
    def canon(a):
        seen = {}
        return tuple(seen.setdefault(x, len(seen)) for x in a)
    for n in range(1, 4):
        for size in range(5):
            want = sorted({canon(a) for a in itertools.product(range(n), repeat=size)})
            assert list(canonical_assignments(n, size)) == want
