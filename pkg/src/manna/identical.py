"""Approximate maximin share for a single valuation split into n bundles.

The row is rescaled so that its total is n (or -n). Items at least a
threshold in absolute value are "big" and every placement of them into
bundles is tried; the remaining "small" items are placed greedily.

Non-negative totals: big partitions are classified by bundle value into
four classes (above 1, within [1-eps, 1], within [0, 1-eps), negative),
small chores are drained into bundles above 1, and the leftovers are
completed either by bag filling or by a goods-only max-min subproblem.
Negative totals: small goods go to the poorest bundle, then small chores to
the richest.

Internally every value is an integer multiple of a common unit chosen so
that all thresholds are integers too; comparisons stay exact and cheap.
"""
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from . import kernel
from .core import Allocation, to_rational
from .errors import (BagFillPreconditionError, BudgetExceededError,
                     InvariantViolation, ParameterError)

DEFAULT_BIG_BUDGET = 20_000_000
GOODS_ONLY_EXACT_LIMIT = 1_000_000


@dataclass(frozen=True)
class BigSmallSplit:
    big: frozenset
    small_goods: frozenset
    small_chores: frozenset
    threshold: Fraction


@dataclass(frozen=True)
class BSets:
    b1: Tuple[int, ...]
    b2: Tuple[int, ...]
    b3: Tuple[int, ...]
    b4: Tuple[int, ...]


def _check_epsilon(epsilon):
    epsilon = to_rational(epsilon, "epsilon")
    if not 0 < epsilon < 1:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    return epsilon


def _lcm_dens(values):
    scale = 1
    for v in values:
        scale = math.lcm(scale, Fraction(v).denominator)
    return scale


class _Domain:
    """Integer image of a row: ``v[j] / unit`` is the normalized value."""

    def __init__(self, ints, unit, epsilon):
        self.v = ints
        self.unit = unit
        self.eps = int(epsilon * unit)
        self.half = int(epsilon * unit / 2)
        self.low = unit - self.eps  # 1 - eps
        self.epsilon = epsilon

    @classmethod
    def from_raw(cls, values, n, epsilon, extra=()):
        """Normalize a raw row to total +-n and scale to integers."""
        dens = _lcm_dens([epsilon, epsilon / 2, *extra])
        scale = _lcm_dens(values)
        ints = [int(v * scale) for v in values]
        total = abs(sum(ints))
        return cls([w * n * dens for w in ints], total * dens, epsilon)

    @classmethod
    def from_normalized(cls, values, epsilon):
        scale = _lcm_dens(list(values) + [epsilon, epsilon / 2])
        return cls([int(v * scale) for v in values], scale, epsilon)


def normalize_row(values: Sequence, n: int) -> List[Fraction]:
    """Scale a row so that its absolute total is n (zero rows unchanged)."""
    values = [to_rational(v) for v in values]
    total = sum(values, Fraction(0))
    if total == 0:
        return values
    c = Fraction(n) / abs(total)
    return [c * v for v in values]


def split_big_small(values: Sequence, threshold) -> BigSmallSplit:
    """Split items of an already normalized row at ``threshold``."""
    threshold = to_rational(threshold)
    big = frozenset(j for j, v in enumerate(values) if abs(v) >= threshold)
    goods = frozenset(j for j, v in enumerate(values) if j not in big and v >= 0)
    chores = frozenset(j for j, v in enumerate(values) if j not in big and v < 0)
    return BigSmallSplit(big, goods, chores, threshold)


def classify_bsets(bundle_values: Sequence, epsilon) -> BSets:
    """Classify bundles by value: >1, [1-eps, 1], [0, 1-eps), <0.

    >>> classify_bsets([Fraction(3, 2), 1, Fraction(1, 2), Fraction(-1, 4)], Fraction(1, 5))
    BSets(b1=(0,), b2=(1,), b3=(2,), b4=(3,))
    """
    epsilon = to_rational(epsilon, "epsilon")
    sets = _bsets([to_rational(v) for v in bundle_values], 1, 1 - epsilon)
    return BSets(*(tuple(s) for s in sets))


def _bsets(sums, unit, low):
    b1, b2, b3, b4 = [], [], [], []
    for k, s in enumerate(sums):
        if s > unit:
            b1.append(k)
        elif s >= low:
            b2.append(k)
        elif s >= 0:
            b3.append(k)
        else:
            b4.append(k)
    return b1, b2, b3, b4


# Bag filling ---------------------------------------------------------------

def _bag_fill(dom, bags, sums, smalls, condition_set):
    """Fill ``bags`` (lists of items, modified in place) from ``smalls``."""
    v, unit = dom.v, dom.unit
    n = len(bags)
    if condition_set == 1:
        need_total, bag_cap, item_cap = n * unit, unit, dom.eps
    elif condition_set == 2:
        need_total, bag_cap, item_cap = n * (unit - dom.half), unit - dom.half, dom.half
    else:
        raise ParameterError("condition_set must be 1 or 2")
    total = sum(sums) + sum(v[j] for j in smalls)
    if total < need_total:
        raise BagFillPreconditionError(
            "total", f"items are worth {Fraction(total, unit)}, "
                     f"need at least {Fraction(need_total, unit)}")
    for k, s in enumerate(sums):
        if s > bag_cap:
            raise BagFillPreconditionError(
                "bag_cap", f"bag {k} is worth {Fraction(s, unit)} > {Fraction(bag_cap, unit)}")
    for j in smalls:
        if abs(v[j]) >= item_cap:
            raise BagFillPreconditionError(
                "item_cap", f"small item {j} has |value| {Fraction(abs(v[j]), unit)}"
                            f" >= {Fraction(item_cap, unit)}")
    if n == 0:
        if smalls:
            raise BagFillPreconditionError("bags", "no bags to put small items in")
        return bags
    # values never change, so "argmin of the remaining items" is a queue
    queue = sorted(smalls, key=lambda j: (v[j], j))
    pos = 0
    for k in range(n - 1):
        while sums[k] < dom.low:
            if pos == len(queue):
                raise InvariantViolation("bag-fill ran out of small items")
            j = queue[pos]
            pos += 1
            bags[k].append(j)
            sums[k] += v[j]
    for j in queue[pos:]:
        bags[-1].append(j)
        sums[-1] += v[j]
    if any(s < dom.low for s in sums):
        raise InvariantViolation("bag-fill produced a bag below 1 - epsilon")
    return bags


def bag_fill(values: Sequence, bags: Sequence, smalls, epsilon, condition_set: int
             ) -> Allocation:
    """Greedy completion of ``bags`` until each is worth at least 1 - epsilon.

    Args:
        values: item values on the normalized scale (bags compared against 1).
        bags: initial bundles, one per agent, as item collections.
        smalls: items to distribute.
        epsilon: accuracy in (0, 1).
        condition_set: 1 (total >= n, bags <= 1, items below epsilon) or
            2 (total >= n(1 - eps/2), bags <= 1 - eps/2, items below eps/2).

    Returns:
        The filled bags; bag k of the input is bundle k of the output.
    """
    epsilon = _check_epsilon(epsilon)
    values = [to_rational(x) for x in values]
    dom = _Domain.from_normalized(values, epsilon)
    bag_lists = [sorted(b) for b in bags]
    sums = [sum(dom.v[j] for j in b) for b in bag_lists]
    _bag_fill(dom, bag_lists, sums, sorted(smalls), condition_set)
    return Allocation.from_bundles(bag_lists)


# Goods-only subproblem -----------------------------------------------------

def _bucket_exponent(value, base):
    """Largest k with base**k <= value (value > 0, base > 1)."""
    k = math.floor(math.log(value) / math.log(base))
    while base ** k > value:
        k -= 1
    while base ** (k + 1) <= value:
        k += 1
    return k


def _goods_only_dp(values, n, epsilon):
    """Max-min over bucket-rounded values; returns an owner per item.

    Each positive value is rounded down to a power of (1 + eps/4), so the
    optimum of the rounded problem is within a factor 1 - eps/4 of the true
    one. Items in the same bucket are interchangeable, which lets the search
    run over count vectors instead of item sets.
    """
    base = 1 + Fraction(epsilon) / 4
    buckets = {}
    zeros = []
    for j, x in enumerate(values):
        if x <= 0:
            zeros.append(j)
        else:
            buckets.setdefault(_bucket_exponent(Fraction(x), base), []).append(j)
    keys = sorted(buckets, reverse=True)
    worth = [base ** key for key in keys]
    counts = tuple(len(buckets[key]) for key in keys)

    def value_of(vec):
        return sum((c * w for c, w in zip(vec, worth)), Fraction(0))

    @lru_cache(maxsize=None)
    def best(bundles, rem):
        if bundles == 1:
            return value_of(rem), (rem,)
        top, plan = None, None
        for sub in itertools.product(*(range(c + 1) for c in rem)):
            rest = tuple(r - s for r, s in zip(rem, sub))
            below, below_plan = best(bundles - 1, rest)
            score = min(value_of(sub), below)
            if top is None or score > top:
                top, plan = score, (sub,) + below_plan
        return top, plan

    _, plan = best(n, counts)
    owner = [0] * len(values)
    pools = [list(buckets[key]) for key in keys]
    for k, vec in enumerate(plan):
        for t, c in enumerate(vec):
            for _ in range(c):
                owner[pools[t].pop(0)] = k
    for j in zeros:
        owner[j] = 0
    return owner


@lru_cache(maxsize=4096)
def _goods_only_assignment(values, n, epsilon, limit):
    m = len(values)
    if m == 0:
        return ()
    if n == 1:
        return (0,) * m
    if n ** (m - 1) <= limit:
        _, assignment = kernel.max_min_partition(list(values), n, fix_first=True)
        return tuple(assignment)
    return tuple(_goods_only_dp(values, n, epsilon))


def goods_only_mms(values: Sequence, n: int, epsilon, budget: Optional[int] = None
                   ) -> Allocation:
    """Max-min split of nonnegative values, within 1 - epsilon of optimal.

    Exhaustive when n**(m-1) fits the budget, bucket-rounding search otherwise.

    >>> sorted(sorted(b) for b in goods_only_mms([4, 3, 3, 2], 2, Fraction(1, 10)).bundles)
    [[0, 3], [1, 2]]
    """
    epsilon = _check_epsilon(epsilon)
    if n < 1:
        raise ParameterError("n must be at least 1")
    values = [to_rational(v) for v in values]
    if any(v < 0 for v in values):
        raise ParameterError("goods_only_mms needs nonnegative values")
    scale = _lcm_dens(values)
    ints = tuple(int(v * scale) for v in values)
    limit = GOODS_ONLY_EXACT_LIMIT if budget is None else budget
    return Allocation.from_assignment(_goods_only_assignment(ints, n, epsilon, limit), n)


# Non-negative total --------------------------------------------------------

def _drain(dom, bundles, sums, chores):
    """Move small chores into bundles worth more than 1 while both exist."""
    chores = list(chores)
    while chores:
        k = next((k for k, s in enumerate(sums) if s > dom.unit), None)
        if k is None:
            break
        j = chores.pop(0)
        bundles[k].append(j)
        sums[k] += dom.v[j]
        if sums[k] < dom.unit - dom.half:
            raise InvariantViolation("a drained bundle fell below 1 - epsilon/2")
    return chores


def _complete_partition(dom, bundles, sums, small_goods, small_chores, limit):
    """Finish one big partition; returns the bundles or None if invalid."""
    v = dom.v
    chores = _drain(dom, bundles, sums, small_chores)
    b1, _, b3, b4 = _bsets(sums, dom.unit, dom.low)
    if not b1:
        return _bag_fill(dom, bundles, sums, chores + list(small_goods), 1)
    # b1 nonempty means the drain used up every small chore
    if b4:
        agents = b3 + b4
        worth = sum(sums[k] for k in agents) + sum(v[j] for j in small_goods)
        if worth < len(agents) * (dom.unit - dom.half):
            return None
        sub_bags = [bundles[k] for k in agents]
        _bag_fill(dom, sub_bags, [sums[k] for k in agents], list(small_goods), 2)
        return bundles
    if not b3:
        if small_goods:
            k = min(range(len(sums)), key=lambda k: (sums[k], k))
            bundles[k].extend(small_goods)
        return bundles
    # goods-only subproblem: one pseudo item per b3 bundle, then the small goods
    pseudo = [sums[k] for k in b3] + [v[j] for j in small_goods]
    owner = _goods_only_assignment(tuple(pseudo), len(b3), dom.epsilon, limit)
    merged = [[] for _ in b3]
    for idx, target in enumerate(owner):
        if idx < len(b3):
            merged[target].extend(bundles[b3[idx]])
        else:
            merged[target].append(small_goods[idx - len(b3)])
    for k, items in zip(b3, merged):
        bundles[k] = items
    return bundles


def canonical_assignments(n, size):
    """Assignments of ``size`` items to ``n`` interchangeable bags.

    Only the lexicographically first labelling of each set partition is
    produced (item 0 in bag 0, a new bag opens only after all lower ones),
    in lexicographic order.

    >>> list(canonical_assignments(2, 3))
    [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)]
    """
    if size == 0:
        yield ()
        return
    a = [0] * size
    top = [0] * size  # highest label among a[:j+1]
    while True:
        yield tuple(a)
        j = size - 1
        while j > 0 and (a[j] == n - 1 or a[j] > top[j - 1]):
            j -= 1
        if j == 0:
            return
        a[j] += 1
        top[j] = max(top[j - 1], a[j])
        for t in range(j + 1, size):
            a[t] = 0
            top[t] = top[j]


def _bundles_of(owners, n):
    bundles = [[] for _ in range(n)]
    for j, k in enumerate(owners):
        bundles[k].append(j)
    return bundles


def _enumerate_big(n, big, budget, what):
    budget = DEFAULT_BIG_BUDGET if budget is None else budget
    count = n ** len(big)
    if count > budget:
        raise BudgetExceededError(count, budget, f"{what} ({len(big)} big items)")
    return canonical_assignments(n, len(big))


def _nonneg_bundles(dom, n, big_budget, limit=GOODS_ONLY_EXACT_LIMIT):
    v = dom.v
    m = len(v)
    big = [j for j in range(m) if abs(v[j]) >= dom.half]
    small_goods = [j for j in range(m) if abs(v[j]) < dom.half and v[j] >= 0]
    small_chores = [j for j in range(m) if abs(v[j]) < dom.half and v[j] < 0]
    enumeration = _enumerate_big(n, big, big_budget, "approx_mms_nonneg")
    if len(big) == m:
        # nothing to complete: the sweep is exactly a max-min partition
        _, owners = kernel.max_min_partition(v, n, fix_first=True)
        return _bundles_of(owners, n)
    best, best_value = None, None
    for owners in enumeration:
        bundles = [[] for _ in range(n)]
        sums = [0] * n
        for j, k in zip(big, owners):
            bundles[k].append(j)
            sums[k] += v[j]
        done = _complete_partition(dom, bundles, sums, small_goods, small_chores, limit)
        if done is None:
            continue
        value = min(sum(v[j] for j in b) for b in done)
        if best is None or value > best_value:
            best, best_value = done, value
            if value >= dom.unit:  # nothing beats the average
                break
    if best is None:
        raise InvariantViolation("every big partition was invalid")
    return best


def approx_mms_nonneg(values: Sequence, n: int, epsilon, big_budget: Optional[int] = None
                      ) -> Allocation:
    """Partition with min bundle at least (1 - epsilon) MMS, for v(M) >= 0."""
    epsilon = _check_epsilon(epsilon)
    values = [to_rational(x) for x in values]
    if sum(values, Fraction(0)) < 0:
        raise ParameterError("approx_mms_nonneg needs a nonnegative total")
    if sum(values, Fraction(0)) == 0:
        return Allocation.from_bundles([range(len(values))] + [()] * (n - 1))
    dom = _Domain.from_raw(values, n, epsilon)
    return Allocation.from_bundles(_nonneg_bundles(dom, n, big_budget))


# Negative total ------------------------------------------------------------

def negative_threshold(epsilon) -> Fraction:
    """Big-item threshold 1/(1 - eps) - 1 used when the total is negative."""
    return 1 / (1 - Fraction(epsilon)) - 1


def approx_mms_negative(values: Sequence, n: int, epsilon, big_budget: Optional[int] = None
                        ) -> Allocation:
    """Partition with min bundle at least MMS / (1 - epsilon), for v(M) < 0."""
    epsilon = _check_epsilon(epsilon)
    values = [to_rational(x) for x in values]
    if sum(values, Fraction(0)) >= 0:
        raise ParameterError("approx_mms_negative needs a negative total")
    sigma = negative_threshold(epsilon)
    dom = _Domain.from_raw(values, n, epsilon, extra=(sigma,))
    v = dom.v
    cut = int(sigma * dom.unit)
    m = len(v)
    big = [j for j in range(m) if abs(v[j]) >= cut]
    goods = [j for j in range(m) if abs(v[j]) < cut and v[j] >= 0]
    chores = [j for j in range(m) if abs(v[j]) < cut and v[j] < 0]
    agents = range(n)
    enumeration = _enumerate_big(n, big, big_budget, "approx_mms_negative")
    if len(big) == m:
        _, owners = kernel.max_min_partition(v, n, fix_first=True)
        return Allocation.from_bundles(_bundles_of(owners, n))
    best, best_value = None, None
    for owners in enumeration:
        bundles = [[] for _ in agents]
        sums = [0] * n
        for j, k in zip(big, owners):
            bundles[k].append(j)
            sums[k] += v[j]
        for j in goods:
            k = min(agents, key=lambda k: (sums[k], k))
            bundles[k].append(j)
            sums[k] += v[j]
        for j in chores:
            k = max(agents, key=lambda k: (sums[k], -k))
            bundles[k].append(j)
            sums[k] += v[j]
        value = min(sums)
        if best is None or value > best_value:
            best, best_value = bundles, value
            if value >= -dom.unit:
                break
    return Allocation.from_bundles(best)


def approx_mms(values: Sequence, n: int, epsilon, big_budget: Optional[int] = None
               ) -> Tuple[Fraction, Allocation]:
    """Approximate MMS value of a row, with the partition achieving it.

    The value is on the caller's scale and is the minimum bundle value of
    the returned partition, so it never exceeds the true MMS.

    >>> approx_mms([1, 1], 2, Fraction(1, 10))[0]
    Fraction(1, 1)
    """
    epsilon = _check_epsilon(epsilon)
    if n < 1:
        raise ParameterError("n must be at least 1")
    return _approx_mms_cached(tuple(to_rational(x) for x in values), n, epsilon, big_budget)


@lru_cache(maxsize=1024)
def _approx_mms_cached(values, n, epsilon, big_budget):
    # rows repeat across agents and across solver calls, and the work is pure
    total = sum(values, Fraction(0))
    if total == 0:
        alloc = Allocation.from_bundles([range(len(values))] + [()] * (n - 1))
    elif total > 0:
        alloc = approx_mms_nonneg(values, n, epsilon, big_budget)
    else:
        alloc = approx_mms_negative(values, n, epsilon, big_budget)
    value = min(sum((values[j] for j in b), Fraction(0)) for b in alloc.bundles)
    return value, alloc


def is_partition_valid(values: Sequence, big_partition: Sequence, small_split: BigSmallSplit,
                       epsilon) -> bool:
    """Whether a big partition survives the drain-then-classify filter.

    ``values`` are normalized; ``big_partition`` lists the big items of each
    bundle.
    """
    epsilon = _check_epsilon(epsilon)
    values = [to_rational(x) for x in values]
    dom = _Domain.from_normalized(values, epsilon)
    bundles = [sorted(b) for b in big_partition]
    sums = [sum(dom.v[j] for j in b) for b in bundles]
    _drain(dom, bundles, sums, sorted(small_split.small_chores))
    b1, _, b3, b4 = _bsets(sums, dom.unit, dom.low)
    if not (b1 and b4):
        return True
    agents = b3 + b4
    worth = sum(sums[k] for k in agents) + sum(dom.v[j] for j in small_split.small_goods)
    return worth >= len(agents) * (dom.unit - dom.half)
