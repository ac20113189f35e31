"""The compiled and pure-Python kernels against each other and a naive sweep."""
import itertools

import pytest
from hypothesis import given, strategies as st

from manna import kernel
from manna.kernel import _ckernel, _pykernel

needs_c = pytest.mark.skipif(_ckernel is None, reason="compiled kernel not built")

rows_st = st.integers(1, 3).flatmap(lambda n: st.integers(1, 6).flatmap(
    lambda m: st.lists(st.lists(st.integers(-9, 9), min_size=m, max_size=m),
                       min_size=n, max_size=n)))


def naive(rows, key):
    n, m = len(rows), len(rows[0])
    best = None
    for a in itertools.product(range(n), repeat=m):
        sums = [0] * n
        for j, k in enumerate(a):
            sums[k] += rows[k][j]
        score = key(sums)
        if score is not None and (best is None or score > best[0]):
            best = (score, list(a))
    return best


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=7), st.integers(1, 3))
def test_max_min_partition_matches_naive(weights, n):
    want = naive([weights] * n, min)
    for impl in filter(None, (_pykernel, _ckernel)):
        value, assignment = impl.max_min_partition(weights, n, fix_first=False)
        assert (value, list(assignment)) == want
        pinned, _ = impl.max_min_partition(weights, n, fix_first=True)
        assert pinned == value


@needs_c
@given(rows_st, st.data())
def test_best_ratio_backends_agree(rows, data):
    mms = [data.draw(st.integers(-5, 5)) for _ in rows]
    p = _pykernel.best_ratio(rows, mms)
    c = _ckernel.best_ratio(rows, mms)
    assert (p[0] * c[1], list(p[2])) == (c[0] * p[1], list(c[2]))


@needs_c
@given(rows_st, st.data())
def test_find_dominator_backends_agree(rows, data):
    lo = [data.draw(st.integers(-10, 10)) for _ in rows]
    strict = [x + data.draw(st.integers(0, 3)) for x in lo]
    p = _pykernel.find_dominator(rows, lo, strict)
    c = _ckernel.find_dominator(rows, lo, strict)
    assert (p and list(p)) == (c and list(c))


@given(rows_st, st.data())
def test_best_feasible_matches_naive(rows, data):
    need = [data.draw(st.integers(-10, 12)) for _ in rows]
    want = naive(rows, lambda s: sum(s) if all(x >= y for x, y in zip(s, need)) else None)
    for impl in filter(None, (_pykernel, _ckernel)):
        got = impl.best_feasible(rows, need)
        assert (got and (got[0], list(got[1]))) == want


@given(rows_st, st.data())
def test_best_feasible_with_prefix(rows, data):
    n, m = len(rows), len(rows[0])
    prefix = tuple(data.draw(st.lists(st.integers(0, n - 1), max_size=m)))
    need = [data.draw(st.integers(-10, 12)) for _ in rows]
    best = None
    for tail in itertools.product(range(n), repeat=m - len(prefix)):
        a = prefix + tail
        sums = [0] * n
        for j, k in enumerate(a):
            sums[k] += rows[k][j]
        if all(x >= y for x, y in zip(sums, need)) and (best is None or sum(sums) > best[0]):
            best = (sum(sums), list(a))
    got = kernel.best_feasible(rows, need, prefix)
    assert (got and (got[0], list(got[1]))) == best


def test_dispatcher_falls_back_on_huge_integers():
    huge = 1 << 70
    value, assignment = kernel.max_min_partition([huge, huge, 1], 2)
    assert value == huge


def test_backend_name():
    assert kernel.BACKEND in {"cython", "python"}
