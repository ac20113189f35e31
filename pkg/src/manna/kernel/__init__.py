"""Enumeration kernels with a compiled fast path.

The compiled module is used when it imported and the integers involved fit
in int64 with headroom; otherwise the pure-Python twin runs. Set
``MANNA_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

if os.environ.get("MANNA_PURE_PYTHON"):
    _ckernel = None

BACKEND = "cython" if _ckernel is not None else "python"

_SUM_LIMIT = 1 << 62
_PRODUCT_LIMIT = 1 << 31  # keeps cross-multiplied ratios below 2**62


def _abs_total(row):
    return sum(abs(x) for x in row)


def max_min_partition(weights, n, fix_first=False):
    weights = [int(w) for w in weights]
    if _ckernel is not None and _abs_total(weights) < _SUM_LIMIT:
        return _ckernel.max_min_partition(weights, n, fix_first)
    return _pykernel.max_min_partition(weights, n, fix_first)


def best_ratio(rows, mms):
    if _ckernel is not None and all(_abs_total(r) < _PRODUCT_LIMIT for r in rows):
        return _ckernel.best_ratio(rows, mms)
    return _pykernel.best_ratio(rows, mms)


def find_dominator(rows, lo, strict):
    bounds = [_abs_total(r) for r in rows]
    if any(low > b for low, b in zip(lo, bounds)):
        return None  # some agent can never reach its lower bound
    lo = [max(low, -b - 1) for low, b in zip(lo, bounds)]
    strict = [min(max(s, -b - 1), b + 1) for s, b in zip(strict, bounds)]
    if _ckernel is not None and all(b < _SUM_LIMIT for b in bounds):
        return _ckernel.find_dominator(rows, lo, strict)
    return _pykernel.find_dominator(rows, lo, strict)


def best_feasible(rows, need, prefix=()):
    """Max-welfare assignment meeting every lower bound, or None.

    Rows must share one scale so that welfare is a plain sum.
    """
    rows = [[int(v) for v in r] for r in rows]
    if not rows or not rows[0]:
        if all(x <= 0 for x in need):
            return 0, list(prefix)
        return None
    bounds = [_abs_total(r) for r in rows]
    if any(low > b for low, b in zip(need, bounds)):
        return None
    need = [max(int(low), -b) for low, b in zip(need, bounds)]
    if _ckernel is not None and sum(bounds) < _SUM_LIMIT:
        return _ckernel.best_feasible(rows, need, tuple(prefix))
    return _pykernel.best_feasible(rows, need, tuple(prefix))
