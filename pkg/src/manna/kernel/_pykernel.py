"""Pure-Python enumeration kernels (fallback for the compiled module).

All three routines walk the n**m assignment vectors in lexicographic order
(item 0 most significant) with an odometer, keeping per-bundle sums up to
date incrementally. Inputs are Python ints, so results are exact.
"""


def max_min_partition(weights, n, fix_first=False):
    """Best minimum bundle sum over all assignments of ``weights`` to n bundles.

    Returns ``(value, assignment)``; the assignment is the lexicographically
    first optimum. With ``fix_first`` item 0 stays in bundle 0.
    """
    m = len(weights)
    if m == 0:
        return 0, []
    sums = [0] * n
    sums[0] = sum(weights)
    a = [0] * m
    start = 1 if fix_first else 0
    best = min(sums)
    best_a = a[:]
    last = n - 1
    while True:
        j = m - 1
        while j >= start:
            k = a[j]
            w = weights[j]
            sums[k] -= w
            if k < last:
                sums[k + 1] += w
                a[j] = k + 1
                break
            sums[0] += w
            a[j] = 0
            j -= 1
        else:
            return best, best_a
        cur = min(sums)
        if cur > best:
            best = cur
            best_a = a[:]


def _ratio(v, mu):
    # (num, den) with den > 0, capped at 1
    if mu > 0:
        if v < 0:
            return 0, 1
        return (v, mu) if v < mu else (1, 1)
    if mu == 0:
        return (1, 1) if v >= 0 else (0, 1)
    if v >= mu:
        return 1, 1
    return -mu, -v


def best_ratio(rows, mms):
    """Max over allocations of the min per-agent MMS ratio, capped at 1.

    ``rows[i]`` and ``mms[i]`` are agent i's integer values and integer MMS on
    a common per-agent scale. Agent i receives bundle i. Returns
    ``(num, den, assignment)``.
    """
    n = len(rows)
    m = len(rows[0])
    own = [0] * n
    own[0] = sum(rows[0])
    a = [0] * m

    def current():
        bn, bd = 1, 1
        for i in range(n):
            p, q = _ratio(own[i], mms[i])
            if p * bd < bn * q:
                bn, bd = p, q
        return bn, bd

    best_n, best_d = current()
    best_a = a[:]
    if best_n >= best_d or m == 0:
        return best_n, best_d, best_a
    last = n - 1
    while True:
        j = m - 1
        while j >= 0:
            k = a[j]
            own[k] -= rows[k][j]
            if k < last:
                own[k + 1] += rows[k + 1][j]
                a[j] = k + 1
                break
            own[0] += rows[0][j]
            a[j] = 0
            j -= 1
        else:
            return best_n, best_d, best_a
        cn, cd = current()
        if cn * best_d > best_n * cd:
            best_n, best_d = cn, cd
            best_a = a[:]
            if best_n >= best_d:
                return best_n, best_d, best_a


def find_dominator(rows, lo, strict):
    """First assignment whose own-bundle sums meet every ``lo[i]`` and reach
    ``strict[i]`` for at least one agent, or None."""
    n = len(rows)
    m = len(rows[0])
    own = [0] * n
    own[0] = sum(rows[0])
    a = [0] * m
    agents = range(n)
    last = n - 1
    while True:
        if all(own[i] >= lo[i] for i in agents) and any(own[i] >= strict[i] for i in agents):
            return a[:]
        j = m - 1
        while j >= 0:
            k = a[j]
            own[k] -= rows[k][j]
            if k < last:
                own[k + 1] += rows[k + 1][j]
                a[j] = k + 1
                break
            own[0] += rows[0][j]
            a[j] = 0
            j -= 1
        else:
            return None


def _suffix_bounds(rows):
    n, m = len(rows), len(rows[0])
    reach = [[0] * (m + 1) for _ in range(n)]
    best = [0] * (m + 1)
    for j in range(m - 1, -1, -1):
        for i in range(n):
            reach[i][j] = reach[i][j + 1] + max(rows[i][j], 0)
        best[j] = best[j + 1] + max(rows[i][j] for i in range(n))
    return reach, best


def best_feasible(rows, need, prefix=()):
    """Welfare-maximizing assignment with every agent's sum at least ``need[i]``.

    Depth-first in lexicographic order with strict improvement, so ties go
    to the lexicographically first assignment. The first ``len(prefix)``
    items are pinned to the given owners. Returns ``(welfare, assignment)``
    or None when nothing is feasible.
    """
    n, m = len(rows), len(rows[0])
    reach, bound = _suffix_bounds(rows)
    p = len(prefix)
    a = list(prefix) + [-1] * (m - p)
    sums = [0] * n
    welfare = 0
    for j, k in enumerate(prefix):
        sums[k] += rows[k][j]
        welfare += rows[k][j]
    if any(sums[i] + reach[i][p] < need[i] for i in range(n)):
        return None
    if p == m:
        return welfare, a
    best, best_a = None, None
    j = p
    while j >= p:
        if j == m:
            if best is None or welfare > best:
                best, best_a = welfare, list(a)
            j -= 1
            continue
        k = a[j]
        if k >= 0:
            sums[k] -= rows[k][j]
            welfare -= rows[k][j]
        k += 1
        if k == n:
            a[j] = -1
            j -= 1
            continue
        a[j] = k
        sums[k] += rows[k][j]
        welfare += rows[k][j]
        if best is not None and welfare + bound[j + 1] <= best:
            continue
        if any(sums[i] + reach[i][j + 1] < need[i] for i in range(n)):
            continue
        j += 1
    return None if best is None else (best, best_a)
