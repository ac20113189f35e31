# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the routines in _pykernel, over 64-bit integers.

The dispatcher only calls these when every intermediate fits comfortably in
int64 (products included), so results match the Python versions exactly.
"""
from libc.stdlib cimport malloc, free

ctypedef long long i64


cdef inline void _ratio(i64 v, i64 mu, i64 *p, i64 *q):
    if mu > 0:
        if v < 0:
            p[0] = 0; q[0] = 1
        elif v < mu:
            p[0] = v; q[0] = mu
        else:
            p[0] = 1; q[0] = 1
    elif mu == 0:
        p[0] = 1 if v >= 0 else 0
        q[0] = 1
    elif v >= mu:
        p[0] = 1; q[0] = 1
    else:
        p[0] = -mu; q[0] = -v


def max_min_partition(weights, int n, bint fix_first=False):
    cdef Py_ssize_t m = len(weights)
    if m == 0:
        return 0, []
    cdef i64 *w = <i64 *> malloc(m * sizeof(i64))
    cdef i64 *sums = <i64 *> malloc(n * sizeof(i64))
    cdef int *a = <int *> malloc(m * sizeof(int))
    cdef int *best_a = <int *> malloc(m * sizeof(int))
    cdef Py_ssize_t j, start = 1 if fix_first else 0
    cdef int k, b, last = n - 1
    cdef i64 cur, best, total = 0
    try:
        for j in range(m):
            w[j] = weights[j]
            total += w[j]
            a[j] = 0
            best_a[j] = 0
        for b in range(n):
            sums[b] = 0
        sums[0] = total
        best = total if n == 1 else (0 if total > 0 else total)
        while True:
            j = m - 1
            while j >= start:
                k = a[j]
                sums[k] -= w[j]
                if k < last:
                    sums[k + 1] += w[j]
                    a[j] = k + 1
                    break
                sums[0] += w[j]
                a[j] = 0
                j -= 1
            if j < start:
                break
            cur = sums[0]
            for b in range(1, n):
                if sums[b] < cur:
                    cur = sums[b]
            if cur > best:
                best = cur
                for j in range(m):
                    best_a[j] = a[j]
        return best, [best_a[j] for j in range(m)]
    finally:
        free(w); free(sums); free(a); free(best_a)


def best_ratio(rows, mms):
    cdef int n = len(rows)
    cdef Py_ssize_t m = len(rows[0])
    cdef i64 *r = <i64 *> malloc(n * m * sizeof(i64) + 1)
    cdef i64 *mu = <i64 *> malloc(n * sizeof(i64))
    cdef i64 *own = <i64 *> malloc(n * sizeof(i64))
    cdef int *a = <int *> malloc(m * sizeof(int) + 1)
    cdef int *best_a = <int *> malloc(m * sizeof(int) + 1)
    cdef Py_ssize_t j
    cdef int i, k, last = n - 1
    cdef i64 p, q, cn, cd, bn, bd
    try:
        for i in range(n):
            mu[i] = mms[i]
            own[i] = 0
            for j in range(m):
                r[i * m + j] = rows[i][j]
        for j in range(m):
            a[j] = 0
            best_a[j] = 0
            own[0] += r[j]
        bn = -1
        bd = 1
        while True:
            cn = 1; cd = 1
            for i in range(n):
                _ratio(own[i], mu[i], &p, &q)
                if p * cd < cn * q:
                    cn = p; cd = q
            if cn * bd > bn * cd:
                bn = cn; bd = cd
                for j in range(m):
                    best_a[j] = a[j]
                if bn >= bd:
                    break
            j = m - 1
            while j >= 0:
                k = a[j]
                own[k] -= r[k * m + j]
                if k < last:
                    own[k + 1] += r[(k + 1) * m + j]
                    a[j] = k + 1
                    break
                own[0] += r[j]
                a[j] = 0
                j -= 1
            if j < 0:
                break
        return bn, bd, [best_a[j] for j in range(m)]
    finally:
        free(r); free(mu); free(own); free(a); free(best_a)


def find_dominator(rows, lo, strict):
    cdef int n = len(rows)
    cdef Py_ssize_t m = len(rows[0])
    cdef i64 *r = <i64 *> malloc(n * m * sizeof(i64) + 1)
    cdef i64 *low = <i64 *> malloc(n * sizeof(i64))
    cdef i64 *hi = <i64 *> malloc(n * sizeof(i64))
    cdef i64 *own = <i64 *> malloc(n * sizeof(i64))
    cdef int *a = <int *> malloc(m * sizeof(int) + 1)
    cdef Py_ssize_t j
    cdef int i, k, last = n - 1
    cdef bint ok, strict_hit
    try:
        for i in range(n):
            low[i] = lo[i]
            hi[i] = strict[i]
            own[i] = 0
            for j in range(m):
                r[i * m + j] = rows[i][j]
        for j in range(m):
            a[j] = 0
            own[0] += r[j]
        while True:
            ok = True
            strict_hit = False
            for i in range(n):
                if own[i] < low[i]:
                    ok = False
                    break
                if own[i] >= hi[i]:
                    strict_hit = True
            if ok and strict_hit:
                return [a[j] for j in range(m)]
            j = m - 1
            while j >= 0:
                k = a[j]
                own[k] -= r[k * m + j]
                if k < last:
                    own[k + 1] += r[(k + 1) * m + j]
                    a[j] = k + 1
                    break
                own[0] += r[j]
                a[j] = 0
                j -= 1
            if j < 0:
                return None
    finally:
        free(r); free(low); free(hi); free(own); free(a)


def best_feasible(rows, need, prefix=()):
    cdef int n = len(rows)
    cdef Py_ssize_t m = len(rows[0])
    cdef Py_ssize_t p = len(prefix)
    cdef i64 *r = <i64 *> malloc(n * m * sizeof(i64) + 1)
    cdef i64 *reach = <i64 *> malloc(n * (m + 1) * sizeof(i64))
    cdef i64 *bound = <i64 *> malloc((m + 1) * sizeof(i64))
    cdef i64 *low = <i64 *> malloc(n * sizeof(i64))
    cdef i64 *sums = <i64 *> malloc(n * sizeof(i64))
    cdef int *a = <int *> malloc(m * sizeof(int) + 1)
    cdef int *best_a = <int *> malloc(m * sizeof(int) + 1)
    cdef Py_ssize_t j
    cdef int i, k
    cdef i64 v, top, welfare = 0, best = 0
    cdef bint found = False, ok
    try:
        for i in range(n):
            low[i] = need[i]
            sums[i] = 0
            reach[i * (m + 1) + m] = 0
            for j in range(m):
                r[i * m + j] = rows[i][j]
        bound[m] = 0
        for j in range(m - 1, -1, -1):
            top = r[j]
            for i in range(n):
                v = r[i * m + j]
                reach[i * (m + 1) + j] = reach[i * (m + 1) + j + 1] + (v if v > 0 else 0)
                if v > top:
                    top = v
            bound[j] = bound[j + 1] + top
        for j in range(m):
            a[j] = prefix[j] if j < p else -1
        for j in range(p):
            sums[a[j]] += r[a[j] * m + j]
            welfare += r[a[j] * m + j]
        for i in range(n):
            if sums[i] + reach[i * (m + 1) + p] < low[i]:
                return None
        if p == m:
            return welfare, [a[j] for j in range(m)]
        j = p
        while j >= p:
            if j == m:
                if not found or welfare > best:
                    found = True
                    best = welfare
                    for k in range(m):
                        best_a[k] = a[k]
                j -= 1
                continue
            k = a[j]
            if k >= 0:
                sums[k] -= r[k * m + j]
                welfare -= r[k * m + j]
            k += 1
            if k == n:
                a[j] = -1
                j -= 1
                continue
            a[j] = k
            sums[k] += r[k * m + j]
            welfare += r[k * m + j]
            if found and welfare + bound[j + 1] <= best:
                continue
            ok = True
            for i in range(n):
                if sums[i] + reach[i * (m + 1) + j + 1] < low[i]:
                    ok = False
                    break
            if ok:
                j += 1
        if not found:
            return None
        return best, [best_a[j] for j in range(m)]
    finally:
        free(r); free(reach); free(bound); free(low); free(sums); free(a); free(best_a)
