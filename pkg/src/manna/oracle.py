"""Brute-force reference answers for small instances.

Nothing here is clever on purpose: every routine enumerates all labelled
assignments. Rational rows are rescaled per agent to integers so the
enumeration kernel can work on machine words; the scaling is undone before
anything is returned.
"""
import itertools
import math
import os
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import kernel
from .core import Allocation, Instance, agent_values, to_rational
from .errors import BudgetExceededError

DEFAULT_BUDGET = 20_000_000


def default_budget() -> int:
    """Enumeration budget, overridable through ``MANNA_BUDGET``."""
    env = os.environ.get("MANNA_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def _check_budget(required, budget, what):
    budget = default_budget() if budget is None else budget
    if required > budget:
        raise BudgetExceededError(required, budget, what)


def integer_row(values: Sequence[Fraction], *extra: Fraction) -> Tuple[List[int], int]:
    """Scale a row (and any extra numbers) by the lcm of all denominators."""
    scale = 1
    for v in itertools.chain(values, extra):
        scale = math.lcm(scale, Fraction(v).denominator)
    return [int(Fraction(v) * scale) for v in values], scale


def exact_mms(values: Sequence, n: int, budget: Optional[int] = None
              ) -> Tuple[Fraction, Allocation]:
    """Maximin share of one valuation row split into ``n`` bundles.

    >>> exact_mms([5, 5, 4, 4], 2)[0]
    Fraction(9, 1)
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    values = [to_rational(v) for v in values]
    m = len(values)
    if m == 0:
        return Fraction(0), Allocation.from_bundles([()] * n)
    # Item 0 is pinned to bundle 0. The lexicographically first optimum of
    # the full enumeration already has item 0 in bundle 0 (relabel bundles),
    # so the pinned search returns the same witness.
    _check_budget(n ** (m - 1), budget, "exact_mms")
    ints, scale = integer_row(values)
    best, assignment = kernel.max_min_partition(ints, n, fix_first=True)
    return Fraction(best, scale), Allocation.from_assignment(assignment, n)


def _scaled_rows(inst, extras):
    rows, scales = [], []
    for i in range(inst.n):
        r, s = integer_row(inst.values[i], *extras[i])
        rows.append(r)
        scales.append(s)
    return rows, scales


def alpha_star_witness(inst: Instance, mms: Sequence, budget: Optional[int] = None
                       ) -> Tuple[Fraction, Allocation]:
    """Best achievable alpha (capped at 1) together with an allocation reaching it."""
    mms = [to_rational(x) for x in mms]
    if len(mms) != inst.n:
        raise ValueError(f"expected {inst.n} MMS values")
    _check_budget(inst.n ** inst.m, budget, "exact_alpha_star")
    rows, scales = _scaled_rows(inst, [(mu,) for mu in mms])
    scaled_mms = [int(mu * s) for mu, s in zip(mms, scales)]
    num, den, assignment = kernel.best_ratio(rows, scaled_mms)
    return Fraction(num, den), Allocation.from_assignment(assignment, inst.n)


def exact_alpha_star(inst: Instance, mms: Sequence, budget: Optional[int] = None) -> Fraction:
    return alpha_star_witness(inst, mms, budget)[0]


def _dominance_threshold(value, gamma):
    return (1 + gamma) * value if value >= 0 else value / (1 + gamma)


def gamma_dominates(inst: Instance, B: Allocation, A: Allocation, gamma) -> bool:
    gamma = to_rational(gamma, "gamma")
    strict = False
    for a, b in zip(agent_values(inst, A), agent_values(inst, B)):
        t = _dominance_threshold(a, gamma)
        if b < t:
            return False
        if b > t:
            strict = True
    return strict


def find_gamma_dominator(inst: Instance, A: Allocation, gamma,
                         budget: Optional[int] = None) -> Optional[Allocation]:
    """First allocation (in enumeration order) that gamma-dominates ``A``."""
    gamma = to_rational(gamma, "gamma")
    A.validate(inst.m, inst.n)
    _check_budget(inst.n ** inst.m, budget, "is_gamma_po")
    thresholds = [_dominance_threshold(a, gamma) for a in agent_values(inst, A)]
    rows, scales = _scaled_rows(inst, [()] * inst.n)
    lo, strict = [], []
    for t, s in zip(thresholds, scales):
        t = t * s
        lo.append(math.ceil(t))
        strict.append(math.floor(t) + 1)
    if inst.m == 0:
        return None
    assignment = kernel.find_dominator(rows, lo, strict)
    if assignment is None:
        return None
    return Allocation.from_assignment(assignment, inst.n)


def is_gamma_po(inst: Instance, A: Allocation, gamma, budget: Optional[int] = None) -> bool:
    return find_gamma_dominator(inst, A, gamma, budget) is None


def mms_all(inst: Instance, budget: Optional[int] = None) -> List[Fraction]:
    """Exact MMS of every agent."""
    return [exact_mms(inst.values[i], inst.n, budget)[0] for i in range(inst.n)]


def _solve_square(A, b):
    """Exact Gauss-Jordan solve of a square system; None when singular."""
    size = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for col in range(size):
        piv = next((r for r in range(col, size) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [v / p for v in M[col]]
        for r in range(size):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[r][size] for r in range(size)]


def _float_screen(A, b):
    """Cheap float solve used only to skip hopeless bases; None if singular."""
    size = len(A)
    M = [[float(v) for v in row] + [float(rhs)] for row, rhs in zip(A, b)]
    for col in range(size):
        piv = max(range(col, size), key=lambda r: abs(M[r][col]))
        if abs(M[piv][col]) < 1e-12:
            return None
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        M[col] = [v / p for v in M[col]]
        for r in range(size):
            if r != col and M[r][col] != 0.0:
                f = M[r][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[r][size] for r in range(size)]


def lp_vertex_optimum(spec) -> Optional[Fraction]:
    """Best objective over all vertices of the small-item LP, or None.

    A vertex fixes every variable outside a chosen support to zero and makes
    as many constraint rows tight as the support has variables. All such
    bases are enumerated; a float pre-screen only skips bases that are
    clearly singular or clearly infeasible, and every survivor is re-solved
    and re-checked exactly.
    """
    n, k = spec.n, spec.k
    nvar = n * k
    if nvar == 0:
        return Fraction(0) if all(ci <= 0 for ci in spec.c) else None
    # Constraint rows a . x <= b, built here rather than borrowed from the
    # solver so the two routes share nothing but the spec.
    le_rows = []
    for i in range(n):
        a = [Fraction(0)] * nvar
        for j in range(k):
            a[i * k + j] = -spec.values[i][j]
        le_rows.append((a, -spec.c[i]))
    for j in range(k):
        sign = -1 if spec.chores[j] else 1
        a = [Fraction(0)] * nvar
        for i in range(n):
            a[i * k + j] = Fraction(sign)
        le_rows.append((a, Fraction(sign)))
    weights = [spec.values[i][j] for i in range(n) for j in range(k)]
    fl_rows = [([float(v) for v in a], float(b)) for a, b in le_rows]
    best = None
    for t in range(min(len(le_rows), nvar) + 1):
        for tight in itertools.combinations(range(len(le_rows)), t):
            for support in itertools.combinations(range(nvar), t):
                A = [[le_rows[r][0][v] for v in support] for r in tight]
                b = [le_rows[r][1] for r in tight]
                approx = _float_screen(A, b) if t else []
                if approx is None or any(v < -1e-7 for v in approx):
                    continue
                if any(sum(a[v] * s for v, s in zip(support, approx)) > rhs + 1e-7
                       for a, rhs in fl_rows):
                    continue
                exact = _solve_square(A, b) if t else []
                if exact is None or any(v < 0 for v in exact):
                    continue
                flat = [Fraction(0)] * nvar
                for v, s in zip(support, exact):
                    flat[v] = s
                if any(sum((a[v] * flat[v] for v in support), Fraction(0)) > rhs
                       for a, rhs in le_rows):
                    continue
                value = sum((w * s for w, s in zip(weights, flat)), Fraction(0))
                if best is None or value > best:
                    best = value
    return best
