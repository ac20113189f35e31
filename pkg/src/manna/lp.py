"""Exact simplex for the fractional allocation of small items.

Given fixed bundles of big items, the LP decides how much of every small
item each agent takes. It maximizes total signed value subject to each
agent reaching a required amount ``c_i`` from small items, goods being used
at most once and chores being fully assigned.

The solver is a dense two-phase tableau simplex over Fractions with Bland's
rule, so it always terminates and never rounds.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class SmallLpSpec:
    """One LP instance.

    Attributes:
        values: ``values[i][j]`` is agent i's value for the j-th small item.
        c: per-agent requirement on value collected from small items.
        chores: ``chores[j]`` marks items that every agent values negatively.
        items: global indices of the small items, for the caller's benefit.
    """
    values: Tuple[Tuple[Fraction, ...], ...]
    c: Tuple[Fraction, ...]
    chores: Tuple[bool, ...]
    items: Tuple[int, ...] = ()

    def __post_init__(self):
        k = len(self.chores)
        if len(self.values) != len(self.c):
            raise ValueError("values and c disagree on the agent count")
        if any(len(row) != k for row in self.values):
            raise ValueError("every values row needs one entry per small item")
        if not self.items:
            object.__setattr__(self, "items", tuple(range(k)))
        elif len(self.items) != k:
            raise ValueError("items and chores disagree on the item count")
        for j, is_chore in enumerate(self.chores):
            negative = all(row[j] < 0 for row in self.values)
            if is_chore != negative:
                raise ValueError(f"item {j}: chore flag must match 'all agents value it < 0'")

    @classmethod
    def build(cls, values, c, items=()) -> "SmallLpSpec":
        values = tuple(tuple(Fraction(v) for v in row) for row in values)
        k = len(values[0]) if values else 0
        chores = tuple(bool(values) and all(row[j] < 0 for row in values) for j in range(k))
        return cls(values, tuple(Fraction(x) for x in c), chores, tuple(items))

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def k(self) -> int:
        return len(self.chores)

    def small_goods_of(self, agent):
        return frozenset(j for j, v in enumerate(self.values[agent]) if v >= 0)

    def small_chores_of(self, agent):
        return frozenset(j for j, v in enumerate(self.values[agent]) if v < 0)


@dataclass(frozen=True)
class FractionalAllocation:
    """``x[i][j]``: share of the j-th small item held by agent i."""
    x: Tuple[Tuple[Fraction, ...], ...]
    items: Tuple[int, ...]

    def share(self, agent, col):
        return self.x[agent][col]

    def column_total(self, col):
        return sum((row[col] for row in self.x), ZERO)


@dataclass(frozen=True)
class Infeasible:
    reason: str = "requirements cannot be met"


def lp_objective(spec: SmallLpSpec, x) -> Fraction:
    rows = x.x if isinstance(x, FractionalAllocation) else x
    if len(rows) != spec.n or any(len(r) != spec.k for r in rows):
        raise ValueError("x does not match the LP dimensions")
    return sum((v * s for vrow, xrow in zip(spec.values, rows) for v, s in zip(vrow, xrow)),
               ZERO)


def lp_constraints(spec: SmallLpSpec) -> List[Tuple[List[Fraction], str, Fraction]]:
    """Rows ``(coefficients, sense, rhs)`` over variables x[i][j] at i*k + j."""
    n, k = spec.n, spec.k
    rows = []
    for i in range(n):
        a = [ZERO] * (n * k)
        for j in range(k):
            a[i * k + j] = spec.values[i][j]
        rows.append((a, ">=", spec.c[i]))
    for j in range(k):
        a = [ZERO] * (n * k)
        for i in range(n):
            a[i * k + j] = ONE
        rows.append((a, ">=" if spec.chores[j] else "<=", ONE))
    return rows


def is_feasible_point(spec: SmallLpSpec, x) -> bool:
    flat = [s for row in x for s in row]
    if any(s < 0 for s in flat):
        return False
    for a, sense, b in lp_constraints(spec):
        lhs = sum((ai * xi for ai, xi in zip(a, flat)), ZERO)
        if (sense == ">=" and lhs < b) or (sense == "<=" and lhs > b):
            return False
    return True


class _Unbounded(Exception):
    pass


def _pivot(T, basis, r, col):
    row = T[r]
    p = row[col]
    if p != 1:
        T[r] = row = [v / p for v in row]
    for s, other in enumerate(T):
        if s != r:
            f = other[col]
            if f:
                T[s] = [a - f * b for a, b in zip(other, row)]
    basis[r] = col


def _optimize(T, basis, cost, banned):
    """Maximize ``cost`` over the tableau in place (Bland's rule)."""
    ncols = len(T[0]) - 1 if T else len(cost)
    while True:
        entering = None
        for col in range(ncols):
            if col in banned or col in basis:
                continue
            d = cost[col] - sum((cost[b] * T[r][col] for r, b in enumerate(basis)), ZERO)
            if d > 0:
                entering = col
                break
        if entering is None:
            return
        leave, best = None, None
        for r, row in enumerate(T):
            a = row[entering]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    leave, best = r, ratio
        if leave is None:
            raise _Unbounded()
        _pivot(T, basis, leave, entering)


def simplex_max(objective: Sequence[Fraction], rows) -> Optional[List[Fraction]]:
    """Maximize ``objective . x`` subject to ``rows`` and ``x >= 0``.

    Returns an optimal basic solution, or None when the LP is infeasible.
    """
    nvar = len(objective)
    flipped = {"<=": ">=", ">=": "<=", "=": "="}
    norm = []
    for a, sense, b in rows:
        if b < 0:
            a, sense, b = [-v for v in a], flipped[sense], -b
        norm.append((a, sense, b))
    n_slack = sum(1 for _, s, _ in norm if s != "=")
    n_art = sum(1 for _, s, _ in norm if s != "<=")
    width = nvar + n_slack + n_art
    T, basis, artificial = [], [], set()
    slack, art = nvar, nvar + n_slack
    for a, sense, b in norm:
        row = [Fraction(v) for v in a] + [ZERO] * (n_slack + n_art) + [Fraction(b)]
        if sense == "<=":
            row[slack] = ONE
            basis.append(slack)
            slack += 1
        else:
            if sense == ">=":
                row[slack] = -ONE
                slack += 1
            row[art] = ONE
            basis.append(art)
            artificial.add(art)
            art += 1
        T.append(row)

    if artificial:
        phase1 = [ZERO] * width
        for col in artificial:
            phase1[col] = -ONE
        _optimize(T, basis, phase1, banned=frozenset())
        if any(T[r][-1] > 0 for r, b in enumerate(basis) if b in artificial):
            return None
        keep = []
        for r, b in enumerate(basis):
            if b in artificial:
                col = next((c for c in range(width) if c not in artificial and T[r][c] != 0),
                           None)
                if col is None:
                    continue  # redundant row
                _pivot(T, basis, r, col)
            keep.append(r)
        T = [T[r] for r in keep]
        basis = [basis[r] for r in keep]

    cost = [Fraction(v) for v in objective] + [ZERO] * (n_slack + n_art)
    _optimize(T, basis, cost, banned=frozenset(artificial))
    x = [ZERO] * width
    for r, b in enumerate(basis):
        x[b] = T[r][-1]
    return x[:nvar]


def solve_small_lp(spec: SmallLpSpec):
    """Optimal vertex of the small-item LP, or :class:`Infeasible`.

    >>> spec = SmallLpSpec.build([[Fraction(1, 2)]], [Fraction(1, 4)])
    >>> solve_small_lp(spec).x
    ((Fraction(1, 1),),)
    """
    n, k = spec.n, spec.k
    if k == 0:
        if all(ci <= 0 for ci in spec.c):
            return FractionalAllocation(tuple(() for _ in range(n)), spec.items)
        return Infeasible()
    objective = [spec.values[i][j] for i in range(n) for j in range(k)]
    try:
        flat = simplex_max(objective, lp_constraints(spec))
    except _Unbounded:  # impossible for a well-formed spec: chores only hurt
        raise ValueError("small-item LP is unbounded; chore flags are inconsistent") from None
    if flat is None:
        return Infeasible()
    x = tuple(tuple(flat[i * k:(i + 1) * k]) for i in range(n))
    return FractionalAllocation(x, spec.items)
