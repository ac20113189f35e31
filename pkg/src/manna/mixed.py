"""(alpha - eps)-MMS and gamma-PO allocations of mixed goods and chores.

Outline of :func:`solve_alpha_mms_po`:

1. Agents who value everything at zero take the items every other agent
   dislikes and leave; the rest are rescaled to |v_i(M)| = n.
2. Each agent's MMS is approximated on the identical-agent problem.
3. Items that are large for some agent are "big". Every assignment of big
   items is tried; for each, an LP places the small items fractionally so
   every agent reaches its alpha share, maximizing total value.
4. The best fractional solution is rounded (see :mod:`manna.rounding`).
"""
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import kernel
from .core import (Allocation, Instance, SolverParams, check_tau_condition,
                   classify_items, normalize, welfare, welfare_max_allocation)
from .errors import BudgetExceededError, InvariantViolation, TauConditionError
from .identical import approx_mms
from .lp import FractionalAllocation, Infeasible, SmallLpSpec, solve_small_lp
from .oracle import integer_row
from .rounding import RoundingTrace, acyclify, gamma_po_fixup, round_fractional

ZERO = Fraction(0)


@dataclass(frozen=True)
class NoAlphaMms:
    """No alpha-MMS allocation exists (no big partition admits a completion)."""
    alpha: Fraction
    partitions_tried: int = 0


@dataclass(frozen=True)
class AgentMms:
    mu_tilde: Fraction
    sign: str
    epsilon_used: Fraction


@dataclass(frozen=True)
class MmsProfile:
    agents: Tuple[AgentMms, ...]

    def mu(self, i) -> Fraction:
        return self.agents[i].mu_tilde


@dataclass(frozen=True)
class RemovalPlan:
    """How zero-value agents were taken out before solving.

    ``kept_agents``/``kept_items`` map reduced indices back to the original
    instance; ``absorbed`` items all go to ``zero_agents[0]``.
    """
    zero_agents: Tuple[int, ...]
    kept_agents: Tuple[int, ...]
    kept_items: Tuple[int, ...]
    absorbed: Tuple[int, ...]


@dataclass(frozen=True)
class Preprocessed:
    trivial: bool
    epsilon: Fraction
    instance: Optional[Instance]  # reduced and normalized
    scales: Tuple[Fraction, ...]
    plan: RemovalPlan


@dataclass(frozen=True)
class BigSmallProfile:
    big_plus: Tuple[frozenset, ...]
    big_minus: Tuple[frozenset, ...]
    big: Tuple[int, ...]
    small: Tuple[int, ...]
    small_plus: Tuple[frozenset, ...]
    small_minus: Tuple[frozenset, ...]


@dataclass
class SolveTrace:
    """Optional record of one solver run, filled in when passed to the solver."""
    epsilon_used: Optional[Fraction] = None
    profile: Optional[MmsProfile] = None
    big_small: Optional[BigSmallProfile] = None
    partitions: int = 0
    chosen_partition: Optional[int] = None
    lp_welfare: Optional[Fraction] = None
    rounding: Optional[RoundingTrace] = None
    rounded_welfare: Optional[Fraction] = None
    fixup_changed: bool = False
    trivial: bool = False


# Preprocessing -------------------------------------------------------------

def preprocess(inst: Instance, params: SolverParams) -> Preprocessed:
    alpha, eps, gamma = params.alpha, params.epsilon, params.gamma
    everyone = tuple(range(inst.n))
    if alpha <= eps:
        plan = RemovalPlan((), everyone, tuple(range(inst.m)), ())
        return Preprocessed(True, eps, None, (), plan)
    eps = min(eps, gamma * alpha / (1 + gamma))

    kept = list(everyone)
    zero = []
    items = list(range(inst.m))
    while True:
        flat = [i for i in kept if sum((inst.values[i][j] for j in items), ZERO) == 0]
        if not flat:
            break
        for i in flat:
            if any(inst.values[i][j] != 0 for j in items):
                raise TauConditionError(
                    [i], f"agent {i} has total value 0 but nonzero entries")
        zero.extend(flat)
        kept = [i for i in kept if i not in flat]
        # items every remaining agent dislikes go to a zero-value agent
        if not kept:
            items = []
            break
        items = [j for j in range(inst.m) if any(inst.values[i][j] >= 0 for i in kept)]
    absorbed = tuple(j for j in range(inst.m) if j not in items) if zero else ()
    plan = RemovalPlan(tuple(sorted(zero)), tuple(kept), tuple(items), absorbed)
    if not kept:
        return Preprocessed(False, eps, None, (), plan)
    rows = tuple(tuple(inst.values[i][j] for j in items) for i in kept)
    reduced = Instance(rows, tuple(inst.items[j] for j in items))
    normalized, scales = normalize(reduced)
    return Preprocessed(False, eps, normalized, tuple(scales), plan)


def compute_mms_profile(inst: Instance, epsilon, big_budget: Optional[int] = None
                        ) -> MmsProfile:
    """Approximate MMS of every agent at accuracy epsilon/2 (normalized input)."""
    epsilon = Fraction(epsilon)
    entries = []
    for i in range(inst.n):
        mu, _ = approx_mms(inst.values[i], inst.n, epsilon / 2, big_budget)
        total = inst.total(i)
        if total >= 0 and mu > 1 or total < 0 and mu > -1:
            raise InvariantViolation(f"agent {i}: approximate MMS {mu} exceeds its bound")
        entries.append(AgentMms(mu, "nonneg" if total >= 0 else "neg", epsilon / 2))
    return MmsProfile(tuple(entries))


def classify_big_small(inst: Instance, profile: MmsProfile, epsilon) -> BigSmallProfile:
    n = inst.n
    epsilon = Fraction(epsilon)
    cls = classify_items(inst)
    chore_cut = epsilon / (2 * n)
    big_plus, big_minus = [], []
    for i in range(n):
        mu = profile.mu(i)
        cut = epsilon * mu / (2 * n) if mu >= 0 else chore_cut
        row = inst.values[i]
        big_plus.append(frozenset(j for j in cls.global_goods if row[j] > cut))
        big_minus.append(frozenset(j for j in cls.global_chores if -row[j] > chore_cut))
    big = frozenset().union(*big_plus, *big_minus)
    small = tuple(j for j in range(inst.m) if j not in big)
    small_plus = tuple(frozenset(j for j in small if inst.values[i][j] >= 0) for i in range(n))
    small_minus = tuple(frozenset(j for j in small if inst.values[i][j] < 0) for i in range(n))
    return BigSmallProfile(tuple(big_plus), tuple(big_minus), tuple(sorted(big)), small,
                           small_plus, small_minus)


# Big-partition search ------------------------------------------------------

def requirement(mu: Fraction, alpha: Fraction) -> Fraction:
    """Value an agent needs overall: min(mu/alpha, alpha*mu)."""
    return min(mu / alpha, alpha * mu)


def big_partition_lp(inst: Instance, profile: MmsProfile, bs: BigSmallProfile,
                     big_bundles: Sequence, alpha) -> SmallLpSpec:
    """The small-item LP for one assignment of big items."""
    alpha = Fraction(alpha)
    c = []
    for i in range(inst.n):
        have = sum((inst.values[i][j] for j in big_bundles[i]), ZERO)
        c.append(requirement(profile.mu(i), alpha) - have)
    values = [[inst.values[i][j] for j in bs.small] for i in range(inst.n)]
    return SmallLpSpec.build(values, c, bs.small)


class _Scanner:
    """Evaluates big partitions; picklable so worker processes can share it."""

    def __init__(self, inst, profile, bs, alpha):
        self.inst, self.profile, self.bs, self.alpha = inst, profile, bs, alpha
        n = inst.n
        self.rows, self.scales, self.need = [], [], []
        for i in range(n):
            req = requirement(profile.mu(i), alpha)
            ints, s = integer_row(inst.values[i], req)
            self.rows.append(ints)
            self.scales.append(s)
            self.need.append(req * s)
        self.common = 1
        for s in self.scales:
            self.common = self.common * s // _gcd(self.common, s)

    def scan(self, start, stop):
        """Best (welfare, index, owners, x) over partitions [start, stop), and
        how many of them were feasible."""
        inst, bs = self.inst, self.bs
        n = inst.n
        big = bs.big
        best = None
        feasible = 0
        product = itertools.product(range(n), repeat=len(big))
        for index, owners in enumerate(itertools.islice(product, start, stop), start):
            sums = [0] * n
            for j, k in zip(big, owners):
                sums[k] += self.rows[k][j]
            bundles = [[] for _ in range(n)]
            for j, k in zip(big, owners):
                bundles[k].append(j)
            spec = big_partition_lp(inst, self.profile, bs, bundles, self.alpha)
            x = solve_small_lp(spec)
            if isinstance(x, Infeasible):
                continue
            feasible += 1
            score = Fraction(sum(sums[i] * (self.common // self.scales[i]) for i in range(n)),
                             self.common)
            score += sum((v * s for row, xr in zip(spec.values, x.x) for v, s in zip(row, xr)),
                         ZERO)
            if best is None or score > best[0]:
                best = (score, index, owners, x)
        return best, feasible


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _scan_chunk(args):
    scanner, start, stop = args
    return scanner.scan(start, stop)


def _kernel_chunk(args):
    rows, need, prefix = args
    return kernel.best_feasible(rows, need, prefix)


def _lex_index(owners, n):
    index = 0
    for k in owners:
        index = index * n + k
    return index


def _search_integral(scanner, workers):
    """No small items: branch and bound over big assignments in the kernel."""
    n, common = scanner.inst.n, scanner.common
    rows = [[v * (common // s) for v in row] for row, s in zip(scanner.rows, scanner.scales)]
    need = [math.ceil(q * (common // s)) for q, s in zip(scanner.need, scanner.scales)]
    depth = 0
    while workers > 1 and n ** depth < 4 * workers and depth < len(scanner.bs.big):
        depth += 1
    tasks = [(rows, need, prefix) for prefix in itertools.product(range(n), repeat=depth)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_kernel_chunk, tasks))
    else:
        results = [_kernel_chunk(t) for t in tasks]
    best = None
    for result in results:  # prefixes come in lexicographic order
        if result is not None and (best is None or result[0] > best[0]):
            best = result
    if best is None:
        return None
    welfare, owners = best
    return Fraction(welfare, common), _lex_index(owners, n), tuple(owners), None


def _search(scanner, count, workers):
    if not scanner.bs.small:
        return _search_integral(scanner, workers)
    if workers <= 1 or count < 2 * workers:
        return scanner.scan(0, count)[0]
    chunk = -(-count // (workers * 4))
    tasks = [(scanner, s, min(s + chunk, count)) for s in range(0, count, chunk)]
    best = None
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for result, _ in pool.map(_scan_chunk, tasks):
            # chunks arrive in index order, so strict improvement keeps the
            # lowest index among equal welfare
            if result is not None and (best is None or result[0] > best[0]):
                best = result
    return best


# Main entry ----------------------------------------------------------------

def _complete_goods(inst, x: FractionalAllocation) -> FractionalAllocation:
    """Give unassigned shares of goods to a highest-value agent."""
    X = [list(row) for row in x.x]
    for c, j in enumerate(x.items):
        if all(inst.values[i][j] < 0 for i in range(inst.n)):
            continue
        total = sum((row[c] for row in X), ZERO)
        if total < 1:
            winner = max(range(inst.n), key=lambda i: (inst.values[i][j], -i))
            X[winner][c] += 1 - total
    return FractionalAllocation(tuple(tuple(r) for r in X), x.items)


def _lift(inst: Instance, pre: Preprocessed, reduced_alloc: Optional[Allocation]) -> Allocation:
    plan = pre.plan
    bundles = [set() for _ in range(inst.n)]
    if reduced_alloc is not None:
        for r, agent in enumerate(plan.kept_agents):
            bundles[agent] = {plan.kept_items[j] for j in reduced_alloc.bundles[r]}
    if plan.zero_agents:
        bundles[plan.zero_agents[0]] |= set(plan.absorbed)
        if not plan.kept_agents:
            bundles[plan.zero_agents[0]] = set(range(inst.m))
    return Allocation.from_bundles(bundles)


def solve_alpha_mms_po(inst: Instance, params: SolverParams, *, workers: int = 1,
                       trace: Optional[SolveTrace] = None):
    """An (alpha - eps)-MMS, gamma-PO allocation, or :class:`NoAlphaMms`.

    Args:
        inst: the instance; every agent must satisfy the tau-condition.
        params: alpha, epsilon, gamma, tau and the big-partition budget.
        workers: processes used for the big-partition search.
        trace: if given, filled with intermediate results.
    """
    bad = [i for i, ok in enumerate(check_tau_condition(inst, params.tau)) if not ok]
    if bad:
        raise TauConditionError(bad)
    trace = trace if trace is not None else SolveTrace()
    pre = preprocess(inst, params)
    trace.epsilon_used = pre.epsilon
    if pre.trivial:
        trace.trivial = True
        return welfare_max_allocation(inst)
    if pre.instance is None:
        return _lift(inst, pre, None)

    R, eps, alpha = pre.instance, pre.epsilon, params.alpha
    profile = compute_mms_profile(R, eps, params.big_budget)
    bs = classify_big_small(R, profile, eps)
    trace.profile, trace.big_small = profile, bs
    count = R.n ** len(bs.big)
    if count > params.big_budget:
        raise BudgetExceededError(
            count, params.big_budget,
            f"big-partition search ({len(bs.big)} big items, {R.n} agents)")
    trace.partitions = count
    best = _search(_Scanner(R, profile, bs, alpha), count, workers)
    if best is None:
        return NoAlphaMms(alpha, count)
    score, index, owners, x = best
    trace.chosen_partition, trace.lp_welfare = index, score

    big_bundles = [set() for _ in range(R.n)]
    for j, k in zip(bs.big, owners):
        big_bundles[k].add(j)
    if x is None:
        x = FractionalAllocation(tuple(() for _ in range(R.n)), ())
    x = acyclify(R, _complete_goods(R, x))
    rounded, rtrace = round_fractional(R, x, profile, eps, big_bundles)
    trace.rounding = rtrace
    trace.rounded_welfare = welfare(R, rounded)
    slack = eps if rtrace.s_minus_eps else ZERO
    if trace.rounded_welfare < score - slack:
        raise InvariantViolation(
            f"rounding lost welfare: {trace.rounded_welfare} < {score} - {slack}")
    fixed = gamma_po_fixup(R, rounded, profile, alpha)
    trace.fixup_changed = fixed != rounded
    return _lift(inst, pre, fixed)
