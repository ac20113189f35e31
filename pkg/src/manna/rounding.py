"""From a fractional small-item solution to an integral allocation.

Steps: remove cycles from the agent-item sharing graph without lowering any
agent's value, hand out shared items, fix envy cycles, give the remaining
shared chores to an envy sink, and finally repair Pareto efficiency when
every agent ended up with almost nothing.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .core import Allocation, Instance, bundle_value
from .errors import InvariantViolation
from .lp import FractionalAllocation

ZERO = Fraction(0)


@dataclass
class RoundingTrace:
    shared: frozenset = frozenset()
    s_plus: frozenset = frozenset()
    s_minus_eps: frozenset = frozenset()
    sink_agent: Optional[int] = None
    pre_round_values: Tuple[Fraction, ...] = ()
    post_round_values: Tuple[Fraction, ...] = ()


# Sharing graph ------------------------------------------------------------

def _find_sharing_cycle(X):
    """First cycle (agents and columns alternating, agent first) or None."""
    n = len(X)
    k = len(X[0]) if n else 0
    adj = {}
    for i in range(n):
        adj[("a", i)] = [("o", c) for c in range(k) if X[i][c] > 0]
    for c in range(k):
        adj[("o", c)] = [("a", i) for i in range(n) if X[i][c] > 0]
    visited = set()
    for root in [("a", i) for i in range(n)]:
        if root in visited:
            continue
        path, on_path = [], {}
        stack = [(root, None, iter(adj[root]))]
        visited.add(root)
        on_path[root] = 0
        path.append(root)
        while stack:
            node, parent, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                del on_path[node]
                continue
            if nxt == parent:
                continue
            if nxt in on_path:
                cycle = path[on_path[nxt]:]
                start = next(t for t, x in enumerate(cycle) if x[0] == "a")
                cycle = cycle[start:] + cycle[:start]
                return [x[1] for x in cycle]
            if nxt in visited:
                continue
            visited.add(nxt)
            on_path[nxt] = len(path)
            path.append(nxt)
            stack.append((nxt, node, iter(adj[nxt])))
    return None


def _break_cycle(X, V, cycle):
    agents = cycle[0::2]
    items = cycle[1::2]
    size = len(agents)
    # item t is held by agents[t] and agents[t+1]
    for t, col in enumerate(items):
        p, q = agents[t], agents[(t + 1) % size]
        vp, vq = V[p][col], V[q][col]
        if (vp > 0 and vq > 0) or (vp < 0 and vq < 0):
            continue
        # one holder does not want it at all: hand that share to the other
        giver, taker = (p, q) if vp <= 0 <= vq else (q, p)
        X[taker][col] += X[giver][col]
        X[giver][col] = ZERO
        return

    # Utility-neutral shift: agents[t] gains rho_t via items[t] and loses the
    # same via items[t-1]; rho keeps every item except the last balanced.
    rho = [Fraction(1)]
    for t in range(size - 1):
        col = items[t]
        rho.append(rho[-1] * V[agents[t + 1]][col] / V[agents[t]][col])
    last = items[-1]
    kappa = rho[-1] / V[agents[-1]][last] - 1 / V[agents[0]][last]
    is_good = V[agents[0]][last] > 0
    if is_good:
        sign = -1 if kappa > 0 else 1
    else:
        sign = -1 if kappa < 0 else 1
    delta = {}
    for t in range(size):
        a = agents[t]
        gain_col, loss_col = items[t], items[t - 1]
        delta[(a, gain_col)] = delta.get((a, gain_col), ZERO) + sign * rho[t] / V[a][gain_col]
        delta[(a, loss_col)] = delta.get((a, loss_col), ZERO) - sign * rho[t] / V[a][loss_col]
    step = min(X[a][c] / -d for (a, c), d in delta.items() if d < 0)
    before = sum((row[last] for row in X), ZERO)
    for (a, c), d in delta.items():
        X[a][c] += step * d
    after = sum((row[last] for row in X), ZERO)
    if is_good and after < before:
        holders = (agents[0], agents[-1])
        taker = max(holders, key=lambda a: (X[a][last], -a))
        X[taker][last] += before - after
    elif not is_good and after > before:
        grew = next(a for a in (agents[0], agents[-1]) if delta[(a, last)] > 0)
        X[grew][last] -= after - before


def acyclify(inst: Instance, x: FractionalAllocation) -> FractionalAllocation:
    """Remove every cycle of the sharing graph.

    Column totals are preserved and no agent's value goes down: within a
    cycle shares are shifted so each agent's value is unchanged, and any
    slack created on the closing item goes back to one of its holders.
    """
    X = [list(row) for row in x.x]
    V = [[inst.values[i][j] for j in x.items] for i in range(inst.n)]
    while True:
        cycle = _find_sharing_cycle(X)
        if cycle is None:
            break
        _break_cycle(X, V, cycle)
    return FractionalAllocation(tuple(tuple(r) for r in X), x.items)


def shared_columns(x: FractionalAllocation) -> List[int]:
    k = len(x.items)
    return [c for c in range(k) if sum(1 for row in x.x if row[c] > 0) >= 2]


# Envy graph ----------------------------------------------------------------

def build_envy_graph(inst: Instance, alloc: Allocation) -> Dict[int, List[int]]:
    """Edge i -> k when agent i strictly prefers bundle k to its own."""
    graph = {}
    for i in range(inst.n):
        own = bundle_value(inst, i, alloc.bundles[i])
        graph[i] = [k for k in range(inst.n)
                    if k != i and bundle_value(inst, i, alloc.bundles[k]) > own]
    return graph


def find_directed_cycle(graph: Dict[int, Sequence[int]]) -> Optional[List[int]]:
    """First directed cycle met by depth-first search from the lowest node."""
    color = {v: 0 for v in graph}
    for root in sorted(graph):
        if color[root]:
            continue
        path = [root]
        pos = {root: 0}
        color[root] = 1
        stack = [iter(graph[root])]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                done = path.pop()
                del pos[done]
                color[done] = 2
                continue
            if color[nxt] == 1:
                return path[pos[nxt]:]
            if color[nxt] == 0:
                color[nxt] = 1
                pos[nxt] = len(path)
                path.append(nxt)
                stack.append(iter(graph[nxt]))
    return None


def _rotate(bundles, cycle):
    moved = [bundles[c] for c in cycle[1:] + cycle[:1]]
    for c, b in zip(cycle, moved):
        bundles[c] = b


def eliminate_envy_cycles(inst: Instance, alloc: Allocation) -> Allocation:
    bundles = list(alloc.bundles)
    while True:
        cycle = find_directed_cycle(build_envy_graph(inst, Allocation(tuple(bundles))))
        if cycle is None:
            return Allocation(tuple(bundles))
        _rotate(bundles, cycle)


# Rounding ------------------------------------------------------------------

def round_fractional(inst: Instance, x: FractionalAllocation, profile, epsilon,
                     big_bundles: Optional[Sequence] = None
                     ) -> Tuple[Allocation, RoundingTrace]:
    """Integral allocation from an acyclic fractional one.

    ``inst`` must be normalized (|v_i(M)| = n) and ``profile`` gives each
    agent's approximate MMS. ``big_bundles`` are the integrally assigned
    items that sit outside ``x``.
    """
    n = inst.n
    epsilon = Fraction(epsilon)
    mu = [profile.mu(i) for i in range(n)]
    big_bundles = [set(b) for b in (big_bundles or [()] * n)]
    V = inst.values
    shared = shared_columns(x)
    if len(shared) > n - 1:
        raise InvariantViolation(f"{len(shared)} shared items with {n} agents")

    pre = []
    for i in range(n):
        value = bundle_value(inst, i, big_bundles[i])
        value += sum((x.x[i][c] * V[i][j] for c, j in enumerate(x.items)), ZERO)
        pre.append(value)

    bundles = [set(b) for b in big_bundles]
    s_plus, s_minus = set(), set()
    for c, j in enumerate(x.items):
        holders = [i for i in range(n) if x.x[i][c] > 0]
        total = sum((row[c] for row in x.x), ZERO)
        is_chore = all(V[i][j] < 0 for i in range(n))
        if is_chore and total != 1:
            raise InvariantViolation(f"chore {j} is assigned {total} times")
        if c not in shared:
            if len(holders) != 1 or x.x[holders[0]][c] != 1:
                raise InvariantViolation(f"unshared item {j} is not wholly assigned")
            bundles[holders[0]].add(j)
        elif is_chore and any(abs(V[i][j]) > epsilon * abs(mu[i]) / (2 * n)
                              for i in range(n)):
            s_minus.add(j)
        else:
            s_plus.add(j)
            winner = max(range(n), key=lambda i: (V[i][j], -i))
            bundles[winner].add(j)

    alloc = eliminate_envy_cycles(inst, Allocation.from_bundles(bundles))
    graph = build_envy_graph(inst, alloc)
    sink = min(i for i in range(n) if not graph[i])
    sink_value = bundle_value(inst, sink, alloc.bundles[sink])
    floor = 1 if inst.total(sink) > 0 else -1
    if sink_value < floor:
        raise InvariantViolation(f"sink agent {sink} holds {sink_value} < {floor}")
    final = [set(b) for b in alloc.bundles]
    if s_minus:
        if not any(inst.total(i) > 0 for i in range(n)):
            raise InvariantViolation("shared chores left over but no agent has v_i(M) > 0")
        final[sink] |= s_minus
    result = Allocation.from_bundles(final)
    post = [bundle_value(inst, i, result.bundles[i]) for i in range(n)]
    for i in range(n):
        allowed = epsilon / 2 if i == sink else epsilon * abs(mu[i]) / 2
        if post[i] < pre[i] - allowed:
            raise InvariantViolation(
                f"agent {i} lost {pre[i] - post[i]} in rounding, bound {allowed}")
    trace = RoundingTrace(frozenset(x.items[c] for c in shared), frozenset(s_plus),
                          frozenset(s_minus), sink, tuple(pre), tuple(post))
    return result, trace


# Pareto repair -------------------------------------------------------------

def gamma_po_fixup(inst: Instance, A_r: Allocation, profile, alpha) -> Allocation:
    """Make sure some agent holds at least alpha when that is possible.

    Runs on the normalized instance. If total absolute value held is below
    alpha and some agent has a positive total, either a positive-total agent
    takes over a negative-total agent's bundle worth at least 1 to it, or
    bundles rotate along a cycle of agents who each value the next one's
    bundle at least 1.
    """
    alpha = Fraction(alpha)
    n = inst.n
    own = [bundle_value(inst, i, A_r.bundles[i]) for i in range(n)]
    positive = [i for i in range(n) if inst.total(i) > 0]
    if sum((abs(v) for v in own), ZERO) >= alpha or not positive:
        return A_r
    bundles = list(A_r.bundles)
    others = [k for k in range(n) if k not in positive]
    for i in positive:
        for k in others:
            if bundle_value(inst, i, bundles[k]) >= 1:
                bundles[i] = bundles[i] | bundles[k]
                bundles[k] = frozenset()
                return _checked_fixup(inst, bundles, alpha)
    graph = {i: [k for k in positive if k != i and own[i] < alpha
                 and bundle_value(inst, i, bundles[k]) >= 1] for i in positive}
    cycle = find_directed_cycle(graph)
    if cycle is None:
        raise InvariantViolation("fix-up graph has no cycle")
    _rotate(bundles, cycle)
    return _checked_fixup(inst, bundles, alpha)


def _checked_fixup(inst, bundles, alpha):
    alloc = Allocation(tuple(bundles))
    if not any(bundle_value(inst, i, alloc.bundles[i]) >= alpha for i in range(inst.n)):
        raise InvariantViolation("fix-up left every agent below alpha")
    return alloc
