"""Exact domain model: instances, allocations, classification and predicates.

Every number is a :class:`fractions.Fraction`. Nothing in the package ever
touches binary floating point.
"""
import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import (DuplicateLabelError, InstanceFormatError,
                     InvalidAllocationError, MalformedJsonError,
                     ParameterError, RaggedMatrixError, ZeroDenominatorError,
                     ZeroTotalError)

Rational = Fraction


def to_rational(value, field_name="value") -> Fraction:
    """Convert an int, Fraction, Decimal or string to an exact Fraction.

    Strings may be integers, ``"p/q"`` or finite decimals such as ``"0.25"``.

    >>> to_rational("-1/2")
    Fraction(-1, 2)
    >>> to_rational("0.25")
    Fraction(1, 4)
    """
    if isinstance(value, bool):
        raise InstanceFormatError(f"{field_name}: booleans are not numbers", field_name)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise InstanceFormatError(f"{field_name}: non-finite number", field_name)
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, _, den = text.partition("/")
            try:
                p, q = int(num), int(den)
            except ValueError:
                raise InstanceFormatError(
                    f"{field_name}: cannot parse {value!r}", field_name) from None
            if q == 0:
                raise ZeroDenominatorError(
                    f"{field_name}: zero denominator in {value!r}", field_name)
            return Fraction(p, q)
        try:
            d = Decimal(text)
        except InvalidOperation:
            raise InstanceFormatError(
                f"{field_name}: cannot parse {value!r}", field_name) from None
        if not d.is_finite():
            raise InstanceFormatError(f"{field_name}: non-finite number {value!r}", field_name)
        return Fraction(d)
    raise InstanceFormatError(
        f"{field_name}: unsupported value type {type(value).__name__}", field_name)


def format_rational(q: Fraction) -> str:
    """Lowest-terms ``"p/q"``, or a bare integer string when q is whole."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Instance:
    """Additive valuations of ``n`` agents over ``m`` labelled items."""
    values: Tuple[Tuple[Fraction, ...], ...]
    items: Tuple[str, ...]

    def __post_init__(self):
        if len(self.values) < 1:
            raise RaggedMatrixError("an instance needs at least one agent", "values")
        m = len(self.items)
        for i, row in enumerate(self.values):
            if len(row) != m:
                raise RaggedMatrixError(
                    f"values row {i} has {len(row)} entries, expected {m}", f"values[{i}]")
        if len(set(self.items)) != m:
            seen = set()
            dup = next(x for x in self.items if x in seen or seen.add(x))
            raise DuplicateLabelError(f"duplicate item label {dup!r}", "items")

    @classmethod
    def from_rows(cls, rows, items: Optional[Sequence[str]] = None) -> "Instance":
        rows = [tuple(to_rational(v) for v in row) for row in rows]
        if items is None:
            m = len(rows[0]) if rows else 0
            items = [f"i{j}" for j in range(m)]
        return cls(tuple(rows), tuple(items))

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return len(self.items)

    def total(self, agent: int) -> Fraction:
        return sum(self.values[agent], Fraction(0))

    def row(self, agent: int) -> Tuple[Fraction, ...]:
        return self.values[agent]


@dataclass(frozen=True)
class Allocation:
    """An integral allocation: bundle ``k`` belongs to agent ``k``."""
    bundles: Tuple[frozenset, ...]

    @classmethod
    def from_bundles(cls, bundles: Iterable[Iterable[int]]) -> "Allocation":
        return cls(tuple(frozenset(b) for b in bundles))

    @classmethod
    def from_assignment(cls, assignment: Sequence[int], n: int) -> "Allocation":
        """Build from a vector giving the owner of each item."""
        bundles = [set() for _ in range(n)]
        for j, k in enumerate(assignment):
            bundles[k].add(j)
        return cls.from_bundles(bundles)

    @property
    def n(self) -> int:
        return len(self.bundles)

    def assignment(self, m: int) -> List[int]:
        owner = [-1] * m
        for k, bundle in enumerate(self.bundles):
            for j in bundle:
                owner[j] = k
        return owner

    def validate(self, m: int, n: Optional[int] = None) -> None:
        if n is not None and self.n != n:
            raise InvalidAllocationError(f"allocation has {self.n} bundles, expected {n}")
        seen = set()
        for k, bundle in enumerate(self.bundles):
            for j in bundle:
                if not 0 <= j < m:
                    raise InvalidAllocationError(f"bundle {k} holds unknown item {j}")
                if j in seen:
                    raise InvalidAllocationError(f"item {j} appears in two bundles")
                seen.add(j)
        if len(seen) != m:
            missing = sorted(set(range(m)) - seen)
            raise InvalidAllocationError(f"items {missing} are not allocated")


@dataclass(frozen=True)
class ItemClassification:
    goods_of: Tuple[frozenset, ...]
    chores_of: Tuple[frozenset, ...]
    global_goods: frozenset
    global_chores: frozenset
    v_plus: Tuple[Fraction, ...]
    v_minus: Tuple[Fraction, ...]


@dataclass(frozen=True)
class SolverParams:
    alpha: Fraction
    epsilon: Fraction
    gamma: Fraction
    tau: Fraction = Fraction(1, 4)
    delta: Fraction = Fraction(1, 1024)
    big_budget: int = 20_000_000
    seed: int = 0

    def __post_init__(self):
        for name in ("alpha", "epsilon", "gamma", "tau", "delta"):
            object.__setattr__(self, name, to_rational(getattr(self, name), name))
        if not 0 < self.alpha <= 1:
            raise ParameterError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.epsilon <= 0:
            raise ParameterError("epsilon must be positive")
        if self.gamma <= 0:
            raise ParameterError("gamma must be positive")
        if self.tau <= 0:
            raise ParameterError("tau must be positive")
        if self.delta <= 0:
            raise ParameterError("delta must be positive")
        if self.big_budget < 1:
            raise ParameterError("big_budget must be at least 1")


def classify_items(inst: Instance) -> ItemClassification:
    goods_of, chores_of, v_plus, v_minus = [], [], [], []
    for row in inst.values:
        g = frozenset(j for j, v in enumerate(row) if v >= 0)
        c = frozenset(j for j, v in enumerate(row) if v < 0)
        goods_of.append(g)
        chores_of.append(c)
        v_plus.append(sum((row[j] for j in g), Fraction(0)))
        v_minus.append(sum((-row[j] for j in c), Fraction(0)))
    global_goods = frozenset().union(*goods_of)
    return ItemClassification(
        goods_of=tuple(goods_of),
        chores_of=tuple(chores_of),
        global_goods=global_goods,
        global_chores=frozenset(range(inst.m)) - global_goods,
        v_plus=tuple(v_plus),
        v_minus=tuple(v_minus),
    )


def scale(inst: Instance, factors: Sequence[Fraction]) -> Instance:
    """Multiply agent ``i``'s row by ``factors[i]``."""
    rows = tuple(tuple(c * v for v in row) for c, row in zip(factors, inst.values))
    return Instance(rows, inst.items)


def normalize(inst: Instance) -> Tuple[Instance, List[Fraction]]:
    """Rescale every agent so that the absolute total value equals n."""
    scales = []
    for i in range(inst.n):
        total = inst.total(i)
        if total == 0:
            raise ZeroTotalError(i)
        scales.append(Fraction(inst.n) / abs(total))
    return scale(inst, scales), scales


def check_tau_condition(inst: Instance, tau) -> List[bool]:
    tau = to_rational(tau, "tau")
    cls = classify_items(inst)
    return [abs(inst.total(i)) >= tau * min(cls.v_plus[i], cls.v_minus[i])
            for i in range(inst.n)]


def bundle_value(inst: Instance, agent: int, bundle: Iterable[int]) -> Fraction:
    if not 0 <= agent < inst.n:
        raise IndexError(f"agent {agent} out of range")
    row = inst.values[agent]
    total = Fraction(0)
    for j in bundle:
        if not 0 <= j < inst.m:
            raise IndexError(f"item {j} out of range")
        total += row[j]
    return total


def agent_values(inst: Instance, alloc: Allocation) -> List[Fraction]:
    return [bundle_value(inst, i, alloc.bundles[i]) for i in range(inst.n)]


def mms_threshold(mms: Fraction, alpha: Fraction) -> Fraction:
    """Smallest bundle value that is alpha-MMS for an agent with this MMS."""
    return alpha * mms if mms >= 0 else mms / alpha


def satisfies_alpha_mms(inst: Instance, alloc: Allocation, mms: Sequence[Fraction],
                        alpha) -> bool:
    """Check the alpha-MMS condition for every agent.

    Non-positive alpha is accepted for convenience and always holds.
    """
    if len(mms) != inst.n:
        raise ValueError(f"expected {inst.n} MMS values, got {len(mms)}")
    alpha = to_rational(alpha, "alpha")
    if alpha <= 0:
        return True
    return all(v >= mms_threshold(mu, alpha)
               for v, mu in zip(agent_values(inst, alloc), mms))


def welfare(inst: Instance, alloc: Allocation) -> Fraction:
    return sum(agent_values(inst, alloc), Fraction(0))


def welfare_max_allocation(inst: Instance) -> Allocation:
    """Every item to an agent valuing it most (lowest index on ties).

    >>> welfare_max_allocation(Instance.from_rows([[2, 0], [0, 2]])).bundles
    (frozenset({0}), frozenset({1}))
    """
    owners = [max(range(inst.n), key=lambda i: (inst.values[i][j], -i)) for j in range(inst.m)]
    return Allocation.from_assignment(owners, inst.n)


# JSON formats --------------------------------------------------------------

def _load_json(text):
    try:
        return json.loads(text, parse_float=Decimal)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedJsonError(f"malformed JSON: {exc}", "document") from None


def parse_instance(text) -> Instance:
    """Parse the instance JSON format.

    >>> inst = parse_instance('{"agents": 1, "items": ["a"], "values": [["3/6"]]}')
    >>> inst.values
    ((Fraction(1, 2),),)
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise MalformedJsonError("top level must be an object", "document")
    for key in ("agents", "items", "values"):
        if key not in doc:
            raise MalformedJsonError(f"missing key {key!r}", key)
    n = doc["agents"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InstanceFormatError("'agents' must be a positive integer", "agents")
    items = doc["items"]
    if not isinstance(items, list) or not all(isinstance(x, str) for x in items):
        raise InstanceFormatError("'items' must be a list of strings", "items")
    values = doc["values"]
    if not isinstance(values, list) or not all(isinstance(r, list) for r in values):
        raise RaggedMatrixError("'values' must be a list of lists", "values")
    if len(values) != n:
        raise RaggedMatrixError(f"'values' has {len(values)} rows but agents = {n}", "values")
    for i, row in enumerate(values):
        if len(row) != len(items):
            raise RaggedMatrixError(
                f"values row {i} has {len(row)} entries, expected {len(items)}",
                f"values[{i}]")
    if len(set(items)) != len(items):
        dup = sorted(x for x in set(items) if items.count(x) > 1)
        raise DuplicateLabelError(f"duplicate item labels {dup}", "items")
    rows = tuple(
        tuple(to_rational(v, f"values[{i}][{j}]") for j, v in enumerate(row))
        for i, row in enumerate(values))
    return Instance(rows, tuple(items))


def instance_to_dict(inst: Instance) -> dict:
    return {
        "agents": inst.n,
        "items": list(inst.items),
        "values": [[format_rational(v) for v in row] for row in inst.values],
    }


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), sort_keys=True) + "\n"


def allocation_to_dict(inst: Instance, alloc: Allocation) -> dict:
    return {"bundles": [sorted(inst.items[j] for j in b) for b in alloc.bundles]}


def serialize_allocation(inst: Instance, alloc: Allocation) -> str:
    return json.dumps(allocation_to_dict(inst, alloc), sort_keys=True) + "\n"


def allocation_from_dict(inst: Instance, doc) -> Allocation:
    if not isinstance(doc, dict) or "bundles" not in doc:
        raise MalformedJsonError("allocation must be an object with 'bundles'", "bundles")
    bundles = doc["bundles"]
    if not isinstance(bundles, list) or not all(isinstance(b, list) for b in bundles):
        raise InstanceFormatError("'bundles' must be a list of lists", "bundles")
    index = {label: j for j, label in enumerate(inst.items)}
    out = []
    for k, b in enumerate(bundles):
        ids = []
        for label in b:
            if label not in index:
                raise InvalidAllocationError(f"bundle {k} names unknown item {label!r}")
            ids.append(index[label])
        if len(set(ids)) != len(ids):
            raise InvalidAllocationError(f"bundle {k} repeats an item")
        out.append(ids)
    alloc = Allocation.from_bundles(out)
    alloc.validate(inst.m, inst.n)
    return alloc


def parse_allocation(inst: Instance, text) -> Allocation:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return allocation_from_dict(inst, _load_json(text))
