"""Instance generators: the non-existence instance, PARTITION reductions and
random corpora."""
import math
import random
from fractions import Fraction
from typing import Optional, Sequence

from .core import Instance, check_tau_condition, to_rational
from .errors import ParameterError

_OFFSETS = ((17, 25, 12, 1), (2, 22, 3, 28), (11, 0, 21, 23))
_PERTURBATIONS = (
    ((3, -1, -1, -1), (0, 0, 0, 0), (0, 0, 0, 0)),
    ((3, -1, 0, 0), (-1, 0, 0, 0), (-1, 0, 0, 0)),
    ((3, 0, -1, 0), (0, 0, -1, 0), (0, 0, 0, -1)),
)
NONEXISTENCE_CHORE = Fraction(-16219999, 4)

BETA = Fraction(1, 4)


def gen_nonexistence() -> Instance:
    """Three agents, twelve goods on a 3x4 grid and three chores.

    Every agent has MMS 1/4, yet no allocation gives all three agents a
    positive value.
    """
    items = [f"g{j + 1}{k + 1}" for j in range(3) for k in range(4)]
    items += ["c1", "c2", "c3"]
    rows = []
    for pert in _PERTURBATIONS:
        row = [Fraction(10 ** 6 + 10 ** 3 * _OFFSETS[j][k] + pert[j][k])
               for j in range(3) for k in range(4)]
        row += [NONEXISTENCE_CHORE] * 3
        rows.append(tuple(row))
    return Instance(tuple(rows), tuple(items))


def minimal_tau_agents(weights: Sequence[int], tau) -> int:
    """Smallest agent count accepted by the tau variant of the reduction."""
    tau = to_rational(tau, "tau")
    total = sum(weights)
    need = (1 + tau) * (total + 2 * BETA) - total
    return max(3, 2 + math.ceil(need / BETA))


def gen_partition_reduction(weights: Sequence[int], variant: str = "two_agent",
                            n: Optional[int] = None, tau=None) -> Instance:
    """Identical-agent instance with MMS 1/4 iff ``weights`` split evenly.

    ``variant`` is ``"two_agent"`` (two agents, the weights as goods, two
    chores) or ``"tau"`` (n agents and n-2 extra goods worth 1/4 each, so
    the tau-condition holds).

    >>> gen_partition_reduction([3, 1, 2]).values[0][-1]
    Fraction(-11, 4)
    """
    weights = list(weights)
    if not weights:
        raise ParameterError("weights must be nonempty")
    if any(isinstance(w, bool) or not isinstance(w, int) or w < 0 for w in weights):
        raise ParameterError("weights must be nonnegative integers")
    total = sum(weights)
    chore = -Fraction(total, 2) + BETA
    goods = [Fraction(w) for w in weights]
    if variant == "two_agent":
        agents = 2
        extra = []
    elif variant == "tau":
        if tau is None:
            raise ParameterError("the tau variant needs tau")
        tau = to_rational(tau, "tau")
        least = minimal_tau_agents(weights, tau)
        agents = least if n is None else n
        if agents < least:
            raise ParameterError(
                f"n={agents} is too small for tau={tau}; the minimal n is {least}")
        extra = [BETA] * (agents - 2)
    else:
        raise ParameterError(f"unknown variant {variant!r}")
    row = tuple(goods + extra + [chore, chore])
    items = ([f"e{j}" for j in range(len(goods))] + [f"b{j}" for j in range(len(extra))]
             + ["c0", "c1"])
    return Instance((row,) * agents, tuple(items))


def gen_random(n: int, m: int, lo: int, hi: int, tau, seed: int,
               max_tries: int = 100_000) -> Instance:
    """Uniform integer valuations, resampled until the tau-condition holds."""
    if n < 1 or m < 0 or lo > hi:
        raise ParameterError("need n >= 1, m >= 0 and lo <= hi")
    tau = to_rational(tau, "tau")
    rng = random.Random(seed)
    items = tuple(f"i{j}" for j in range(m))
    for _ in range(max_tries):
        rows = tuple(tuple(Fraction(rng.randint(lo, hi)) for _ in range(m))
                     for _ in range(n))
        inst = Instance(rows, items)
        if all(check_tau_condition(inst, tau)):
            return inst
    raise ParameterError(f"no instance satisfying tau={tau} found in {max_tries} draws")
