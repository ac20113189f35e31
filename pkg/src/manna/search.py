"""Binary search for the largest alpha the mixed solver can certify."""
import math
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import InvariantViolation, ParameterError
from .core import Allocation, Instance, SolverParams, to_rational, welfare_max_allocation
from .mixed import NoAlphaMms, solve_alpha_mms_po

__all__ = ["opt_alpha_mms_po", "welfare_max_allocation", "SearchLog"]


class SearchLog(list):
    """Probes as ``(alpha, succeeded)`` pairs, in the order they ran."""


def opt_alpha_mms_po(inst: Instance, epsilon, gamma, delta=Fraction(1, 1024), *,
                     tau=Fraction(1, 4), big_budget: Optional[int] = None,
                     workers: int = 1, log: Optional[List] = None
                     ) -> Tuple[Fraction, Allocation]:
    """Largest dyadic alpha (to within ``delta``) with an allocation, and that allocation.

    Falls back to ``(0, welfare-max allocation)`` when no probe above epsilon
    succeeds. Probes at or below epsilon are never run: the solver treats them
    as trivially satisfied, so they carry no information.
    """
    epsilon = to_rational(epsilon, "epsilon")
    gamma = to_rational(gamma, "gamma")
    delta = to_rational(delta, "delta")
    if delta <= 0:
        raise ParameterError("delta must be positive")
    log = log if log is not None else SearchLog()
    extra = {} if big_budget is None else {"big_budget": big_budget}

    def probe(alpha):
        params = SolverParams(alpha=alpha, epsilon=epsilon, gamma=gamma, tau=tau, **extra)
        result = solve_alpha_mms_po(inst, params, workers=workers)
        ok = not isinstance(result, NoAlphaMms)
        log.append((alpha, ok))
        return result if ok else None

    best_alpha, best = Fraction(0), None
    found = probe(Fraction(1))
    if found is not None:
        best_alpha, best = Fraction(1), found
    else:
        lo, hi = Fraction(0), Fraction(1)
        while hi - lo > delta:
            mid = (lo + hi) / 2
            if mid <= epsilon:
                lo = mid
                continue
            found = probe(mid)
            if found is None:
                hi = mid
            else:
                lo, best_alpha, best = mid, mid, found
    limit = math.ceil(math.log2(1 / delta)) + 1
    if len(log) > limit:
        raise InvariantViolation(f"{len(log)} probes exceed the bound {limit}")
    successes = [a for a, ok in log if ok]
    failures = [a for a, ok in log if not ok]
    if successes and failures and max(successes) >= min(failures):
        raise InvariantViolation("probing was not monotone")
    if best is None:
        return Fraction(0), welfare_max_allocation(inst)
    return best_alpha, best
