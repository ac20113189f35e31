from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings, strategies as st

from strategies import instances
from manna.core import (Allocation, Instance, SolverParams, check_tau_condition, normalize,
                        satisfies_alpha_mms)
from manna.errors import BudgetExceededError, TauConditionError
from manna.generators import gen_nonexistence
from manna.lp import Infeasible, solve_small_lp
from manna.mixed import (NoAlphaMms, SolveTrace, big_partition_lp, classify_big_small,
                         compute_mms_profile, preprocess, requirement, solve_alpha_mms_po)
from manna.oracle import alpha_star_witness, is_gamma_po, mms_all

TENTH = F(1, 10)
NONEXISTENCE_TAU = F(1, 16220000)  # the instance is far from balanced-free


def params(alpha, eps=TENTH, gamma=TENTH, **kw):
    return SolverParams(alpha=F(alpha), epsilon=F(eps), gamma=F(gamma), **kw)


# preprocessing

def test_epsilon_is_capped_by_gamma():
    pre = preprocess(Instance.from_rows([[1, 1], [1, 1]]), params(F(1, 2)))
    assert pre.epsilon == F(1, 22)


def test_small_alpha_is_trivial():
    assert preprocess(Instance.from_rows([[1]]), params(F(1, 20))).trivial


def test_zero_agent_absorbs_chores():
    inst = Instance.from_rows([[3, 1, -1, -2], [1, 3, -2, -1], [0, 0, 0, 0]],
                              items=["g1", "g2", "c1", "c2"])
    pre = preprocess(inst, params(F(1, 2)))
    assert pre.plan.zero_agents == (2,)
    assert pre.plan.absorbed == (2, 3)
    assert pre.instance.n == 2 and pre.instance.items == ("g1", "g2")
    alloc = solve_alpha_mms_po(inst, params(F(1, 2)))
    assert alloc.bundles[2] == {2, 3}


def test_zero_total_with_nonzero_entries_is_rejected():
    inst = Instance.from_rows([[1, -1], [1, 1]])
    with pytest.raises(TauConditionError):
        preprocess(inst, params(F(1, 2)))


def test_tau_violation_is_reported_per_agent():
    inst = Instance.from_rows([[5, -5], [1, 1]])
    with pytest.raises(TauConditionError) as info:
        solve_alpha_mms_po(inst, params(1))
    assert info.value.agents == [0]


# MMS profile

def test_profile_identical_goods():
    prof = compute_mms_profile(Instance.from_rows([[1, 1], [1, 1]]), TENTH)
    assert [prof.mu(i) for i in range(2)] == [1, 1]


def test_profile_negative_agent_bound():
    norm, _ = normalize(Instance.from_rows([[-3, -1], [2, 2]]))
    prof = compute_mms_profile(norm, TENTH)
    assert prof.mu(0) <= -1 and prof.agents[0].sign == "neg"


def test_profile_nonexistence_instance():
    norm, scales = normalize(gen_nonexistence())
    prof = compute_mms_profile(norm, TENTH)
    # MMS is 1/4 before scaling and every scale is 4
    assert scales == [4, 4, 4]
    assert all((1 - TENTH / 2) <= prof.mu(i) <= 1 for i in range(3))


@given(instances(n_range=(2, 3), m_range=(1, 6)))
def test_big_small_partition_items(inst):
    assume(all(inst.total(i) != 0 for i in range(inst.n)))
    norm, _ = normalize(inst)
    prof = compute_mms_profile(norm, F(1, 4))
    bs = classify_big_small(norm, prof, F(1, 4))
    assert set(bs.big) | set(bs.small) == set(range(inst.m))
    assert not set(bs.big) & set(bs.small)


# end to end

def test_nonexistence_instance_reports_no_allocation():
    inst = gen_nonexistence()
    result = solve_alpha_mms_po(inst, params(F(1, 2), tau=NONEXISTENCE_TAU))
    assert isinstance(result, NoAlphaMms)
    assert result.partitions_tried == 3 ** 15


def test_identical_pair():
    alloc = solve_alpha_mms_po(Instance.from_rows([[1, 1], [1, 1]]), params(1))
    assert alloc == Allocation.from_bundles([[0], [1]])


def test_diagonal():
    inst = Instance.from_rows([[2, 0], [0, 2]])
    alloc = solve_alpha_mms_po(inst, params(1))
    assert alloc == Allocation.from_bundles([[0], [1]])
    assert is_gamma_po(inst, alloc, 0)


def test_trivial_path_returns_welfare_max():
    inst = Instance.from_rows([[2, 0], [0, 2]])
    trace = SolveTrace()
    alloc = solve_alpha_mms_po(inst, params(F(1, 20)), trace=trace)
    assert trace.trivial and alloc == Allocation.from_bundles([[0], [1]])


def test_big_budget_is_enforced():
    inst = Instance.from_rows([[5, 4, 3, 2, 1]] * 2)
    with pytest.raises(BudgetExceededError):
        solve_alpha_mms_po(inst, params(1, big_budget=4))


def test_small_items_take_the_lp_route():
    inst = Instance.from_rows([[20, 22, 1, 1, 1, 1], [21, 20, 1, 1, 1, 1]])
    trace = SolveTrace()
    alloc = solve_alpha_mms_po(inst, params(1, eps=F(1, 2), gamma=1), trace=trace)
    assert trace.big_small.small
    mms = mms_all(inst)
    assert satisfies_alpha_mms(inst, alloc, mms, F(1, 2))
    assert is_gamma_po(inst, alloc, 1)


def test_parallel_search_matches_serial():
    inst = Instance.from_rows([[20, 22, 1, -1, 2], [21, 20, 3, -2, 1]])
    p = params(1, eps=F(1, 2), gamma=1)
    assert solve_alpha_mms_po(inst, p) == solve_alpha_mms_po(inst, p, workers=2)
    q = params(F(3, 4))
    inst2 = Instance.from_rows([[5, 3, -2, 4], [1, 6, -1, 3], [2, 2, -3, 5]])
    assert solve_alpha_mms_po(inst2, q) == solve_alpha_mms_po(inst2, q, workers=3)


def tau_instances():
    return instances(n_range=(2, 3), m_range=(1, 6)).filter(
        lambda inst: all(check_tau_condition(inst, F(1, 4))))


@settings(max_examples=40)
@given(tau_instances(), st.sampled_from([F(1, 2), F(3, 4), F(1)]))
def test_soundness_and_completeness(inst, alpha):
    mms = mms_all(inst)
    best, _ = alpha_star_witness(inst, mms)
    trace = SolveTrace()
    result = solve_alpha_mms_po(inst, params(alpha), trace=trace)
    if isinstance(result, NoAlphaMms):
        assert best < alpha
        return
    assert satisfies_alpha_mms(inst, result, mms, alpha - TENTH)
    assert is_gamma_po(inst, result, TENTH)
    if trace.rounding is not None:
        slack = trace.epsilon_used if trace.rounding.s_minus_eps else 0
        assert trace.rounded_welfare >= trace.lp_welfare - slack


@settings(max_examples=40)
@given(tau_instances(), st.sampled_from([F(1, 2), F(3, 4)]))
def test_oracle_witness_is_lp_feasible(inst, alpha):
    assume(all(inst.total(i) != 0 for i in range(inst.n)))
    mms = mms_all(inst)
    best, witness = alpha_star_witness(inst, mms)
    assume(best >= alpha)
    pre = preprocess(inst, params(alpha))
    norm = pre.instance
    prof = compute_mms_profile(norm, pre.epsilon)
    bs = classify_big_small(norm, prof, pre.epsilon)
    big_bundles = [[j for j in b if j in bs.big] for b in witness.bundles]
    spec = big_partition_lp(norm, prof, bs, big_bundles, alpha)
    assert not isinstance(solve_small_lp(spec), Infeasible)


def test_requirement_is_the_smaller_target():
    assert requirement(F(2), F(1, 2)) == 1
    assert requirement(F(-2), F(1, 2)) == -4
