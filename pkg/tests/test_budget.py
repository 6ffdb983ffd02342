import numpy as np
import pytest

from helpers import budget_instance
from qcopt.budget import (
    FractionalAllocation,
    budget_opt_oracle,
    build_relaxation,
    integrality_gap,
    round_allocation,
    score_argmax_choices,
    solve_budget_opt,
    solve_relaxation,
)
from qcopt.core import ModelProfile, RoutingInstance, Section, plan_choices
from qcopt.errors import InfeasibleBudgetError, InstanceTooLargeError, PreconditionError
from qcopt.lp import EQ, LE


def two_model_instance(n=2, budget=10.0, sla=None, scores=None, costs=(2.0, 1.0)):
    models = [
        ModelProfile("m1", costs[0], 0.0, latency_per_token=0.5, avg_tokens_per_sentence=1),
        ModelProfile("m2", costs[1], 0.0, latency_per_token=0.5, avg_tokens_per_sentence=1),
    ]
    sections = [Section(f"s{j}", {"m1": 1, "m2": 1}) for j in range(n)]
    if scores is None:
        scores = [[0.9, 0.5]] * n
    return RoutingInstance(models, sections, scores, budget=budget, latency_sla=sla)


def test_relaxation_shape():
    lp = build_relaxation(two_model_instance(2, sla=5.0))
    assert lp.n_vars == 4 and len(lp.constraints) == 5
    assert [c[1] for c in lp.constraints] == [LE, LE, LE, EQ, EQ]
    lp = build_relaxation(two_model_instance(3))
    assert lp.n_vars == 6 and len(lp.constraints) == 4
    assert all(b == (0.0, 1.0) for b in lp.bounds)


def test_single_assignment_forced():
    m = ModelProfile("only", 1.0, 0.0, avg_tokens_per_sentence=1)
    inst = RoutingInstance([m], [Section("s", {"only": 3})], [[0.4]], budget=3.0)
    plan = solve_budget_opt(inst)
    assert plan.assignment == {"s": "only"}
    assert plan.lp_objective == pytest.approx(0.4)


def test_round_strict_argmax_and_cost_tiebreak():
    inst = two_model_instance(1)
    plan = round_allocation(FractionalAllocation(np.array([[0.7, 0.3]]), 0.0), inst)
    assert plan.assignment == {"s0": "m1"}
    plan = round_allocation(FractionalAllocation(np.array([[0.5, 0.5]]), 0.0), inst)
    assert plan.assignment == {"s0": "m2"}  # costs (2.0, 1.0): cheaper wins the tie


def test_round_index_tiebreak():
    inst = two_model_instance(1, costs=(1.0, 1.0))
    plan = round_allocation(FractionalAllocation(np.array([[0.5, 0.5]]), 0.0), inst)
    assert plan.assignment == {"s0": "m1"}


def test_slack_budget_gives_score_argmax():
    rng = np.random.default_rng(0)
    for _ in range(20):
        inst = budget_instance(rng, 6, 3, fraction=1.0)
        inst = inst.replace(budget=float(inst.costs.max(axis=1).sum()) + 1.0)
        plan = solve_budget_opt(inst)
        assert plan_choices(inst, plan) == score_argmax_choices(inst)


def test_infeasible_budget_reports_minimum():
    inst = two_model_instance(2, budget=1.5)
    with pytest.raises(InfeasibleBudgetError) as exc:
        solve_budget_opt(inst)
    assert exc.value.min_budget == pytest.approx(2.0)


def test_empty_and_missing_budget():
    inst = two_model_instance(0)
    plan = solve_budget_opt(inst)
    assert plan.assignment == {} and plan.total_cost == 0.0
    with pytest.raises(PreconditionError):
        solve_budget_opt(inst.replace(budget=None, quality_floor=0.5))


def test_three_section_binding_budget_matches_oracle():
    # m1 is better but pricier; the budget affords exactly one upgrade.
    inst = two_model_instance(3, budget=4.0, scores=[[0.9, 0.5], [0.8, 0.7], [0.95, 0.3]])
    plan = solve_budget_opt(inst)
    oracle = budget_opt_oracle(inst)
    assert plan.assignment == oracle.assignment == {"s0": "m2", "s1": "m2", "s2": "m1"}


def test_oracle_examples():
    inst = two_model_instance(1, budget=2.0, scores=[[0.6, 0.9]])
    assert budget_opt_oracle(inst).assignment == {"s0": "m2"}
    # Two sections, budget too small for m1 on both: oracle avoids the infeasible combination.
    inst = two_model_instance(2, budget=3.0, scores=[[0.9, 0.1], [0.9, 0.1]])
    plan = budget_opt_oracle(inst)
    assert plan.total_cost <= 3.0 and sorted(plan.assignment.values()) == ["m1", "m2"]


def test_oracle_guard():
    rng = np.random.default_rng(1)
    inst = budget_instance(rng, 12, 4)
    with pytest.raises(InstanceTooLargeError):
        budget_opt_oracle(inst, limit=10**5)


def test_relaxation_invariants_and_bound():
    rng = np.random.default_rng(2)
    for _ in range(40):
        inst = budget_instance(rng, 8, 3, latency=bool(rng.integers(0, 2)))
        try:
            frac = solve_relaxation(inst)
        except Exception:
            continue
        np.testing.assert_allclose(frac.x.sum(axis=1), 1.0, atol=1e-7)
        assert float(np.sum(inst.costs * frac.x)) <= inst.budget + 1e-7
        if inst.latency_sla is not None:
            assert np.all((inst.latencies * frac.x).sum(axis=0) <= inst.latency_sla + 1e-7)
        oracle = budget_opt_oracle(inst)
        assert oracle.objective <= frac.lp_objective + 1e-6


def test_lp_objective_monotone_in_budget():
    rng = np.random.default_rng(3)
    inst = budget_instance(rng, 20, 3)
    lo = inst.min_feasible_budget()
    hi = float(inst.costs.max(axis=1).sum())
    prev = -np.inf
    for f in np.linspace(0, 1, 9):
        obj = solve_budget_opt(inst.replace(budget=lo + f * (hi - lo))).lp_objective
        assert obj >= prev - 1e-9
        prev = obj


def test_score_scaling_keeps_assignment():
    rng = np.random.default_rng(4)
    for _ in range(10):
        inst = budget_instance(rng, 10, 3)
        a = solve_budget_opt(inst)
        b = solve_budget_opt(inst.replace(scores=inst.scores * 0.5))
        assert a.assignment == b.assignment


def test_repair_restores_budget():
    rng = np.random.default_rng(5)
    repaired = 0
    for _ in range(60):
        inst = budget_instance(rng, 15, 3)
        plan = solve_budget_opt(inst, repair=True)
        assert plan.budget_violation_fraction == 0.0
        if plan.method.endswith("repair"):
            repaired += 1
    assert repaired > 0


def test_integrality_gap():
    inst = two_model_instance(3, budget=4.5, scores=[[0.9, 0.5], [0.8, 0.7], [0.95, 0.3]])
    plan = solve_budget_opt(inst)
    assert integrality_gap(plan) == pytest.approx((plan.lp_objective - plan.objective) / plan.lp_objective)
