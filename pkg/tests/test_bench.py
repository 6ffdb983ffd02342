import json

import numpy as np
import pytest

from qcopt.bench import (
    BenchmarkConfig,
    cascade_choices,
    cost_at_score,
    generate_case,
    generate_instance,
    run_budget_sweep,
    SweepRow,
)
from qcopt.budget import solve_budget_opt
from qcopt.core import instance_to_dict
from qcopt.errors import ValidationError


def test_generate_deterministic():
    a = generate_instance(BenchmarkConfig(seed=3, n_sections=20))
    b = generate_instance(BenchmarkConfig(seed=3, n_sections=20))
    assert instance_to_dict(a) == instance_to_dict(b)
    c = generate_instance(BenchmarkConfig(seed=4, n_sections=20))
    assert instance_to_dict(a) != instance_to_dict(c)


def test_empty_and_single_model():
    inst = generate_instance(BenchmarkConfig(n_sections=0))
    assert solve_budget_opt(inst.replace(budget=1.0)).assignment == {}
    inst = generate_instance(BenchmarkConfig(n_sections=5, K=1))
    lo = inst.min_feasible_budget()
    plan = solve_budget_opt(inst.replace(budget=lo))
    assert set(plan.assignment.values()) == {inst.models[0].id}


@pytest.mark.parametrize(
    "kw",
    [
        {"score_beta": ((0.0, 1.0), (1.0, 1.0), (1.0, 1.0))},
        {"K": 4},
        {"token_range": (10, 5)},
        {"baselines": ("oracle",)},
        {"cascade_threshold": 1.5},
        {"n_sections": -1},
    ],
)
def test_config_validation(kw):
    with pytest.raises(ValidationError):
        BenchmarkConfig(**kw)


def test_sweep_structure():
    rep = run_budget_sweep(BenchmarkConfig(seed=1, n_sections=30))
    ours = rep.method_rows()
    assert [r.budget for r in ours] == sorted(r.budget for r in ours)
    for r in ours + rep.method_rows("random") + rep.baselines:
        assert sum(r.allocation.values()) == pytest.approx(1.0, abs=1e-9)
    lp = [r.lp_objective for r in ours]
    assert all(a <= b + 1e-9 for a, b in zip(lp, lp[1:]))
    methods = {b.method for b in rep.baselines}
    assert "cascade" in methods and sum(m.startswith("single:") for m in methods) == 3
    assert rep.latency is not None and rep.latency["reference_model"] == "gpt-3.5-turbo-4k"
    json.loads(rep.to_json())


def test_random_rows_keep_allocation():
    rep = run_budget_sweep(BenchmarkConfig(seed=2, n_sections=30))
    for ours, rnd in zip(rep.method_rows(), rep.method_rows("random")):
        assert ours.allocation == rnd.allocation


def test_workers_do_not_change_report():
    a = run_budget_sweep(BenchmarkConfig(seed=5, n_sections=25)).to_json()
    b = run_budget_sweep(BenchmarkConfig(seed=5, n_sections=25, workers=3)).to_json()
    assert a == b


def test_solver_errors_are_recorded():
    rep = run_budget_sweep(BenchmarkConfig(seed=1, n_sections=10, budgets=(0.0, 100.0)))
    rows = rep.method_rows()
    assert rows[0].error and "InfeasibleBudgetError" in rows[0].error
    assert rows[1].error is None


def test_cascade_accumulates_every_call():
    case = generate_case(BenchmarkConfig(seed=0, n_sections=10))
    finals, cost, calls = cascade_choices(case.instance, case.true_scores, threshold=1.01)
    assert all(len(c) == 3 for c in calls)  # nothing reaches the threshold: every model is called
    assert cost == pytest.approx(float(case.instance.costs.sum()))
    _, cost0, calls0 = cascade_choices(case.instance, case.true_scores, threshold=0.0)
    assert all(len(c) == 1 for c in calls0) and cost0 < cost


def test_cost_at_score_interpolates():
    rows = [SweepRow(1.0, "budget-opt", 1.0, 0.5, {}), SweepRow(2.0, "budget-opt", 3.0, 0.7, {})]
    assert cost_at_score(rows, 0.6) == pytest.approx(2.0)
    assert cost_at_score(rows, 0.4) == pytest.approx(1.0)
    assert cost_at_score(rows, 0.9) is None
