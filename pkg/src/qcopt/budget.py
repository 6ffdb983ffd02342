"""Budget-constrained routing: LP relaxation, argmax rounding, exact oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RoutingInstance, RoutingPlan, fits, plan_from_choices
from .errors import InfeasibleBudgetError, InfeasibleError, PreconditionError
from .lp import LE, EQ, LinearProgram, solve
from .oracle import enumerate_best

ROUND_TIE_TOL = 1e-9


@dataclass
class FractionalAllocation:
    """Relaxed assignment ``x[j, i]`` in [0, 1] (section-major)."""

    x: np.ndarray
    lp_objective: float


def build_relaxation(instance: RoutingInstance) -> LinearProgram:
    """LP with one variable per (section, model) pair, index ``j * K + i``."""
    if instance.budget is None:
        raise PreconditionError("Budget-Opt needs a budget")
    n, K = instance.n_sections, instance.n_models
    nv = n * K
    objective = instance.scores.reshape(nv)
    constraints = [(instance.costs.reshape(nv), LE, instance.budget)]
    if instance.latency_sla is not None:
        lat = instance.latencies
        for i in range(K):
            row = np.zeros((n, K))
            row[:, i] = lat[:, i]
            constraints.append((row.reshape(nv), LE, instance.latency_sla))
    for j in range(n):
        row = np.zeros((n, K))
        row[j, :] = 1.0
        constraints.append((row.reshape(nv), EQ, 1.0))
    return LinearProgram(objective, constraints, [(0.0, 1.0)] * nv)


def solve_relaxation(instance: RoutingInstance) -> FractionalAllocation:
    lp = build_relaxation(instance)
    sol = solve(lp)
    if not sol.optimal:
        raise InfeasibleError(f"Budget-Opt relaxation is {sol.status}")
    x = np.clip(sol.values.reshape(instance.n_sections, instance.n_models), 0.0, 1.0)
    return FractionalAllocation(x=x, lp_objective=sol.objective_value)


def round_allocation(frac: FractionalAllocation, instance: RoutingInstance) -> RoutingPlan:
    """Send each section to its largest fractional model.

    Near-ties (within 1e-9) go to the cheaper model, then the lower index.
    """
    costs = instance.costs
    choices = []
    for j in range(instance.n_sections):
        row = frac.x[j]
        top = row.max()
        tied = [i for i in range(instance.n_models) if row[i] >= top - ROUND_TIE_TOL]
        choices.append(min(tied, key=lambda i: (costs[j, i], i)))
    return plan_from_choices(instance, choices, method="budget-opt", lp_objective=frac.lp_objective)


def repair_budget(instance: RoutingInstance, plan: RoutingPlan) -> RoutingPlan:
    """Greedily move sections to cheaper models until the budget holds.

    Each step takes the move with the smallest score loss per unit of cost
    saved. Not part of the default pipeline.
    """
    from .core import plan_choices

    choices = plan_choices(instance, plan)
    costs, scores = instance.costs, instance.scores
    total = plan.total_cost
    while not fits(total, instance.budget):
        best = None
        for j, cur in enumerate(choices):
            for i in range(instance.n_models):
                saved = costs[j, cur] - costs[j, i]
                if saved <= 0:
                    continue
                key = ((scores[j, cur] - scores[j, i]) / saved, j, i)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, j, i = best
        total -= costs[j, choices[j]] - costs[j, i]
        choices[j] = i
    out = plan_from_choices(
        instance, choices, method="budget-opt+repair", lp_objective=plan.lp_objective
    )
    return out


def solve_budget_opt(instance: RoutingInstance, repair: bool = False) -> RoutingPlan:
    """Relax, solve, round. ``plan.lp_objective`` upper-bounds any integral plan."""
    if instance.budget is None:
        raise PreconditionError("Budget-Opt needs a budget")
    if instance.n_sections == 0:
        return plan_from_choices(instance, [], method="budget-opt", lp_objective=0.0)
    min_budget = instance.min_feasible_budget()
    if not fits(min_budget, instance.budget):
        raise InfeasibleBudgetError(instance.budget, min_budget)
    frac = solve_relaxation(instance)
    plan = round_allocation(frac, instance)
    if repair and plan.budget_violation_fraction > 0:
        plan = repair_budget(instance, plan)
    return plan


def budget_opt_oracle(instance: RoutingInstance, limit: int = 10**7) -> RoutingPlan:
    """Exhaustive Budget-Opt: best feasible objective, then lower cost, then lexicographic."""
    if instance.budget is None:
        raise PreconditionError("Budget-Opt needs a budget")
    choices = enumerate_best(instance, maximize_score=True, budget=instance.budget, limit=limit)
    if choices is None:
        min_budget = instance.min_feasible_budget()
        if not fits(min_budget, instance.budget):
            raise InfeasibleBudgetError(instance.budget, min_budget)
        raise InfeasibleError("no assignment satisfies the budget and latency constraints")
    return plan_from_choices(instance, choices, method="budget-opt-oracle")


def score_argmax_choices(instance: RoutingInstance) -> list[int]:
    """Per-section best-score model, ties to the cheaper model then lower index."""
    out = []
    for j in range(instance.n_sections):
        row = instance.scores[j]
        top = row.max()
        tied = [i for i in range(instance.n_models) if row[i] == top]
        out.append(min(tied, key=lambda i: (instance.costs[j, i], i)))
    return out


def integrality_gap(plan: RoutingPlan) -> float:
    if plan.lp_objective is None or plan.lp_objective == 0:
        return math.nan
    return (plan.lp_objective - plan.objective) / plan.lp_objective
