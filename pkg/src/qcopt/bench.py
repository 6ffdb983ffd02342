"""Seeded synthetic instances and the budget-sweep benchmark.

Scores come in two flavours: ``true`` scores stand in for the quality a
model would really achieve, and ``predicted`` scores (true plus Gaussian
noise) are what the router sees. Reported mean scores always use the true
scores, so the router is judged on outcomes rather than on its own beliefs.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .budget import score_argmax_choices, solve_budget_opt
from .core import RoutingInstance, Section, plan_choices, table1_profile
from .errors import QCOptError, ValidationError

DEFAULT_MODELS = ("gpt-3.5-turbo-4k", "text-davinci-003", "text-curie-001")

# Per-call response latency estimates in seconds, as published alongside the
# method. Used only for the latency-savings estimate.
CALL_LATENCY_S = {
    "gpt-3.5-turbo-4k": 1.5,
    "text-davinci-003": 2.0,
    "text-curie-001": 0.4,
}

# Beta(a, b) per model. The two large models are close on average and the
# small one trails, so no model dominates section by section.
DEFAULT_SCORE_BETA = ((8.0, 2.0), (8.5, 2.0), (5.0, 2.5))

BASELINES = ("single-model", "random", "cascade")


@dataclass
class BenchmarkConfig:
    seed: int = 0
    n_sections: int = 80
    K: int = 3
    models: tuple[str, ...] = DEFAULT_MODELS
    score_beta: tuple[tuple[float, float], ...] = DEFAULT_SCORE_BETA
    token_range: tuple[int, int] = (200, 1200)
    summary_sentences: tuple[int, int] = (1, 4)
    prediction_noise: float = 0.047
    # Budgets as fractions of the way from the cheapest full assignment to
    # the cost of the score-argmax assignment. Ignored when ``budgets`` is set.
    budget_fractions: tuple[float, ...] = (0.0, 0.1, 0.25, 0.5, 0.75, 1.0)
    budgets: tuple[float, ...] | None = None
    baselines: tuple[str, ...] = BASELINES
    cascade_threshold: float = 0.75
    latency_sla: float | None = None
    repair: bool = False
    workers: int = 1

    def __post_init__(self):
        self.models = tuple(self.models)
        self.score_beta = tuple(tuple(float(v) for v in ab) for ab in self.score_beta)
        self.token_range = tuple(self.token_range)
        self.summary_sentences = tuple(self.summary_sentences)
        self.budget_fractions = tuple(float(f) for f in self.budget_fractions)
        if self.budgets is not None:
            self.budgets = tuple(float(b) for b in self.budgets)
        self.baselines = tuple(self.baselines)
        if not isinstance(self.n_sections, int) or self.n_sections < 0:
            raise ValidationError("n_sections must be an integer >= 0")
        if not (1 <= self.K <= len(self.models)):
            raise ValidationError(f"K must be between 1 and {len(self.models)}")
        if len(self.score_beta) < self.K:
            raise ValidationError(f"score_beta needs at least {self.K} (a, b) pairs")
        for a, b in self.score_beta[: self.K]:
            if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
                raise ValidationError(f"Beta parameters must be positive and finite, got ({a}, {b})")
        lo, hi = self.token_range
        if not (0 <= lo <= hi):
            raise ValidationError("token_range must satisfy 0 <= low <= high")
        plo, phi = self.summary_sentences
        if not (1 <= plo <= phi):
            raise ValidationError("summary_sentences must satisfy 1 <= low <= high")
        if not (self.prediction_noise >= 0):
            raise ValidationError("prediction_noise must be >= 0")
        if any(f < 0 for f in self.budget_fractions):
            raise ValidationError("budget fractions must be >= 0")
        if self.budgets is not None and any(b < 0 for b in self.budgets):
            raise ValidationError("budgets must be >= 0")
        unknown = set(self.baselines) - set(BASELINES)
        if unknown:
            raise ValidationError(f"unknown baseline(s): {', '.join(sorted(unknown))}")
        if not (0.0 <= self.cascade_threshold <= 1.0):
            raise ValidationError("cascade_threshold must lie in [0, 1]")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")


@dataclass(frozen=True)
class SyntheticCase:
    """A routing instance (carrying predicted scores) plus the true scores."""

    instance: RoutingInstance
    true_scores: np.ndarray


def generate_case(cfg: BenchmarkConfig) -> SyntheticCase:
    rng = np.random.default_rng(cfg.seed)
    models = tuple(table1_profile(mid) for mid in cfg.models[: cfg.K])
    n, K = cfg.n_sections, cfg.K
    lo, hi = cfg.token_range
    sections = []
    for j in range(n):
        # Token counts differ a little per model, as different tokenizers would.
        base = int(rng.integers(lo, hi + 1))
        tokens = {m.id: max(0, base + int(rng.integers(-base // 20 - 1, base // 20 + 2))) for m in models}
        p = int(rng.integers(cfg.summary_sentences[0], cfg.summary_sentences[1] + 1))
        sections.append(Section(id=f"s{j:04d}", input_tokens_per_model=tokens, summary_sentences=p))
    true = np.empty((n, K))
    for i in range(K):
        a, b = cfg.score_beta[i]
        true[:, i] = rng.beta(a, b, size=n)
    predicted = np.clip(true + rng.normal(0.0, cfg.prediction_noise, size=(n, K)), 0.0, 1.0)
    inst = RoutingInstance(
        models=models,
        sections=tuple(sections),
        scores=predicted,
        budget=0.0,
        latency_sla=cfg.latency_sla,
    )
    true.setflags(write=False)
    return SyntheticCase(inst, true)


def generate_instance(cfg: BenchmarkConfig) -> RoutingInstance:
    """Seeded instance with Table 1 price fixtures; its budget is a 0.0 placeholder."""
    return generate_case(cfg).instance


def budget_span(instance: RoutingInstance) -> tuple[float, float]:
    """(cheapest full assignment, cost of the score-argmax assignment)."""
    if instance.n_sections == 0:
        return 0.0, 0.0
    choices = score_argmax_choices(instance)
    hi = 0.0
    for j, i in enumerate(choices):
        hi += float(instance.costs[j, i])
    return instance.min_feasible_budget(), hi


def resolve_budgets(cfg: BenchmarkConfig, instance: RoutingInstance) -> list[float]:
    if cfg.budgets is not None:
        return sorted(cfg.budgets)
    lo, hi = budget_span(instance)
    return sorted(lo + f * (hi - lo) for f in cfg.budget_fractions)


# --- report rows -------------------------------------------------------------


@dataclass
class SweepRow:
    budget: float | None  # None for budget-independent baselines
    method: str
    cost: float | None
    mean_score: float | None
    allocation: dict[str, float]
    objective: float | None = None
    lp_objective: float | None = None
    budget_violation_fraction: float | None = None
    latency_violation: bool | None = None
    error: str | None = None


@dataclass
class BenchmarkReport:
    config: dict
    budgets: list[float]
    rows: list[SweepRow] = field(default_factory=list)
    baselines: list[SweepRow] = field(default_factory=list)
    violation: dict = field(default_factory=dict)
    latency: dict | None = None

    def method_rows(self, method="budget-opt") -> list[SweepRow]:
        return [r for r in self.rows if r.method == method]

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "budgets": self.budgets,
            "rows": [asdict(r) for r in self.rows],
            "baselines": [asdict(r) for r in self.baselines],
            "violation": self.violation,
            "latency": self.latency,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def allocation_fractions(instance: RoutingInstance, choices) -> dict[str, float]:
    n = len(choices)
    counts = [0] * instance.n_models
    for i in choices:
        counts[i] += 1
    if n == 0:
        return {m.id: 0.0 for m in instance.models}
    return {m.id: counts[i] / n for i, m in enumerate(instance.models)}


def evaluate_choices(instance: RoutingInstance, true_scores: np.ndarray, choices) -> tuple[float, float]:
    """(total cost, mean true score) of an assignment, summed in section order."""
    cost = 0.0
    score = 0.0
    for j, i in enumerate(choices):
        cost += float(instance.costs[j, i])
        score += float(true_scores[j, i])
    n = len(choices)
    return cost, (score / n if n else 0.0)


def random_baseline_choices(choices, rng: np.random.Generator) -> list[int]:
    """Shuffle which sections get which model; per-model counts are kept exactly."""
    out = list(choices)
    rng.shuffle(out)
    return out


def cascade_choices(instance: RoutingInstance, true_scores: np.ndarray, threshold: float):
    """Query models cheapest first until a true score reaches ``threshold``.

    Returns ``(final_choices, total_cost_of_all_calls, calls_per_section)``.
    The last model queried supplies the answer when none reaches the threshold.
    """
    order = sorted(
        range(instance.n_models),
        key=lambda i: (float(instance.costs[:, i].sum()) if instance.n_sections else 0.0, i),
    )
    finals = []
    calls = []
    cost = 0.0
    for j in range(instance.n_sections):
        chain = []
        for i in order:
            chain.append(i)
            cost += float(instance.costs[j, i])
            if true_scores[j, i] >= threshold:
                break
        finals.append(chain[-1])
        calls.append(chain)
    return finals, cost, calls


def latency_estimate(instance: RoutingInstance, choices) -> dict | None:
    """Total API wait time of one call per section vs all calls on the first model.

    Uses the published per-call estimates; ``None`` when a model lacks one.
    """
    if any(m.id not in CALL_LATENCY_S for m in instance.models) or not choices:
        return None
    ours = 0.0
    for i in choices:
        ours += CALL_LATENCY_S[instance.models[i].id]
    ref_model = instance.models[0].id
    baseline = CALL_LATENCY_S[ref_model] * len(choices)
    return {
        "reference_model": ref_model,
        "reference_seconds": baseline,
        "ours_seconds": ours,
        "reduction": 1.0 - ours / baseline if baseline else 0.0,
    }


def _solve_point(case: SyntheticCase, budget: float, cfg: BenchmarkConfig, index: int):
    inst = case.instance.replace(budget=budget)
    try:
        plan = solve_budget_opt(inst, repair=cfg.repair)
    except QCOptError as exc:
        row = SweepRow(budget, "budget-opt", None, None, {}, error=f"{type(exc).__name__}: {exc}")
        return row, None, None
    choices = plan_choices(inst, plan)
    cost, mean = evaluate_choices(inst, case.true_scores, choices)
    row = SweepRow(
        budget=budget,
        method="budget-opt",
        cost=cost,
        mean_score=mean,
        allocation=allocation_fractions(inst, choices),
        objective=plan.objective,
        lp_objective=plan.lp_objective,
        budget_violation_fraction=plan.budget_violation_fraction,
        latency_violation=plan.latency_violation,
    )
    rnd = None
    if "random" in cfg.baselines:
        rng = np.random.default_rng([cfg.seed, index, 1])
        rc = random_baseline_choices(choices, rng)
        rcost, rmean = evaluate_choices(inst, case.true_scores, rc)
        rnd = SweepRow(budget, "random", rcost, rmean, allocation_fractions(inst, rc))
    return row, rnd, choices


def run_budget_sweep(cfg: BenchmarkConfig, case: SyntheticCase | None = None) -> BenchmarkReport:
    """Solve Budget-Opt at every budget and lay baselines alongside.

    Budget points run on ``cfg.workers`` threads; rows are always reported
    in ascending budget order. Solver errors at one budget are recorded in
    that row instead of aborting the sweep.
    """
    case = case or generate_case(cfg)
    inst = case.instance
    budgets = resolve_budgets(cfg, inst)

    jobs = [(case, b, cfg, k) for k, b in enumerate(budgets)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(lambda a: _solve_point(*a), jobs))
    else:
        results = [_solve_point(*a) for a in jobs]

    report = BenchmarkReport(config=_config_dict(cfg), budgets=budgets)
    for row, rnd, _ in results:
        report.rows.append(row)
        if rnd is not None:
            report.rows.append(rnd)

    if "single-model" in cfg.baselines:
        for i, m in enumerate(inst.models):
            choices = [i] * inst.n_sections
            cost, mean = evaluate_choices(inst, case.true_scores, choices)
            report.baselines.append(
                SweepRow(None, f"single:{m.id}", cost, mean, allocation_fractions(inst, choices))
            )
    if "cascade" in cfg.baselines:
        finals, cost, calls = cascade_choices(inst, case.true_scores, cfg.cascade_threshold)
        _, mean = evaluate_choices(inst, case.true_scores, finals)
        report.baselines.append(
            SweepRow(None, "cascade", cost, mean, allocation_fractions(inst, finals))
        )

    solved = [r for r in report.method_rows() if r.error is None]
    violations = [r.budget_violation_fraction for r in solved]
    report.violation = {
        "points": len(violations),
        "mean": float(np.mean(violations)) if violations else 0.0,
        "max": float(max(violations)) if violations else 0.0,
        "violating_points": sum(1 for v in violations if v > 0),
    }
    if solved:
        mid = results[len(results) // 2]
        if mid[2] is not None:
            report.latency = latency_estimate(inst, mid[2])
    return report


def _config_dict(cfg: BenchmarkConfig) -> dict:
    out = asdict(cfg)
    # Thread count never changes results, so it stays out of the report.
    out.pop("workers")
    for k, v in out.items():
        if isinstance(v, tuple):
            out[k] = [list(x) if isinstance(x, tuple) else x for x in v]
    return out


# --- aggregate studies used by the acceptance suite ------------------------


def cost_at_score(rows: list[SweepRow], target: float) -> float | None:
    """Cheapest cost on our (cost, mean score) curve reaching ``target``.

    Linear interpolation between adjacent budget points; ``None`` if no
    point on the curve reaches the target.
    """
    pts = sorted((r.cost, r.mean_score) for r in rows if r.error is None and r.cost is not None)
    best = None
    for k, (c, s) in enumerate(pts):
        if s >= target:
            cand = c
            if k > 0:
                c0, s0 = pts[k - 1]
                if s0 < target and s > s0:
                    cand = c0 + (target - s0) / (s - s0) * (c - c0)
            best = cand if best is None else min(best, cand)
    return best


def violation_study(seeds, n_sections: int = 300, fraction_range=(0.05, 0.95), **cfg_kwargs):
    """Budget-violation fractions of rounded plans over seeded instances with binding budgets.

    Each seed draws one instance and one budget strictly between the cheapest
    assignment and the score-argmax cost. Returns a list of
    ``(seed, budget, violation_fraction)``.
    """
    out = []
    for seed in seeds:
        cfg = BenchmarkConfig(seed=seed, n_sections=n_sections, baselines=(), **cfg_kwargs)
        inst = generate_instance(cfg)
        lo, hi = budget_span(inst)
        rng = np.random.default_rng([seed, 7])
        f = float(rng.uniform(*fraction_range))
        budget = lo + f * (hi - lo)
        plan = solve_budget_opt(inst.replace(budget=budget))
        out.append((seed, budget, plan.budget_violation_fraction))
    return out
