"""Cost and latency model shared by every routing solver.

Arrays attached to an instance are indexed section-major: ``scores[j, i]`` is
the predicted quality of model ``i`` on section ``j``; the same holds for the
cost and latency matrices.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    ScoreRangeError,
    UnknownKeyError,
    ValidationError,
)

COST_TOL = 1e-9


def _check_nonneg(owner, name, value):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"{owner}: {name} must be a number, got {value!r}")
    if not math.isfinite(value) or value < 0:
        raise ValidationError(f"{owner}: {name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class ModelProfile:
    id: str
    input_cost_per_token: float
    output_cost_per_token: float
    fixed_cost: float = 0.0
    latency_per_token: float = 0.0
    avg_tokens_per_sentence: float = 20.0
    tokenizer_id: str = "cl100k_base"

    def __post_init__(self):
        for name in ("input_cost_per_token", "output_cost_per_token", "fixed_cost", "latency_per_token"):
            _check_nonneg(f"model {self.id!r}", name, getattr(self, name))
        _check_nonneg(f"model {self.id!r}", "avg_tokens_per_sentence", self.avg_tokens_per_sentence)
        if self.avg_tokens_per_sentence <= 0:
            raise ValidationError(f"model {self.id!r}: avg_tokens_per_sentence must be > 0")


@dataclass(frozen=True)
class Section:
    id: str
    input_tokens_per_model: Mapping[str, int]
    summary_sentences: int = 1
    text: str | None = None

    def __post_init__(self):
        if not isinstance(self.summary_sentences, int) or self.summary_sentences < 1:
            raise ValidationError(f"section {self.id!r}: summary_sentences must be an integer >= 1")
        for model_id, n in self.input_tokens_per_model.items():
            if not isinstance(n, int) or isinstance(n, bool) or n < 0:
                raise ValidationError(
                    f"section {self.id!r}: token count for model {model_id!r} must be an integer >= 0"
                )

    def input_tokens(self, model: ModelProfile) -> int:
        try:
            return self.input_tokens_per_model[model.id]
        except KeyError:
            raise ConfigurationError(
                f"section {self.id!r} has no input token length for model {model.id!r}"
            ) from None


def estimated_output_tokens(section: Section, model: ModelProfile) -> int:
    """Expected summary length: ``ceil(p * avg_tokens_per_sentence)``."""
    return math.ceil(section.summary_sentences * model.avg_tokens_per_sentence)


def estimated_total_tokens(section: Section, model: ModelProfile) -> int:
    return section.input_tokens(model) + estimated_output_tokens(section, model)


def estimated_cost(section: Section, model: ModelProfile) -> float:
    n_in = section.input_tokens(model)
    n_out = estimated_output_tokens(section, model)
    return (
        model.input_cost_per_token * n_in
        + model.output_cost_per_token * n_out
        + model.fixed_cost
    )


def estimated_latency(section: Section, model: ModelProfile) -> float:
    return model.latency_per_token * estimated_total_tokens(section, model)


def fits(load: float, limit: float) -> bool:
    """Tolerant ``load <= limit`` used for budget and latency checks."""
    return load <= limit + COST_TOL * max(1.0, abs(limit))


@dataclass(frozen=True)
class RoutingInstance:
    models: tuple[ModelProfile, ...]
    sections: tuple[Section, ...]
    scores: np.ndarray
    budget: float | None = None
    latency_sla: float | None = None
    quality_floor: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        object.__setattr__(self, "sections", tuple(self.sections))
        scores = np.array(self.scores, dtype=float).reshape(len(self.sections), len(self.models))
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

        model_ids = [m.id for m in self.models]
        if len(set(model_ids)) != len(model_ids):
            raise ValidationError("duplicate model ids")
        section_ids = [s.id for s in self.sections]
        if len(set(section_ids)) != len(section_ids):
            raise ValidationError("duplicate section ids")
        if not self.models:
            raise ValidationError("an instance needs at least one model")
        for j, sec in enumerate(self.sections):
            for i, model in enumerate(self.models):
                sec.input_tokens(model)
                v = scores[j, i]
                if not (0.0 <= v <= 1.0):
                    raise ScoreRangeError(sec.id, model.id, float(v))
        for name in ("budget", "latency_sla"):
            value = getattr(self, name)
            if value is not None:
                _check_nonneg("instance", name, value)
        if self.quality_floor is not None and not (
            isinstance(self.quality_floor, (int, float)) and math.isfinite(self.quality_floor)
        ):
            raise ValidationError("instance: quality_floor must be a finite number")
        if self.budget is None and self.quality_floor is None:
            raise ValidationError("instance needs a budget (Budget-Opt) or a quality_floor (Cost-Min)")

    @property
    def n_sections(self) -> int:
        return len(self.sections)

    @property
    def n_models(self) -> int:
        return len(self.models)

    @cached_property
    def costs(self) -> np.ndarray:
        out = np.array(
            [[estimated_cost(s, m) for m in self.models] for s in self.sections], dtype=float
        ).reshape(self.n_sections, self.n_models)
        out.setflags(write=False)
        return out

    @cached_property
    def latencies(self) -> np.ndarray:
        out = np.array(
            [[estimated_latency(s, m) for m in self.models] for s in self.sections], dtype=float
        ).reshape(self.n_sections, self.n_models)
        out.setflags(write=False)
        return out

    @cached_property
    def total_tokens(self) -> np.ndarray:
        return np.array(
            [[estimated_total_tokens(s, m) for m in self.models] for s in self.sections], dtype=np.int64
        ).reshape(self.n_sections, self.n_models)

    def model_index(self, model_id: str) -> int:
        for i, m in enumerate(self.models):
            if m.id == model_id:
                return i
        raise KeyError(model_id)

    def min_feasible_budget(self) -> float:
        """Cost of sending every section to its cheapest model."""
        return float(sum(self.costs.min(axis=1).tolist())) if self.n_sections else 0.0

    def replace(self, **changes) -> "RoutingInstance":
        fields_ = dict(
            models=self.models,
            sections=self.sections,
            scores=self.scores,
            budget=self.budget,
            latency_sla=self.latency_sla,
            quality_floor=self.quality_floor,
        )
        fields_.update(changes)
        return RoutingInstance(**fields_)


@dataclass
class RoutingPlan:
    assignment: dict[str, str]
    total_cost: float
    per_model_latency: dict[str, float]
    objective: float
    budget_violation_fraction: float = 0.0
    lp_objective: float | None = None
    latency_violation: bool = False
    feasible: bool = True
    unassigned_sections: list[str] = field(default_factory=list)
    method: str = ""

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "assignment": dict(self.assignment),
            "total_cost": self.total_cost,
            "objective": self.objective,
            "lp_objective": self.lp_objective,
            "budget_violation_fraction": self.budget_violation_fraction,
            "per_model_latency": dict(self.per_model_latency),
            "latency_violation": self.latency_violation,
            "feasible": self.feasible,
            "unassigned_sections": list(self.unassigned_sections),
        }
        return out


def plan_from_choices(instance: RoutingInstance, choices: Sequence[int | None], method="", **extra) -> RoutingPlan:
    """Build a plan from per-section model indices (``None`` = unassigned).

    Totals are accumulated left to right in section order so every solver
    reports bit-identical costs for identical assignments.
    """
    costs = instance.costs
    lat = instance.latencies
    scores = instance.scores
    assignment: dict[str, str] = {}
    unassigned: list[str] = []
    total_cost = 0.0
    objective = 0.0
    per_model = [0.0] * instance.n_models
    for j, i in enumerate(choices):
        sec = instance.sections[j]
        if i is None:
            unassigned.append(sec.id)
            continue
        assignment[sec.id] = instance.models[i].id
        total_cost += float(costs[j, i])
        objective += float(scores[j, i])
        per_model[i] += float(lat[j, i])

    violation = 0.0
    if instance.budget is not None:
        if instance.budget > 0:
            violation = max(0.0, total_cost / instance.budget - 1.0)
        elif total_cost > 0:
            violation = math.inf
    latency_violation = False
    if instance.latency_sla is not None:
        latency_violation = any(not fits(x, instance.latency_sla) for x in per_model)

    extra.setdefault("feasible", not unassigned)
    return RoutingPlan(
        assignment=assignment,
        total_cost=total_cost,
        per_model_latency={m.id: per_model[i] for i, m in enumerate(instance.models)},
        objective=objective,
        budget_violation_fraction=violation,
        latency_violation=latency_violation,
        unassigned_sections=unassigned,
        method=method,
        **extra,
    )


def plan_choices(instance: RoutingInstance, plan: RoutingPlan) -> list[int | None]:
    index = {m.id: i for i, m in enumerate(instance.models)}
    return [index[plan.assignment[s.id]] if s.id in plan.assignment else None for s in instance.sections]


# --- JSON instance files ---------------------------------------------------

_TOP_KEYS = {"models", "sections", "scores", "budget", "latency_sla", "quality_floor"}
_MODEL_KEYS = {
    "id", "input_cost_per_token", "output_cost_per_token", "fixed_cost",
    "latency_per_token", "avg_tokens_per_sentence", "tokenizer_id",
}
_SECTION_KEYS = {"id", "text", "input_tokens_per_model", "summary_sentences"}


def _reject_unknown(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: expected a JSON object")
    extra = sorted(set(obj) - allowed)
    if extra:
        raise UnknownKeyError(f"{where}: unknown key(s) {', '.join(map(repr, extra))}")


def instance_from_dict(data: dict, vocabularies: Mapping | None = None) -> RoutingInstance:
    """Build an instance from its JSON form.

    Sections that carry ``text`` but lack token counts for some model are
    tokenized here with that model's tokenizer; ``vocabularies`` may map
    tokenizer ids to preloaded vocabularies.
    """
    from .tokenizer import get_vocabulary

    _reject_unknown(data, _TOP_KEYS, "instance")
    for key in ("models", "sections", "scores"):
        if key not in data:
            raise ValidationError(f"instance: missing required key {key!r}")

    models = []
    for k, m in enumerate(data["models"]):
        _reject_unknown(m, _MODEL_KEYS, f"models[{k}]")
        if "id" not in m:
            raise ValidationError(f"models[{k}]: missing 'id'")
        models.append(ModelProfile(**{key: m[key] for key in m}))

    vocabularies = dict(vocabularies or {})
    sections = []
    for k, s in enumerate(data["sections"]):
        _reject_unknown(s, _SECTION_KEYS, f"sections[{k}]")
        if "id" not in s:
            raise ValidationError(f"sections[{k}]: missing 'id'")
        tokens = dict(s.get("input_tokens_per_model") or {})
        text = s.get("text")
        for m in models:
            if m.id in tokens:
                continue
            if text is None:
                raise ConfigurationError(
                    f"section {s['id']!r} has neither text nor a token length for model {m.id!r}"
                )
            if m.tokenizer_id not in vocabularies:
                vocabularies[m.tokenizer_id] = get_vocabulary(m.tokenizer_id)
            tokens[m.id] = vocabularies[m.tokenizer_id].count(text)
        sections.append(
            Section(
                id=str(s["id"]),
                input_tokens_per_model=tokens,
                summary_sentences=s.get("summary_sentences", 1),
                text=text,
            )
        )

    scores = data["scores"]
    if not isinstance(scores, list) or len(scores) != len(sections):
        raise ValidationError(
            f"instance: scores must be a list of {len(sections)} rows (one per section)"
        )
    for j, row in enumerate(scores):
        if not isinstance(row, list) or len(row) != len(models):
            raise ValidationError(f"instance: scores row {j} must have {len(models)} entries")
        for i, v in enumerate(row):
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not (0.0 <= v <= 1.0):
                raise ScoreRangeError(sections[j].id, models[i].id, v)

    return RoutingInstance(
        models=tuple(models),
        sections=tuple(sections),
        scores=np.array(scores, dtype=float).reshape(len(sections), len(models)),
        budget=data.get("budget"),
        latency_sla=data.get("latency_sla"),
        quality_floor=data.get("quality_floor"),
    )


def instance_to_dict(instance: RoutingInstance) -> dict:
    out = {
        "models": [
            {
                "id": m.id,
                "input_cost_per_token": m.input_cost_per_token,
                "output_cost_per_token": m.output_cost_per_token,
                "fixed_cost": m.fixed_cost,
                "latency_per_token": m.latency_per_token,
                "avg_tokens_per_sentence": m.avg_tokens_per_sentence,
                "tokenizer_id": m.tokenizer_id,
            }
            for m in instance.models
        ],
        "sections": [],
        "scores": instance.scores.tolist(),
        "budget": instance.budget,
        "latency_sla": instance.latency_sla,
        "quality_floor": instance.quality_floor,
    }
    for s in instance.sections:
        entry = {
            "id": s.id,
            "input_tokens_per_model": dict(s.input_tokens_per_model),
            "summary_sentences": s.summary_sentences,
        }
        if s.text is not None:
            entry["text"] = s.text
        out["sections"].append(entry)
    return out


def load_instance(path, vocabularies=None) -> RoutingInstance:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    return instance_from_dict(data, vocabularies)


def save_instance(instance: RoutingInstance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=2) + "\n", encoding="utf-8")


# Per-1K-token OpenAI list prices, shipped as example fixtures only.
TABLE1_PRICES_PER_1K = {
    "text-davinci-002": (0.02, 0.02),
    "text-davinci-003": (0.02, 0.02),
    "text-curie-001": (0.002, 0.002),
    "gpt-3.5-turbo-4k": (0.0015, 0.002),
    "gpt-3.5-turbo-16k": (0.003, 0.004),
    "gpt-4-8k": (0.03, 0.06),
    "gpt-4-16k": (0.06, 0.12),
}


def table1_profile(model_id: str, **overrides) -> ModelProfile:
    in_1k, out_1k = TABLE1_PRICES_PER_1K[model_id]
    kwargs = dict(
        id=model_id,
        input_cost_per_token=in_1k / 1000.0,
        output_cost_per_token=out_1k / 1000.0,
    )
    kwargs.update(overrides)
    return ModelProfile(**kwargs)
