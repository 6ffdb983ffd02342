"""Cost- and quality-aware routing of text sections across LLMs, plus token trimming."""

from .budget import budget_opt_oracle, solve_budget_opt
from .core import (
    ModelProfile,
    RoutingInstance,
    RoutingPlan,
    Section,
    estimated_cost,
    estimated_latency,
    load_instance,
    save_instance,
    table1_profile,
)
from .costmin import cost_min_oracle, greedy_cost_min, solve_cost_min, solve_flow_cost_min
from .errors import InfeasibleError, QCOptError, ValidationError
from .quality import LossWeights, ScoreVectors, load_scores, mse_loss, pairwise_diff_loss, total_loss
from .tokenizer import TokenVocabulary, count_tokens, decode, default_vocabulary, encode

__version__ = "0.1.0"

__all__ = [
    "budget_opt_oracle", "solve_budget_opt", "ModelProfile", "RoutingInstance", "RoutingPlan", "Section",
    "estimated_cost", "estimated_latency", "load_instance", "save_instance", "table1_profile",
    "cost_min_oracle", "greedy_cost_min", "solve_cost_min", "solve_flow_cost_min",
    "InfeasibleError", "QCOptError", "ValidationError", "LossWeights", "ScoreVectors", "load_scores",
    "mse_loss", "pairwise_diff_loss", "total_loss", "TokenVocabulary", "count_tokens", "decode",
    "default_vocabulary", "encode",
]
