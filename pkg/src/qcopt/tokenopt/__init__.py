"""Tokenizer-aware prompt compression."""

from .heuristics import HEURISTIC_IDS, HEURISTIC_NAMES, HEURISTICS, Resources, apply_heuristic, default_resources
from .optimize import (
    DEFAULT_LOSS_WEIGHTS,
    LexicalLossEstimator,
    LossBudget,
    LossEstimatorError,
    StaticLossEstimator,
    TokenBudgetedEdit,
    apply_in_order,
    best_order,
    measure_edits,
    select_heuristics,
)
from .pipeline import (
    CompressionReport,
    SentenceReport,
    brute_force_passage,
    compress_passage,
    format_control_tags,
    label_pair,
    num_tokens_ratio,
    prepend_control_tags,
    sample_corpus,
    split_sentences,
    threshold_sweep,
)
from .stemmer import stem

__all__ = [
    "HEURISTIC_IDS", "HEURISTIC_NAMES", "HEURISTICS", "Resources", "apply_heuristic", "default_resources",
    "DEFAULT_LOSS_WEIGHTS", "LexicalLossEstimator", "LossBudget", "LossEstimatorError", "StaticLossEstimator",
    "TokenBudgetedEdit", "apply_in_order", "best_order", "measure_edits", "select_heuristics",
    "CompressionReport", "SentenceReport", "brute_force_passage", "compress_passage", "format_control_tags",
    "label_pair", "num_tokens_ratio", "prepend_control_tags", "sample_corpus", "split_sentences", "threshold_sweep", "stem",
]
