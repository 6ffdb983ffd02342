"""Choosing and ordering heuristics per sentence under a quality-loss budget."""

from __future__ import annotations

import difflib
import itertools
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from ..errors import QCOptError
from ..tokenizer import TokenVocabulary
from .heuristics import HEURISTIC_IDS, Resources, apply_heuristic, default_resources

LOSS_TOL = 1e-12
_ORDER = {hid: k for k, hid in enumerate(HEURISTIC_IDS)}


class LossEstimatorError(QCOptError):
    def __init__(self, heuristic_id, cause):
        self.heuristic_id = heuristic_id
        super().__init__(f"loss estimator failed for heuristic {heuristic_id}: {cause}")


@dataclass(frozen=True)
class LossBudget:
    capacity: float

    def __post_init__(self):
        if not self.capacity >= 0:
            raise ValueError(f"loss budget must be >= 0, got {self.capacity!r}")


@dataclass(frozen=True)
class TokenBudgetedEdit:
    sentence_index: int
    heuristic_id: str
    tokens_saved: int
    quality_loss: float


class LossEstimator(Protocol):
    def __call__(self, before: str, after: str, heuristic_id: str, tokens_saved: int) -> float:
        """Estimated quality degradation (>= 0) of rewriting ``before`` as ``after``."""


# Per-token-saved loss; semantic rewrites cost more than cosmetic ones.
DEFAULT_LOSS_WEIGHTS = {
    "CS": 0.001,
    "RA": 0.001,
    "RB": 0.002,
    "RP": 0.002,
    "HC": 0.002,
    "LS": 0.004,
    "RS": 0.004,
    "RSW": 0.005,
}


class StaticLossEstimator:
    """Loss = per-heuristic weight x tokens saved."""

    def __init__(self, weights=None):
        self.weights = dict(DEFAULT_LOSS_WEIGHTS)
        if weights:
            self.weights.update(weights)
        for hid, w in self.weights.items():
            if w < 0:
                raise ValueError(f"loss weight for {hid} must be >= 0")

    def __call__(self, before, after, heuristic_id, tokens_saved):
        if before == after:
            return 0.0
        return self.weights[heuristic_id] * tokens_saved


class LexicalLossEstimator:
    """Loss = 1 - word-level similarity ratio between the two sentences."""

    def __call__(self, before, after, heuristic_id, tokens_saved):
        if before == after:
            return 0.0
        return 1.0 - difflib.SequenceMatcher(None, before.split(), after.split(), autojunk=False).ratio()


def measure_edits(
    sentence: str,
    heuristics: Sequence[str],
    vocab: TokenVocabulary,
    loss_estimator: LossEstimator,
    sentence_index: int = 0,
    res: Resources | None = None,
) -> list[TokenBudgetedEdit]:
    """One record per heuristic, each applied alone to the original sentence."""
    res = res or default_resources()
    out = []
    for hid in heuristics:
        after, saved = apply_heuristic(sentence, hid, vocab, res)
        try:
            loss = float(loss_estimator(sentence, after, hid, saved))
        except Exception as exc:
            raise LossEstimatorError(hid, exc) from exc
        if loss < 0:
            raise LossEstimatorError(hid, f"negative loss {loss}")
        out.append(TokenBudgetedEdit(sentence_index, hid, saved, loss))
    return out


def _id_key(ids):
    return tuple(sorted(_ORDER.get(h, len(_ORDER)) for h in ids)), tuple(sorted(ids))


def select_heuristics(edits: Sequence[TokenBudgetedEdit], budget: LossBudget) -> list[TokenBudgetedEdit]:
    """Exact 0/1 knapsack by subset enumeration (at most 8 items).

    Maximizes tokens saved with total loss <= capacity; ties go to smaller
    total loss, then to the lexicographically smallest set of heuristic
    positions. Zero-profit edits are never selected.
    """
    items = [e for e in edits if e.tokens_saved > 0]
    if len(items) > 16:
        raise ValueError("subset enumeration supports at most 16 candidate edits")
    best_key = None
    best = ()
    for r in range(len(items) + 1):
        for combo in itertools.combinations(items, r):
            loss = sum(e.quality_loss for e in combo)
            if loss > budget.capacity + LOSS_TOL:
                continue
            saved = sum(e.tokens_saved for e in combo)
            key = (-saved, loss, _id_key(e.heuristic_id for e in combo))
            if best_key is None or key < best_key:
                best_key = key
                best = combo
    return sorted(best, key=lambda e: _ORDER.get(e.heuristic_id, len(_ORDER)))


def best_order(sentence: str, heuristics: Sequence[str], vocab: TokenVocabulary, res: Resources | None = None):
    """Search every application order of ``heuristics``.

    Returns ``(order, final_sentence, tokens_saved)`` for the order with the
    fewest final tokens; ties go to the lexicographically first permutation
    of ``heuristics`` as given. Intermediate results are memoized on
    (text, remaining set), which keeps the 8! search cheap.
    """
    res = res or default_resources()
    ids = list(heuristics)
    apply_cache: dict = {}
    memo: dict = {}

    def step(text, hid):
        key = (text, hid)
        if key not in apply_cache:
            apply_cache[key] = apply_heuristic(text, hid, vocab, res)[0]
        return apply_cache[key]

    def search(text, remaining):
        key = (text, remaining)
        if key in memo:
            return memo[key]
        if not remaining:
            result = (vocab.count(text), (), text)
        else:
            result = None
            for pos in remaining:
                nxt = step(text, ids[pos])
                count, suffix, final = search(nxt, tuple(p for p in remaining if p != pos))
                if result is None or count < result[0]:
                    result = (count, (pos,) + suffix, final)
        memo[key] = result
        return result

    count, order, final = search(sentence, tuple(range(len(ids))))
    return [ids[p] for p in order], final, vocab.count(sentence) - count


def apply_in_order(sentence: str, order: Sequence[str], vocab: TokenVocabulary, res: Resources | None = None) -> str:
    res = res or default_resources()
    for hid in order:
        sentence = apply_heuristic(sentence, hid, vocab, res)[0]
    return sentence
