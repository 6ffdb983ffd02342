"""Passage-level compression: split, measure, select, order, apply."""

from __future__ import annotations

import re
from dataclasses import asdict, dataclass, field
from typing import Sequence

from ..tokenizer import TokenVocabulary
from .heuristics import HEURISTIC_IDS, Resources, default_resources
from .optimize import (
    LossBudget,
    LossEstimator,
    StaticLossEstimator,
    apply_in_order,
    best_order,
    measure_edits,
    select_heuristics,
)

_ABBREVIATIONS = frozenset(
    "mr mrs ms dr prof sr jr st vs etc inc ltd co corp fig no vol approx dept est al".split()
)
_BOUNDARY = re.compile(r"[.!?]+[\"')\]]*(\s+)")
_DOTTED = re.compile(r"(?:\b[A-Za-z]\.)+$")


def split_sentences(text: str) -> list[tuple[str, str]]:
    """Split into ``(sentence, trailing_whitespace)`` pairs; joining them gives back ``text``.

    A boundary is terminal punctuation plus whitespace followed by an
    uppercase letter, digit, quote or bracket, unless the word before the
    period is a known abbreviation or a dotted initialism.
    """
    out = []
    start = 0
    for m in _BOUNDARY.finditer(text):
        end = m.start(1)
        nxt = text[m.end(): m.end() + 1]
        if not nxt or not (nxt.isupper() or nxt.isdigit() or nxt in "\"'([“"):
            continue
        head = text[start:end]
        last_word = head.rstrip(".!?\"')]").rsplit(None, 1)[-1] if head.strip() else ""
        if text[m.start()] == ".":
            if last_word.lower().rstrip(".") in _ABBREVIATIONS:
                continue
            if _DOTTED.search(head.rstrip("\"')]")) and len(last_word) <= 6:
                continue
        out.append((head, m.group(1)))
        start = m.end()
    if start < len(text):
        rest = text[start:]
        stripped = rest.rstrip()
        out.append((stripped, rest[len(stripped):]))
    elif out and not out[-1][0] and not out[-1][1]:
        out.pop()
    return out


@dataclass
class SentenceReport:
    index: int
    original: str
    compressed: str
    tokens_before: int
    tokens_after: int
    tokens_saved: int
    loss: float
    selected: list[str]
    order: list[str]


@dataclass
class CompressionReport:
    loss_budget: float
    sentences: list[SentenceReport] = field(default_factory=list)
    tokens_before: int = 0
    tokens_after: int = 0
    tokens_saved: int = 0
    total_loss: float = 0.0
    compression: float = 0.0
    passage_tokens_before: int = 0
    passage_tokens_after: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def compress_passage(
    passage: str,
    budget: LossBudget | float,
    vocab: TokenVocabulary,
    loss_estimator: LossEstimator | None = None,
    heuristics: Sequence[str] = HEURISTIC_IDS,
    res: Resources | None = None,
    sentence_budgets: Sequence[float] | None = None,
):
    """Compress ``passage`` sentence by sentence within a per-sentence loss budget.

    ``sentence_budgets`` overrides the capacity per sentence (used by
    threshold sweeps). Returns ``(compressed_text, CompressionReport)``.
    """
    if not isinstance(budget, LossBudget):
        budget = LossBudget(float(budget))
    loss_estimator = loss_estimator or StaticLossEstimator()
    res = res or default_resources()
    report = CompressionReport(loss_budget=budget.capacity)
    if not passage:
        return "", report

    pieces = []
    for k, (sentence, gap) in enumerate(split_sentences(passage)):
        cap = budget if sentence_budgets is None else LossBudget(sentence_budgets[k])
        before = vocab.count(sentence)
        edits = measure_edits(sentence, heuristics, vocab, loss_estimator, sentence_index=k, res=res)
        chosen = select_heuristics(edits, cap)
        ids = [e.heuristic_id for e in chosen]
        if ids:
            order, compressed, _ = best_order(sentence, ids, vocab, res)
        else:
            order, compressed = [], sentence
        after = vocab.count(compressed)
        report.sentences.append(
            SentenceReport(
                index=k,
                original=sentence,
                compressed=compressed,
                tokens_before=before,
                tokens_after=after,
                tokens_saved=before - after,
                loss=sum(e.quality_loss for e in chosen),
                selected=ids,
                order=list(order),
            )
        )
        pieces.append(compressed + gap)

    out = "".join(pieces)
    report.tokens_before = sum(s.tokens_before for s in report.sentences)
    report.tokens_after = sum(s.tokens_after for s in report.sentences)
    report.tokens_saved = report.tokens_before - report.tokens_after
    report.total_loss = sum(s.loss for s in report.sentences)
    report.compression = report.tokens_saved / report.tokens_before if report.tokens_before else 0.0
    report.passage_tokens_before = vocab.count(passage)
    report.passage_tokens_after = vocab.count(out)
    return out, report


def brute_force_passage(
    passage: str,
    vocab: TokenVocabulary,
    loss_estimator: LossEstimator | None = None,
    heuristics: Sequence[str] = HEURISTIC_IDS,
    res: Resources | None = None,
):
    """Apply every heuristic in fixed order to every sentence; the no-budget baseline.

    Per-sentence loss is the sum of each heuristic's independently measured
    loss, the same accounting ``compress_passage`` uses.
    """
    loss_estimator = loss_estimator or StaticLossEstimator()
    res = res or default_resources()
    report = CompressionReport(loss_budget=float("inf"))
    pieces = []
    for k, (sentence, gap) in enumerate(split_sentences(passage)):
        before = vocab.count(sentence)
        edits = measure_edits(sentence, heuristics, vocab, loss_estimator, sentence_index=k, res=res)
        compressed = apply_in_order(sentence, heuristics, vocab, res)
        after = vocab.count(compressed)
        used = [e for e in edits if e.tokens_saved > 0]
        report.sentences.append(
            SentenceReport(
                index=k,
                original=sentence,
                compressed=compressed,
                tokens_before=before,
                tokens_after=after,
                tokens_saved=before - after,
                loss=sum(e.quality_loss for e in used),
                selected=[e.heuristic_id for e in used],
                order=list(heuristics),
            )
        )
        pieces.append(compressed + gap)
    out = "".join(pieces)
    report.tokens_before = sum(s.tokens_before for s in report.sentences)
    report.tokens_after = sum(s.tokens_after for s in report.sentences)
    report.tokens_saved = report.tokens_before - report.tokens_after
    report.total_loss = sum(s.loss for s in report.sentences)
    report.compression = report.tokens_saved / report.tokens_before if report.tokens_before else 0.0
    report.passage_tokens_before = vocab.count(passage)
    report.passage_tokens_after = vocab.count(out)
    return out, report


def threshold_sweep(
    passage: str,
    vocab: TokenVocabulary,
    fractions: Sequence[float] = (0.9, 0.8, 0.7),
    loss_estimator: LossEstimator | None = None,
    res: Resources | None = None,
):
    """Re-run compression with each sentence's budget set to a fraction of its brute-force loss.

    Returns ``(baseline_report, [(fraction, report), ...])``.
    """
    loss_estimator = loss_estimator or StaticLossEstimator()
    _, base = brute_force_passage(passage, vocab, loss_estimator, res=res)
    rows = []
    for frac in fractions:
        caps = [frac * s.loss for s in base.sentences]
        _, rep = compress_passage(
            passage, LossBudget(frac), vocab, loss_estimator, res=res, sentence_budgets=caps
        )
        rows.append((frac, rep))
    return base, rows


def sample_corpus() -> list[str]:
    """Bundled sample passages (one per blank-line separated paragraph)."""
    from importlib import resources

    text = (resources.files("qcopt.tokenopt") / "data" / "sample_corpus.txt").read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return [p.strip() for p in "\n".join(lines).split("\n\n") if p.strip()]


# --- control tags for an external controllable simplifier ------------------


def format_control_tags(target_token_ratio: float, target_similarity: float) -> str:
    """``<BERTSCORE_x.xx> <NUM_TOKENS_RATIO_y.yy>`` with two-decimal values."""
    if not (0.0 < target_token_ratio <= 1.0):
        raise ValueError(f"token ratio must be in (0, 1], got {target_token_ratio!r}")
    if not (0.0 <= target_similarity <= 1.0):
        raise ValueError(f"similarity must be in [0, 1], got {target_similarity!r}")
    return f"<BERTSCORE_{target_similarity:.2f}> <NUM_TOKENS_RATIO_{target_token_ratio:.2f}>"


def prepend_control_tags(source: str, target_token_ratio: float, target_similarity: float) -> str:
    return f"{format_control_tags(target_token_ratio, target_similarity)} {source}"


def num_tokens_ratio(complex_text: str, simple_text: str, vocab: TokenVocabulary) -> float:
    """Realized token ratio of a (complex, simple) training pair."""
    denom = vocab.count(complex_text)
    if denom == 0:
        raise ValueError("complex sentence has no tokens")
    return vocab.count(simple_text) / denom


def label_pair(complex_text: str, simple_text: str, similarity: float, vocab: TokenVocabulary) -> str:
    """Control-tag label describing an existing pair, ratio capped at 1."""
    ratio = min(1.0, num_tokens_ratio(complex_text, simple_text, vocab))
    return format_control_tags(max(ratio, 0.005), similarity)
