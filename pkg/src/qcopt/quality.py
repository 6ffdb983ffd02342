"""Quality scores: file ingestion, predictor boundary, and predictor losses."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .core import RoutingInstance
from .errors import (
    MissingScoreError,
    MissingSectionError,
    ScoreRangeError,
    UnknownIdError,
    ValidationError,
)


@dataclass(frozen=True)
class ScoreVectors:
    """Reference scores ``actual`` and predictions ``predicted`` for one section."""

    actual: tuple[float, ...]
    predicted: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "actual", tuple(float(v) for v in self.actual))
        object.__setattr__(self, "predicted", tuple(float(v) for v in self.predicted))
        if len(self.actual) != len(self.predicted):
            raise ValidationError(
                f"actual has {len(self.actual)} scores but predicted has {len(self.predicted)}"
            )


@dataclass(frozen=True)
class LossWeights:
    alpha: float = 1.0
    beta: float = 2.4

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValidationError("loss weights must be non-negative")
        if self.alpha == 0 and self.beta == 0:
            raise ValidationError("alpha and beta cannot both be zero")


def _as_arrays(batch: Sequence[ScoreVectors]):
    if not batch:
        raise ValueError("loss needs a non-empty batch")
    widths = {len(item.actual) for item in batch}
    if len(widths) != 1:
        raise ValueError("all items in a batch must score the same number of models")
    y = np.array([item.actual for item in batch], dtype=float)
    y_hat = np.array([item.predicted for item in batch], dtype=float)
    return y, y_hat


def mse_loss(batch: Sequence[ScoreVectors]) -> float:
    """Mean over the batch of the squared Euclidean error norm."""
    y, y_hat = _as_arrays(batch)
    return float(np.mean(np.sum((y - y_hat) ** 2, axis=1)))


def pairwise_diff_loss(batch: Sequence[ScoreVectors]) -> float:
    """Mean over the batch of the mean squared error in pairwise score gaps.

    For each item, every unordered model pair (p, q) contributes
    ``((y_p - y_q) - (yhat_p - yhat_q)) ** 2``; the item loss averages these
    over the K(K-1)/2 pairs. Invariant to adding a constant to a prediction.
    """
    y, y_hat = _as_arrays(batch)
    K = y.shape[1]
    if K < 2:
        raise ValueError("pairwise difference loss needs at least two models")
    err = y - y_hat
    p, q = np.triu_indices(K, k=1)
    gaps = err[:, p] - err[:, q]
    return float(np.mean(np.mean(gaps**2, axis=1)))


def total_loss(batch: Sequence[ScoreVectors], weights: LossWeights = LossWeights()) -> float:
    return weights.alpha * mse_loss(batch) + weights.beta * pairwise_diff_loss(batch)


# --- predictors -------------------------------------------------------------


class QualityPredictor(Protocol):
    def predict(self, section_id: str, text: str | None) -> Sequence[float]:
        """Length-K score vector in [0, 1], one entry per model."""


class UniformPredictor:
    """Scores every model 0.5; a placeholder for pipeline tests."""

    def __init__(self, n_models: int, value: float = 0.5):
        self.n_models = n_models
        self.value = value

    def predict(self, section_id, text=None):
        return [self.value] * self.n_models


class FileScorePredictor:
    """Serves precomputed scores keyed by section id."""

    def __init__(self, table: dict[str, list[float]]):
        self.table = table

    def predict(self, section_id, text=None):
        try:
            return list(self.table[section_id])
        except KeyError:
            raise MissingSectionError(section_id) from None


def score_matrix(predictor: QualityPredictor, instance: RoutingInstance) -> np.ndarray:
    rows = []
    for sec in instance.sections:
        row = list(predictor.predict(sec.id, sec.text))
        if len(row) != instance.n_models:
            raise ValidationError(
                f"predictor returned {len(row)} scores for section {sec.id!r}, expected {instance.n_models}"
            )
        for model, v in zip(instance.models, row):
            if not (0.0 <= v <= 1.0):
                raise ScoreRangeError(sec.id, model.id, v)
        rows.append(row)
    return np.array(rows, dtype=float).reshape(instance.n_sections, instance.n_models)


def _read_score_table(path) -> dict[str, dict[str, object]]:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty CSV") from None
        if len(header) < 2:
            raise ValidationError(f"{path}: header must be section id followed by model ids")
        model_ids = [h.strip() for h in header[1:]]
        table: dict[str, dict[str, object]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(f"{path}:{lineno}: expected {len(header)} fields")
            cells = {}
            for mid, raw in zip(model_ids, row[1:]):
                raw = raw.strip()
                if raw == "":
                    continue
                try:
                    cells[mid] = float(raw)
                except ValueError:
                    raise ValidationError(f"{path}:{lineno}: {raw!r} is not a number") from None
            table[row[0].strip()] = cells
        return table
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict) or set(data) != {"scores"} or not isinstance(data["scores"], dict):
        raise ValidationError(f"{path}: expected {{\"scores\": {{section_id: {{model_id: value}}}}}}")
    return {str(k): dict(v) for k, v in data["scores"].items()}


def load_scores(path, instance: RoutingInstance) -> np.ndarray:
    """Read a score file (JSON or CSV) into an ``n x K`` matrix for ``instance``.

    Use ``instance.replace(scores=...)`` to attach the result.
    """
    table = _read_score_table(path)
    section_ids = {s.id for s in instance.sections}
    model_ids = {m.id for m in instance.models}
    for sid, cells in table.items():
        if sid not in section_ids:
            raise UnknownIdError("section", sid)
        for mid in cells:
            if mid not in model_ids:
                raise UnknownIdError("model", mid)
    out = np.empty((instance.n_sections, instance.n_models))
    for j, sec in enumerate(instance.sections):
        if sec.id not in table:
            raise MissingSectionError(sec.id)
        cells = table[sec.id]
        for i, model in enumerate(instance.models):
            if model.id not in cells:
                raise MissingScoreError(sec.id, model.id)
            v = cells[model.id]
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not (0.0 <= v <= 1.0):
                raise ScoreRangeError(sec.id, model.id, v)
            out[j, i] = float(v)
    return out
