"""Seeded instance generators shared by the test modules."""

from __future__ import annotations

import numpy as np

from qcopt.core import ModelProfile, RoutingInstance, Section


def dyadic_models(rng, K, latency=False):
    """Models whose per-token prices are multiples of 1/1024, so cost sums are exact."""
    models = []
    for i in range(K):
        models.append(
            ModelProfile(
                id=f"m{i}",
                input_cost_per_token=int(rng.integers(1, 33)) / 1024,
                output_cost_per_token=int(rng.integers(1, 65)) / 1024,
                fixed_cost=int(rng.integers(0, 4)) / 8,
                latency_per_token=int(rng.integers(1, 9)) / 256 if latency else 0.0,
                avg_tokens_per_sentence=float(rng.integers(8, 30)),
            )
        )
    return models


def costmin_instance(rng, n, K, quality_floor=None):
    models = dyadic_models(rng, K)
    sections = [
        Section(
            id=f"s{j}",
            input_tokens_per_model={m.id: int(rng.integers(10, 400)) for m in models},
            summary_sentences=int(rng.integers(1, 4)),
        )
        for j in range(n)
    ]
    scores = np.round(rng.uniform(0.2, 1.0, size=(n, K)), 2)
    if quality_floor is None:
        quality_floor = float(np.round(rng.uniform(0.0, 0.6), 2))
    elif quality_floor == "feasible":
        # Some model clears the floor in every section.
        top = float(scores.max(axis=1).min()) if n else 1.0
        quality_floor = float(np.floor(top * rng.uniform(0.3, 1.0) * 100) / 100)
    return RoutingInstance(models, sections, scores, quality_floor=quality_floor)


def equal_size_instance(rng, n, K):
    """Every section has the same token count per model; the SLA caps how many each model takes."""
    models = dyadic_models(rng, K, latency=True)
    tokens = {m.id: int(rng.integers(20, 200)) for m in models}
    p = int(rng.integers(1, 3))
    sections = [Section(id=f"s{j}", input_tokens_per_model=dict(tokens), summary_sentences=p) for j in range(n)]
    scores = np.round(rng.uniform(0.2, 1.0, size=(n, K)), 2)
    inst = RoutingInstance(models, sections, scores, quality_floor=float(np.round(rng.uniform(0.1, 0.6), 2)))
    per_call = inst.latencies[0]
    # Pick an SLA that lets the slowest-fitting model take between 1 and n sections.
    slots = int(rng.integers(1, n + 1))
    sla = float(per_call.max()) * slots
    return inst.replace(latency_sla=sla)


def budget_instance(rng, n, K, latency=False, fraction=None):
    models = dyadic_models(rng, K, latency=latency)
    sections = [
        Section(
            id=f"s{j}",
            input_tokens_per_model={m.id: int(rng.integers(10, 400)) for m in models},
            summary_sentences=int(rng.integers(1, 4)),
        )
        for j in range(n)
    ]
    scores = rng.uniform(0.0, 1.0, size=(n, K))
    inst = RoutingInstance(models, sections, scores, budget=0.0)
    lo = inst.min_feasible_budget()
    hi = float(inst.costs.max(axis=1).sum())
    f = rng.uniform(0.0, 1.0) if fraction is None else fraction
    inst = inst.replace(budget=lo + f * (hi - lo))
    if latency:
        inst = inst.replace(latency_sla=float(inst.latencies.sum() / K * rng.uniform(0.8, 2.0)))
    return inst
