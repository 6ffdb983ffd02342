"""Brute-force enumeration over all K**n assignments.

Per-assignment totals are built with repeated outer sums, so the flattened
C-order index walks assignments lexicographically (section 0 most
significant) and each total is accumulated in section order, matching
``plan_from_choices`` bit for bit.
"""

from __future__ import annotations

import numpy as np

from .core import COST_TOL, RoutingInstance
from .errors import InstanceTooLargeError


def _outer_sum(rows):
    acc = np.asarray(rows[0], dtype=float)
    for r in rows[1:]:
        acc = np.add.outer(acc, r)
    return acc.reshape(-1)


def _outer_and(rows):
    acc = np.asarray(rows[0], dtype=bool)
    for r in rows[1:]:
        acc = np.logical_and.outer(acc, r)
    return acc.reshape(-1)


def _fits(load, limit):
    return load <= limit + COST_TOL * max(1.0, abs(limit))


def enumerate_best(
    instance: RoutingInstance,
    *,
    maximize_score: bool,
    budget: float | None = None,
    quality_floor: float | None = None,
    limit: int = 10**7,
):
    """Return per-section model indices of the best feasible assignment, or None.

    ``maximize_score``: highest total score, ties to lower cost.
    Otherwise: lowest total cost, ties to higher score. Remaining ties go to
    the lexicographically first assignment. The instance's latency SLA, when
    present, is always enforced.
    """
    n, K = instance.n_sections, instance.n_models
    if n == 0:
        return []
    size = K**n
    if size > limit:
        raise InstanceTooLargeError(size, limit)

    costs = instance.costs
    scores = instance.scores
    total_cost = _outer_sum([costs[j] for j in range(n)])
    total_score = _outer_sum([scores[j] for j in range(n)])
    mask = np.ones(size, dtype=bool)
    if budget is not None:
        mask &= _fits(total_cost, budget)
    if quality_floor is not None:
        mask &= _outer_and([scores[j] >= quality_floor for j in range(n)])
    if instance.latency_sla is not None:
        lat = instance.latencies
        for i in range(K):
            onehot = np.zeros(K)
            onehot[i] = 1.0
            load = _outer_sum([lat[j] * onehot for j in range(n)])
            mask &= _fits(load, instance.latency_sla)
    if not mask.any():
        return None

    if maximize_score:
        best = total_score[mask].max()
        cand = mask & (total_score == best)
        cand &= total_cost == total_cost[cand].min()
    else:
        best = total_cost[mask].min()
        cand = mask & (total_cost == best)
        cand &= total_score == total_score[cand].max()
    idx = int(np.flatnonzero(cand)[0])
    return [int(d) for d in np.unravel_index(idx, (K,) * n)]
