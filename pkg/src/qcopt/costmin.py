"""Quality-floor cost minimization.

Three exact routes and one heuristic:

* ``greedy_cost_min``: no latency SLA; each section independently takes the
  cheapest model meeting the quality floor, which is optimal.
* ``solve_flow_cost_min``: latency SLA with equal-size sections; min-cost
  max-flow on a section/model bipartite graph.
* ``cost_min_oracle``: exhaustive search for small instances.
* ``greedy_latency_heuristic``: general case, not optimal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import RoutingInstance, RoutingPlan, fits, plan_from_choices
from .errors import (
    FlowStructureError,
    InfeasibleError,
    PreconditionError,
    SectionInfeasibleError,
)
from .oracle import enumerate_best


def _require_floor(instance):
    if instance.quality_floor is None:
        raise PreconditionError("Cost-Min needs a quality_floor")
    return instance.quality_floor


def feasible_models(instance: RoutingInstance, j: int) -> list[int]:
    q = _require_floor(instance)
    return [i for i in range(instance.n_models) if instance.scores[j, i] >= q]


def greedy_cost_min(instance: RoutingInstance, ignore_latency: bool = False) -> RoutingPlan:
    """Cheapest model meeting the quality floor, per section.

    Ties go to the higher score, then the lower model index. Only valid
    without a latency SLA; pass ``ignore_latency=True`` to drop it
    deliberately.
    """
    q = _require_floor(instance)
    if instance.latency_sla is not None and not ignore_latency:
        raise PreconditionError(
            "greedy Cost-Min is only optimal without a latency SLA; "
            "use the flow solver, the oracle, or ignore_latency=True"
        )
    costs, scores = instance.costs, instance.scores
    choices = []
    for j, sec in enumerate(instance.sections):
        feas = feasible_models(instance, j)
        if not feas:
            raise SectionInfeasibleError(sec.id, float(scores[j].max()), q)
        choices.append(min(feas, key=lambda i: (costs[j, i], -scores[j, i], i)))
    return plan_from_choices(instance, choices, method="cost-min-greedy")


def cost_min_oracle(instance: RoutingInstance, limit: int = 10**7) -> RoutingPlan:
    q = _require_floor(instance)
    choices = enumerate_best(instance, maximize_score=False, quality_floor=q, limit=limit)
    if choices is None:
        raise InfeasibleError("no assignment meets the quality floor within the latency SLA")
    return plan_from_choices(instance, choices, method="cost-min-oracle")


def greedy_latency_heuristic(instance: RoutingInstance) -> RoutingPlan:
    """Cheapest feasible model with latency headroom left; NOT optimal.

    Sections are visited in order. A section with no admissible model is
    left unassigned and the plan is flagged infeasible.
    """
    _require_floor(instance)
    sla = instance.latency_sla
    costs, scores, lat = instance.costs, instance.scores, instance.latencies
    used = [0.0] * instance.n_models
    choices = []
    for j in range(instance.n_sections):
        options = [
            i for i in feasible_models(instance, j)
            if sla is None or fits(used[i] + lat[j, i], sla)
        ]
        if not options:
            choices.append(None)
            continue
        i = min(options, key=lambda i: (costs[j, i], -scores[j, i], i))
        used[i] += lat[j, i]
        choices.append(i)
    return plan_from_choices(instance, choices, method="cost-min-latency-heuristic")


# --- min-cost max-flow ----------------------------------------------------


@dataclass
class FlowEdge:
    tail: int
    head: int
    capacity: int
    cost: float
    flow: int = 0


@dataclass
class FlowNetwork:
    n_nodes: int
    source: int
    sink: int
    edges: list[FlowEdge] = field(default_factory=list)
    section_nodes: list[int] = field(default_factory=list)
    model_nodes: list[int] = field(default_factory=list)
    model_capacity: list[int] = field(default_factory=list)

    def add_edge(self, tail, head, capacity, cost):
        if capacity < 0 or int(capacity) != capacity:
            raise FlowStructureError(f"capacity must be a non-negative integer, got {capacity!r}")
        self.edges.append(FlowEdge(tail, head, int(capacity), float(cost)))


def token_capacity(latency_sla: float, latency_per_token: float, cap: int) -> int:
    """Largest token count ``N`` with ``N * latency_per_token <= latency_sla``, at most ``cap``."""
    if latency_per_token == 0:
        return cap
    m = math.floor(latency_sla / latency_per_token)
    while fits((m + 1) * latency_per_token, latency_sla):
        m += 1
    while m > 0 and not fits(m * latency_per_token, latency_sla):
        m -= 1
    return min(m, cap)


def uniform_section_sizes(instance: RoutingInstance) -> list[int]:
    """Per-model section size ``d_i``; raises unless every section has the same size."""
    totals = instance.total_tokens
    sizes = []
    for i, m in enumerate(instance.models):
        col = totals[:, i]
        if col.size and np.any(col != col[0]):
            raise PreconditionError(
                f"sections differ in (input + output) token count for model {m.id!r}; "
                "the flow formulation needs equal-size sections"
            )
        sizes.append(int(col[0]) if col.size else 0)
    return sizes


def build_flow(instance: RoutingInstance, d: int | None = None) -> FlowNetwork:
    """Source -> sections (cap 1) -> feasible models (cap 1, cost C[j,i]) -> sink (cap N_hat_i)."""
    if instance.latency_sla is None:
        raise PreconditionError("the flow formulation needs a latency SLA")
    q = instance.quality_floor
    n, K = instance.n_sections, instance.n_models
    sizes = uniform_section_sizes(instance)
    if d is not None and any(s != d for s in sizes):
        raise PreconditionError(f"sections are not all {d} tokens long (sizes per model: {sizes})")

    net = FlowNetwork(n_nodes=n + K + 2, source=0, sink=1)
    net.section_nodes = [2 + j for j in range(n)]
    net.model_nodes = [2 + n + i for i in range(K)]
    for j in range(n):
        net.add_edge(net.source, net.section_nodes[j], 1, 0.0)
    for j in range(n):
        for i in range(K):
            if q is None or instance.scores[j, i] >= q:
                net.add_edge(net.section_nodes[j], net.model_nodes[i], 1, instance.costs[j, i])
    for i, m in enumerate(instance.models):
        tokens = token_capacity(instance.latency_sla, m.latency_per_token, cap=max(1, n * max(sizes[i], 1)))
        cap = n if sizes[i] == 0 else tokens // sizes[i]
        cap = min(cap, n)
        net.model_capacity.append(cap)
        net.add_edge(net.model_nodes[i], net.sink, cap, 0.0)
    return net


def _bellman_ford(n_nodes, arcs, adj, source, eps):
    dist = [math.inf] * n_nodes
    parent = [-1] * n_nodes
    dist[source] = 0.0
    for _ in range(n_nodes - 1):
        changed = False
        for u in range(n_nodes):
            du = dist[u]
            if du == math.inf:
                continue
            for a in adj[u]:
                head, residual, cost = arcs[a][0], arcs[a][1], arcs[a][2]
                if residual > 0 and du + cost < dist[head] - eps:
                    dist[head] = du + cost
                    parent[head] = a
                    changed = True
        if not changed:
            return dist, parent
    for u in range(n_nodes):
        if dist[u] == math.inf:
            continue
        for a in adj[u]:
            head, residual, cost = arcs[a][0], arcs[a][1], arcs[a][2]
            if residual > 0 and dist[u] + cost < dist[head] - eps:
                raise FlowStructureError("negative-cost cycle in the residual network")
    return dist, parent


def min_cost_max_flow(net: FlowNetwork):
    """Successive shortest augmenting paths with Bellman-Ford distances.

    Returns ``(flow_value, assignment, total_cost)`` where ``assignment``
    maps section position to model position for every saturated
    section -> model edge. Edge flows are written back onto ``net.edges``.
    """
    # arcs[a] = [head, residual, cost]; arc a ^ 1 is its reverse.
    arcs: list[list] = []
    adj: list[list[int]] = [[] for _ in range(net.n_nodes)]
    for e in net.edges:
        e.flow = 0
        adj[e.tail].append(len(arcs))
        arcs.append([e.head, e.capacity, e.cost])
        adj[e.head].append(len(arcs))
        arcs.append([e.tail, 0, -e.cost])
    scale = max([abs(e.cost) for e in net.edges], default=0.0)
    eps = 1e-12 * max(1.0, scale)

    _bellman_ford(net.n_nodes, [[a[0], a[1], a[2]] for a in arcs], adj, net.source, eps)

    tails = [0] * len(arcs)
    for u in range(net.n_nodes):
        for a in adj[u]:
            tails[a] = u
    flow_value = 0
    while True:
        dist, parent = _bellman_ford(net.n_nodes, arcs, adj, net.source, eps)
        if dist[net.sink] == math.inf:
            break
        push = math.inf
        v = net.sink
        while v != net.source:
            a = parent[v]
            push = min(push, arcs[a][1])
            v = tails[a]
        v = net.sink
        while v != net.source:
            a = parent[v]
            arcs[a][1] -= push
            arcs[a ^ 1][1] += push
            v = tails[a]
        flow_value += push

    total_cost = 0.0
    for k, e in enumerate(net.edges):
        e.flow = e.capacity - arcs[2 * k][1]
        total_cost += e.flow * e.cost

    section_pos = {node: j for j, node in enumerate(net.section_nodes)}
    model_pos = {node: i for i, node in enumerate(net.model_nodes)}
    assignment = {}
    for e in net.edges:
        if e.flow and e.tail in section_pos and e.head in model_pos:
            assignment[section_pos[e.tail]] = model_pos[e.head]
    return flow_value, assignment, total_cost


def solve_flow_cost_min(instance: RoutingInstance, d: int | None = None) -> RoutingPlan:
    """Exact Cost-Min for equal-size sections under a latency SLA.

    When not every section can be placed, the plan holds the maximum number
    of feasible placements at minimum cost and ``feasible`` is False.
    """
    net = build_flow(instance, d)
    _, assignment, _ = min_cost_max_flow(net)
    choices = [assignment.get(j) for j in range(instance.n_sections)]
    return plan_from_choices(instance, choices, method="cost-min-flow")


def solve_cost_min(instance: RoutingInstance, method: str = "auto", oracle_limit: int = 10**5) -> RoutingPlan:
    """Dispatch to the right Cost-Min solver.

    ``auto`` picks greedy without an SLA, the flow solver for equal-size
    sections, the oracle when ``K**n <= oracle_limit``, and otherwise the
    latency heuristic.
    """
    if method == "greedy":
        return greedy_cost_min(instance)
    if method == "flow":
        return solve_flow_cost_min(instance)
    if method == "oracle":
        return cost_min_oracle(instance)
    if method == "heuristic":
        return greedy_latency_heuristic(instance)
    if method != "auto":
        raise ValueError(f"unknown Cost-Min method {method!r}")
    if instance.latency_sla is None:
        return greedy_cost_min(instance)
    try:
        uniform_section_sizes(instance)
    except PreconditionError:
        pass
    else:
        return solve_flow_cost_min(instance)
    if instance.n_models ** instance.n_sections <= oracle_limit:
        return cost_min_oracle(instance)
    return greedy_latency_heuristic(instance)
