"""Integer max-flow and decomposition of fractional agent/resource flows.

The decomposition follows the edge-elimination argument for bipartite
supply/demand flows: repeatedly pick an integer assignment supported on the
positive residual edges, peel off the largest multiple of it that keeps the
residual non-negative, and stop when the residual vanishes.  Each round zeroes
at least one edge, so at most ``N*R + N + R`` rounds are ever needed.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InfeasibleMarginals

RESIDUAL_CLAMP = 1e-12
MARGINAL_TOL = 1e-7


def max_flow(num_nodes: int, edges: Sequence[tuple], source: int, sink: int):
    """Edmonds-Karp max flow.

    ``edges`` is a list of ``(u, v, capacity)``; returns ``(value, flows)`` with
    ``flows[k]`` the flow on ``edges[k]``.  Integral capacities give an integral
    flow.  Augmenting paths are found by BFS over edges in input order, so the
    result is deterministic.
    """
    # residual graph as parallel arrays; arc 2k is edges[k], arc 2k+1 its reverse
    head, cap, adj = [], [], [[] for _ in range(num_nodes)]
    for u, v, c in edges:
        adj[u].append(len(head))
        head.append(v)
        cap.append(c)
        adj[v].append(len(head))
        head.append(u)
        cap.append(0)

    value = 0
    while True:
        parent_arc = [-1] * num_nodes
        parent_arc[source] = -2
        queue = deque([source])
        while queue and parent_arc[sink] == -1:
            u = queue.popleft()
            for arc in adj[u]:
                v = head[arc]
                if cap[arc] > 0 and parent_arc[v] == -1:
                    parent_arc[v] = arc
                    queue.append(v)
        if parent_arc[sink] == -1:
            break
        push, v = None, sink
        while v != source:
            arc = parent_arc[v]
            push = cap[arc] if push is None else min(push, cap[arc])
            v = head[arc ^ 1]
        v = sink
        while v != source:
            arc = parent_arc[v]
            cap[arc] -= push
            cap[arc ^ 1] += push
            v = head[arc ^ 1]
        value += push

    flows = [cap[2 * k + 1] for k in range(len(edges))]
    return value, flows


def match_with_demands(allowed: Sequence[Sequence[int]], demand: Sequence[int]):
    """Assign every agent to one allowed resource so that resource ``r`` gets
    exactly ``demand[r]`` agents.  Returns the action profile or ``None``."""
    n_agents, n_res = len(allowed), len(demand)
    if sum(demand) != n_agents:
        return None
    source, sink = n_agents + n_res, n_agents + n_res + 1
    edges = [(source, i, 1) for i in range(n_agents)]
    pair_edges = []
    for i, rs in enumerate(allowed):
        for r in sorted(rs):
            if demand[r] > 0:
                pair_edges.append((i, r))
                edges.append((i, n_agents + r, 1))
    edges.extend((n_agents + r, sink, demand[r]) for r in range(n_res) if demand[r] > 0)
    value, flows = max_flow(n_agents + n_res + 2, edges, source, sink)
    if value < n_agents:
        return None
    profile = [-1] * n_agents
    for (i, r), f in zip(pair_edges, flows[n_agents:]):
        if f:
            profile[i] = r
    return tuple(profile)


@dataclass(frozen=True)
class BipartiteFlowProblem:
    """Fractional flow ``flow[i][r]`` from unit-supply agents to resources with
    integer demands ``demands[r]``."""

    flow: tuple
    demands: tuple

    @classmethod
    def from_rows(cls, flow, demands):
        return cls(tuple(tuple(row) for row in flow), tuple(int(d) for d in demands))

    @property
    def num_agents(self) -> int:
        return len(self.flow)

    @property
    def num_resources(self) -> int:
        return len(self.demands)


@dataclass
class FlowDecomposition:
    """Weighted integer assignments whose mixture reproduces a fractional flow."""

    assignments: list = field(default_factory=list)
    weights: list = field(default_factory=list)
    rounds: int = 0

    def __iter__(self):
        return iter(zip(self.assignments, self.weights))

    def __len__(self):
        return len(self.assignments)

    def marginals(self, num_resources: int):
        n_agents = len(self.assignments[0]) if self.assignments else 0
        out = [[0] * num_resources for _ in range(n_agents)]
        for a, w in self:
            for i, r in enumerate(a):
                out[i][r] += w
        return out


def _exact(values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


def decompose_fractional_flow(prob: BipartiteFlowProblem, tol: float = MARGINAL_TOL) -> FlowDecomposition:
    """Write a fractional supply/demand flow as a distribution over integer
    assignments.

    Exact (rational) input is decomposed exactly.  For float input, residuals
    below ``RESIDUAL_CLAMP`` are treated as zero and the marginals must hold to
    within ``tol``; the weights are renormalised to sum to one at the end.
    Among the integer assignments on the positive residual, the one maximising
    its smallest edge flow is peeled first, which keeps float noise from ever
    being selected while a genuine assignment remains.
    """
    n_agents, n_res = prob.num_agents, prob.num_resources
    flat = [v for row in prob.flow for v in row]
    exact = _exact(flat)
    clamp = 0 if exact else RESIDUAL_CLAMP
    slack = 0 if exact else tol

    for i, row in enumerate(prob.flow):
        if len(row) != n_res:
            raise InfeasibleMarginals(f"agent {i} has {len(row)} flow entries, expected {n_res}")
        if min(row) < -slack:
            raise InfeasibleMarginals(f"agent {i} has negative flow {min(row)}")
        if abs(sum(row) - 1) > slack:
            raise InfeasibleMarginals(f"agent {i} supplies {sum(row)} units, expected 1")
    for r in range(n_res):
        col = sum(prob.flow[i][r] for i in range(n_agents))
        if abs(col - prob.demands[r]) > slack * max(1, n_agents):
            raise InfeasibleMarginals(f"resource {r} receives {col} units, expected {prob.demands[r]}")

    residual = [[v if v > clamp else 0 for v in row] for row in prob.flow]
    out = FlowDecomposition()
    max_rounds = n_agents * n_res + n_agents + n_res
    while any(v > clamp for row in residual for v in row):
        assignment = _bottleneck_assignment(residual, prob.demands)
        if assignment is None:
            leftover = max(sum(row) for row in residual)
            if exact or leftover > tol:
                raise InfeasibleMarginals(
                    f"no integer assignment fits the residual flow (mass {leftover} left)"
                )
            break
        weight = min(residual[i][r] for i, r in enumerate(assignment))
        for i, r in enumerate(assignment):
            left = residual[i][r] - weight
            residual[i][r] = left if left > clamp else 0
        out.assignments.append(assignment)
        out.weights.append(weight)
        out.rounds += 1
        if out.rounds > max_rounds:
            raise InfeasibleMarginals(f"decomposition exceeded {max_rounds} rounds")

    total = sum(out.weights)
    if not exact:
        if abs(total - 1) > tol:
            raise InfeasibleMarginals(f"decomposition weights sum to {total}")
        out.weights = [w / total for w in out.weights]
    elif total != 1:
        raise InfeasibleMarginals(f"decomposition weights sum to {total}")
    return out


def _bottleneck_assignment(residual, demands):
    """Integer assignment on positive edges maximising its minimum edge value."""
    values = sorted({v for row in residual for v in row if v > 0}, reverse=True)
    if not values:
        return None

    def feasible(threshold):
        allowed = [[r for r, v in enumerate(row) if v >= threshold] for row in residual]
        return match_with_demands(allowed, demands)

    # values are descending; feasibility is monotone as the threshold drops
    if feasible(values[-1]) is None:
        return None
    lo, hi = 0, len(values) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(values[mid]) is not None:
            hi = mid
        else:
            lo = mid + 1
    return feasible(values[lo])
