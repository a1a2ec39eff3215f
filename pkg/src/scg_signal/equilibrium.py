"""Pure Nash equilibria through signatures and demand-constrained matching.

A signature pairs a configuration ``n`` with a label for every ordered pair of
resources recording whether an agent sitting on ``r`` would weakly prefer to
stay rather than join ``r'``.  An agent may sit on ``r`` in an equilibrium
obeying the signature only if every alternative in its action set is labelled
"stay"; an equilibrium with configuration ``n`` then exists iff a matching
with demands ``n`` exists over those allowed edges.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .core import (
    DEFAULT_MAX_CONFIGS,
    CostTable,
    Instance,
    config_of_profile,
    enumerate_configurations,
    potential,
    social_cost,
    tolerance_for,
)
from .errors import InvalidAction, MaxRoundsExceeded
from .flow import match_with_demands

LE, GT = True, False


def ordered_pairs(num_resources: int) -> list:
    return [(r, s) for r in range(num_resources) for s in range(num_resources) if r != s]


@dataclass(frozen=True)
class Signature:
    """Configuration plus one LE/GT label per ordered resource pair.

    ``labels`` follows :func:`ordered_pairs` order; ``True`` means LE.
    """

    config: tuple
    labels: tuple

    def __post_init__(self):
        R = len(self.config)
        if len(self.labels) != R * (R - 1):
            raise ValueError(f"expected {R * (R - 1)} labels, got {len(self.labels)}")

    def label(self, r: int, s: int) -> bool:
        R = len(self.config)
        return self.labels[r * (R - 1) + (s if s < r else s - 1)]

    def describe(self) -> str:
        R = len(self.config)
        marks = ",".join(
            f"{r}{'<=' if self.label(r, s) else '>'}{s}" for r, s in ordered_pairs(R)
        )
        return f"n={self.config} [{marks}]"


@dataclass(frozen=True)
class NashResult:
    config: tuple
    assignment: tuple
    cost: object


def pair_is_free(n: Sequence[int], r: int, s: int) -> bool:
    """Whether the label of (r, s) is a genuine choice.  Pairs leaving an empty
    resource are fixed by convention: LE, or GT when ``s`` already holds every
    agent (its cost at N + 1 does not exist)."""
    return n[r] > 0


def fixed_label(n: Sequence[int], r: int, s: int) -> bool:
    return GT if n[s] == sum(n) else LE


def signature_of(costs: CostTable, n: Sequence[int]) -> Signature:
    """Label each pair by C_r(n_r) <= C_s(n_s + 1); ties go to LE.

    An empty resource ``r`` contributes cost 0 on the left, so its labels are
    LE except into a resource that already holds all N agents, which is GT.
    """
    n = tuple(n)
    R = len(n)
    labels = []
    for r, s in ordered_pairs(R):
        if not pair_is_free(n, r, s):
            labels.append(fixed_label(n, r, s))
            continue
        stay, move = costs[r][n[r] - 1], costs[s][n[s]]
        labels.append(stay <= move + tolerance_for(stay, move))
    return Signature(n, tuple(labels))


def allowable_sets(inst: Instance, sig: Signature) -> list:
    """For each agent, the resources it may occupy in an equilibrium obeying
    ``sig``."""
    out = []
    for acts in inst.action_sets:
        out.append([r for r in acts if all(sig.label(r, s) for s in acts if s != r)])
    return out


def find_obeying_assignment(inst: Instance, sig: Signature):
    """An action profile matching agents along allowable edges with exactly
    ``sig.config`` agents per resource, or ``None``."""
    return match_with_demands(allowable_sets(inst, sig), sig.config)


def is_pure_ne(costs: CostTable, a: Sequence[int], action_sets) -> bool:
    R = len(costs)
    n = [0] * R
    for i, r in enumerate(a):
        if r not in action_sets[i]:
            raise InvalidAction(f"agent {i} cannot use resource {r}")
        n[r] += 1
    for i, r in enumerate(a):
        stay = costs[r][n[r] - 1]
        for s in action_sets[i]:
            if s == r:
                continue
            move = costs[s][n[s]]
            if stay > move + tolerance_for(stay, move):
                return False
    return True


def nash_configurations(inst: Instance, costs: CostTable,
                        max_configs: int = DEFAULT_MAX_CONFIGS) -> Iterator[NashResult]:
    """Every configuration supporting a pure NE under ``costs``, with one
    witnessing profile each, in lexicographic order."""
    for n in enumerate_configurations(inst, max_configs):
        a = find_obeying_assignment(inst, signature_of(costs, n))
        if a is not None:
            yield NashResult(n, a, social_cost(costs, n))


def best_nash(inst: Instance, costs: CostTable, max_configs: int = DEFAULT_MAX_CONFIGS) -> NashResult:
    """Cost-minimising pure NE; ties go to the lexicographically first
    configuration."""
    best = None
    for res in nash_configurations(inst, costs, max_configs):
        if best is None or res.cost < best.cost - tolerance_for(res.cost, best.cost):
            best = res
    return best


def worst_nash(inst: Instance, costs: CostTable, max_configs: int = DEFAULT_MAX_CONFIGS) -> NashResult:
    worst = None
    for res in nash_configurations(inst, costs, max_configs):
        if worst is None or res.cost > worst.cost + tolerance_for(res.cost, worst.cost):
            worst = res
    return worst


def potential_minimizer(inst: Instance, costs: CostTable) -> tuple:
    configs = enumerate_configurations(inst)
    return min(configs, key=lambda n: potential(costs, n))


def best_response_path(inst: Instance, costs: CostTable, start: Sequence[int],
                       max_rounds: int = 100_000) -> list:
    """Sequence of profiles visited by improving moves from ``start``.

    Each step moves the lowest-indexed agent that has a strictly improving
    deviation to its cheapest alternative (lowest index on ties).
    """
    a = list(start)
    n = list(config_of_profile(inst, a))
    path = [tuple(a)]
    for _ in range(max_rounds):
        mover = None
        for i, r in enumerate(a):
            stay = costs[r][n[r] - 1]
            best_s, best_cost = None, stay
            for s in sorted(inst.action_sets[i]):
                if s == r:
                    continue
                move = costs[s][n[s]]
                if move < best_cost - tolerance_for(move, best_cost):
                    best_s, best_cost = s, move
            if best_s is not None:
                mover = (i, r, best_s)
                break
        if mover is None:
            return path
        i, r, s = mover
        a[i] = s
        n[r] -= 1
        n[s] += 1
        path.append(tuple(a))
    raise MaxRoundsExceeded(f"no equilibrium reached after {max_rounds} improving moves")


def best_response_dynamics(inst: Instance, costs: CostTable, start: Sequence[int],
                           max_rounds: int = 100_000) -> tuple:
    return best_response_path(inst, costs, start, max_rounds)[-1]


def brute_force_nash_profiles(inst: Instance, costs: CostTable) -> list:
    """All pure NE profiles by exhaustive enumeration (desk-scale oracle)."""
    return [
        a for a in itertools.product(*(sorted(s) for s in inst.action_sets))
        if is_pure_ne(costs, a, inst.action_sets)
    ]
