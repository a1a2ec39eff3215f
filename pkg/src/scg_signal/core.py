"""Game model for singleton congestion games with an uncertain state.

Costs, priors and posteriors are kept as :class:`fractions.Fraction` whenever
the inputs are rational, so equilibrium membership and label ties are decided
exactly.  Float inputs switch comparisons to an absolute tolerance of
``FLOAT_TOL``.

Resources, agents and states are 0-indexed.  A cost table is indexed by
occupancy ``n = 1..N``; ``costs[r][n - 1]`` is the cost of resource ``r`` with
``n`` agents on it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from numbers import Rational
from typing import Sequence

import numpy as np

from .errors import (
    CostNotMonotone,
    DimensionMismatch,
    EmptyActionSet,
    InstanceError,
    InvalidAction,
    NegativeCost,
    PriorNotNormalized,
    SizeGuard,
)

FLOAT_TOL = 1e-9
DEFAULT_MAX_CONFIGS = 10**7

CostTable = tuple  # tuple[tuple[number, ...], ...], one row per resource


def is_exact(value) -> bool:
    return isinstance(value, Rational)


def all_exact(values) -> bool:
    return all(is_exact(v) for v in values)


def tolerance_for(*values) -> float:
    """Comparison slack: zero for rationals, ``FLOAT_TOL`` otherwise."""
    return 0 if all(is_exact(v) for v in values) else FLOAT_TOL


def as_number(value):
    """Parse ints, Fractions, decimal strings and ``"p/q"`` strings exactly."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (float, np.floating)):
        return float(value)
    raise TypeError(f"unsupported numeric value {value!r}")


@dataclass(frozen=True)
class Instance:
    """An uncertain singleton congestion game.

    ``costs[theta][r][n - 1]`` is c_r^theta(n).  Construct directly and pass
    through :func:`validate_instance`, or use :func:`make_instance`.
    """

    num_agents: int
    resources: tuple
    action_sets: tuple
    state_names: tuple
    prior: tuple
    costs: tuple
    name: str = ""
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "resources", tuple(self.resources))
        object.__setattr__(
            self, "action_sets", tuple(tuple(int(r) for r in a) for a in self.action_sets)
        )
        object.__setattr__(self, "state_names", tuple(self.state_names))
        object.__setattr__(self, "prior", tuple(as_number(p) for p in self.prior))
        object.__setattr__(
            self,
            "costs",
            tuple(
                tuple(tuple(as_number(v) for v in row) for row in table)
                for table in self.costs
            ),
        )

    def __hash__(self):
        if not self._hash:
            h = hash((self.num_agents, self.resources, self.action_sets, self.prior, self.costs))
            object.__setattr__(self, "_hash", h or 1)
        return self._hash

    @property
    def num_resources(self) -> int:
        return len(self.resources)

    @property
    def num_states(self) -> int:
        return len(self.prior)

    @property
    def exact(self) -> bool:
        return all_exact(self.prior) and all(
            all_exact(row) for table in self.costs for row in table
        )

    @cached_property
    def is_symmetric(self) -> bool:
        full = tuple(range(self.num_resources))
        return all(tuple(sorted(a)) == full for a in self.action_sets)

    @cached_property
    def cost_array(self) -> np.ndarray:
        """Float array of shape (states, resources, N); entry [t, r, n-1]."""
        return np.array(self.costs, dtype=float)

    @cached_property
    def prior_array(self) -> np.ndarray:
        return np.array(self.prior, dtype=float)

    def state_costs(self, theta: int) -> CostTable:
        return self.costs[theta]


def make_instance(num_agents, costs, prior, action_sets=None, resources=None,
                  state_names=None, name="") -> Instance:
    """Build and validate an instance; action sets default to all resources."""
    num_resources = len(costs[0])
    if action_sets is None:
        action_sets = [tuple(range(num_resources))] * num_agents
    if resources is None:
        resources = tuple(f"r{r}" for r in range(num_resources))
    if state_names is None:
        state_names = tuple(f"s{t}" for t in range(len(prior)))
    inst = Instance(num_agents, resources, action_sets, state_names, prior, costs, name)
    return validate_instance(inst)


def validate_instance(raw: Instance) -> Instance:
    """Return ``raw`` if every structural invariant holds, else raise."""
    n_agents = raw.num_agents
    if not isinstance(n_agents, int) or n_agents < 1:
        raise InstanceError(f"num_agents must be a positive integer, got {n_agents!r}")
    n_res = raw.num_resources
    if n_res < 1:
        raise InstanceError("at least one resource is required")
    if raw.num_states < 1:
        raise InstanceError("at least one state is required")
    if len(raw.state_names) != raw.num_states or len(raw.costs) != raw.num_states:
        raise DimensionMismatch("state names, priors and cost tables differ in length")
    if len(raw.action_sets) != n_agents:
        raise DimensionMismatch(
            f"action_sets has {len(raw.action_sets)} entries for {n_agents} agents"
        )
    for i, acts in enumerate(raw.action_sets):
        if not acts:
            raise EmptyActionSet(f"action_sets[{i}] is empty")
        for r in acts:
            if not 0 <= r < n_res:
                raise DimensionMismatch(f"action_sets[{i}] names unknown resource {r}")
        if len(set(acts)) != len(acts):
            raise InstanceError(f"action_sets[{i}] repeats a resource")

    for t, p in enumerate(raw.prior):
        if p < 0:
            raise PriorNotNormalized(f"states[{t}].prior is negative ({p})")
    total = sum(raw.prior)
    if all_exact(raw.prior):
        if total != 1:
            raise PriorNotNormalized(f"prior sums to {total}, not 1")
    elif abs(total - 1) > FLOAT_TOL:
        raise PriorNotNormalized(f"prior sums to {total}, not 1")

    for t, table in enumerate(raw.costs):
        if len(table) != n_res:
            raise DimensionMismatch(f"states[{t}].costs has {len(table)} resources, expected {n_res}")
        for r, row in enumerate(table):
            if len(row) != n_agents:
                raise DimensionMismatch(
                    f"states[{t}].costs[{r}] has length {len(row)}, expected {n_agents}"
                )
            for k, v in enumerate(row):
                if v < 0:
                    raise NegativeCost(f"states[{t}].costs[{r}][{k}] = {v} is negative")
                if k and v < row[k - 1]:
                    raise CostNotMonotone(
                        f"states[{t}].costs[{r}] decreases at n={k + 1} ({row[k - 1]} -> {v})"
                    )
    return raw


def check_posterior(inst: Instance, p: Sequence) -> None:
    if len(p) != inst.num_states:
        raise DimensionMismatch(f"posterior has {len(p)} entries, instance has {inst.num_states} states")


def expected_cost_functions(inst: Instance, p: Sequence) -> CostTable:
    """C_r(n) = sum_theta p_theta c_r^theta(n); exact when ``p`` is rational."""
    check_posterior(inst, p)
    if inst.exact and all_exact(p):
        p = [Fraction(v) for v in p]
        return tuple(
            tuple(
                sum((p[t] * inst.costs[t][r][k] for t in range(inst.num_states) if p[t]),
                    Fraction(0))
                for k in range(inst.num_agents)
            )
            for r in range(inst.num_resources)
        )
    arr = np.tensordot(np.asarray(p, dtype=float), inst.cost_array, axes=1)
    return tuple(tuple(float(v) for v in row) for row in arr)


def cost_accessor(inst: Instance, exact: bool):
    """``c(theta, r, n)`` in the arithmetic of an LP backend: rationals for the
    exact backend, floats otherwise."""
    if exact:
        return lambda t, r, k: inst.costs[t][r][k - 1]
    arr = inst.cost_array
    return lambda t, r, k: float(arr[t, r, k - 1])


def social_cost(costs: CostTable, n: Sequence[int]):
    """Total cost sum_r n_r C_r(n_r); empty resources contribute nothing."""
    return sum((k * costs[r][k - 1] for r, k in enumerate(n) if k > 0), 0)


def potential(costs: CostTable, n: Sequence[int]):
    """Rosenthal potential sum_r sum_{j <= n_r} C_r(j)."""
    return sum((sum(costs[r][:k], 0) for r, k in enumerate(n) if k > 0), 0)


def compositions(total: int, parts: int):
    """All non-negative integer vectors of length ``parts`` summing to ``total``,
    in lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in compositions(total - head, parts - 1):
            yield (head,) + tail


def configuration_count_bound(num_agents: int, num_resources: int) -> int:
    return comb(num_agents + num_resources - 1, num_resources - 1)


def is_feasible_configuration(inst: Instance, n: Sequence[int]) -> bool:
    from .flow import match_with_demands

    if len(n) != inst.num_resources or sum(n) != inst.num_agents or min(n) < 0:
        return False
    if inst.is_symmetric:
        return True
    return match_with_demands(inst.action_sets, n) is not None


def enumerate_configurations(inst: Instance, max_configs: int = DEFAULT_MAX_CONFIGS) -> list:
    """Feasible configurations of ``inst`` in lexicographic order."""
    bound = configuration_count_bound(inst.num_agents, inst.num_resources)
    if bound > max_configs:
        raise SizeGuard(f"{bound} candidate configurations exceed the cap of {max_configs}")
    return _feasible_configurations(inst)


_CONFIG_CACHE: dict = {}


def _feasible_configurations(inst: Instance) -> list:
    key = (inst.num_agents, inst.num_resources, inst.action_sets)
    cached = _CONFIG_CACHE.get(key)
    if cached is None:
        cached = [
            n for n in compositions(inst.num_agents, inst.num_resources)
            if is_feasible_configuration(inst, n)
        ]
        if len(_CONFIG_CACHE) > 256:
            _CONFIG_CACHE.clear()
        _CONFIG_CACHE[key] = cached
    return list(cached)


def config_of_profile(inst: Instance, a: Sequence[int]) -> tuple:
    """Per-resource agent counts of action profile ``a``."""
    if len(a) != inst.num_agents:
        raise DimensionMismatch(f"profile has {len(a)} entries for {inst.num_agents} agents")
    counts = [0] * inst.num_resources
    for i, r in enumerate(a):
        if r not in inst.action_sets[i]:
            raise InvalidAction(f"agent {i} cannot use resource {r}")
        counts[r] += 1
    return tuple(counts)


def all_profiles(inst: Instance):
    """Every action profile, in lexicographic order (size prod |A_i|)."""
    return itertools.product(*(sorted(a) for a in inst.action_sets))


def profile_count(inst: Instance) -> int:
    out = 1
    for a in inst.action_sets:
        out *= len(a)
    return out
