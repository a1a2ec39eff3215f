"""Optimal private signaling through the reduced form.

A private scheme ``pi(a | theta)`` is summarised by the marginals

    x[theta, n, i, r] = Pr(configuration n and agent i is told r | theta).

Obedience is linear in ``x``, and ``x`` comes from some scheme iff every agent
sees the same configuration mass ``P(n | theta)`` and each resource collects
``n_r`` times that mass.  The optimal ``x`` is therefore a polynomial LP for a
constant number of resources; an explicit scheme is recovered branch by
branch by decomposing the fractional agent/resource flow into assignments.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import (
    DEFAULT_MAX_CONFIGS,
    Instance,
    all_exact,
    all_profiles,
    config_of_profile,
    cost_accessor,
    enumerate_configurations,
    profile_count,
)
from .errors import DegenerateConfiguration, InfeasibleMarginals, InvalidParams, SizeGuard
from .flow import BipartiteFlowProblem, decompose_fractional_flow
from .lpsolve import FEASIBILITY_TOL, LPBuilder, solve_lp

DEFAULT_MAX_REDUCED = 10**7
DEFAULT_MAX_EXPONENTIAL = 10**5
NEGATIVE_CLAMP = 1e-9
BRANCH_DROP = 1e-12


@dataclass
class ReducedForm:
    """Sparse marginals keyed by ``(theta, config, agent, resource)``."""

    entries: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.entries.get(key, 0)

    def __len__(self):
        return len(self.entries)

    def items(self):
        return self.entries.items()

    def configurations(self, theta: int) -> list:
        return sorted({n for (t, n, _, _) in self.entries if t == theta})

    def config_mass(self, theta: int, n: tuple, agent: int):
        return sum((v for (t, m, i, _), v in self.entries.items()
                    if t == theta and m == n and i == agent), 0)


@dataclass
class ExplicitScheme:
    """``per_state[theta]`` is a list of ``(profile, probability)``."""

    per_state: list

    def __iter__(self):
        return iter(self.per_state)

    @property
    def support_size(self) -> int:
        return sum(len(s) for s in self.per_state)


@dataclass(frozen=True)
class Violation:
    constraint: str
    index: tuple
    residual: object


def _prior(inst, exact):
    return list(inst.prior) if exact else [float(p) for p in inst.prior]


# -- reduced-form LP ---------------------------------------------------------

def reduced_lp_size(inst: Instance, max_configs: int = DEFAULT_MAX_CONFIGS) -> int:
    configs = enumerate_configurations(inst, max_configs)
    return len(configs) * inst.num_agents * inst.num_resources * inst.num_states


def solve_optimal_private(inst: Instance, backend: str = "highs",
                          max_size: int = DEFAULT_MAX_REDUCED):
    """Cost-minimising obedient private scheme, in reduced form.

    An auxiliary ``z[theta, n] = P(n | theta)`` turns the coupling between
    agents into two families of equalities: each agent's row mass equals
    ``z`` and resource ``r`` receives ``n_r * z``.  Variables are created
    only for ``r`` in the agent's action set with ``n_r > 0``.
    Returns ``(ReducedForm, value)``.
    """
    size = reduced_lp_size(inst)
    if size > max_size:
        raise SizeGuard(f"reduced-form LP has {size} cells, above the cap of {max_size}")
    exact = backend == "exact"
    c = cost_accessor(inst, exact)
    mu = _prior(inst, exact)
    configs = enumerate_configurations(inst)
    S, N = inst.num_states, inst.num_agents

    xvars, zvars = {}, {}
    for t in range(S):
        for n in configs:
            zvars[t, n] = len(xvars) + len(zvars)
            for i, acts in enumerate(inst.action_sets):
                for r in acts:
                    if n[r]:
                        xvars[t, n, i, r] = len(xvars) + len(zvars)
    lp = LPBuilder(len(xvars) + len(zvars), exact=exact)

    for (t, n, i, r), j in xvars.items():
        lp.c[j] = mu[t] * c(t, r, n[r])

    rows_agent = defaultdict(dict)
    rows_res = defaultdict(dict)
    for (t, n, i, r), j in xvars.items():
        rows_agent[t, n, i][j] = 1
        rows_res[t, n, r][j] = 1
    for t in range(S):
        lp.add_eq({zvars[t, n]: 1 for n in configs}, 1)
        for n in configs:
            z = zvars[t, n]
            for i in range(N):
                row = dict(rows_agent.get((t, n, i), {}))
                row[z] = -1
                lp.add_eq(row)
            for r in range(inst.num_resources):
                if n[r]:
                    row = dict(rows_res.get((t, n, r), {}))
                    row[z] = -n[r]
                    lp.add_eq(row)

    for (i, r, s), terms in _obedience_terms(inst, xvars, c, mu).items():
        if terms:
            lp.add_ub(terms, 0)

    sol = solve_lp(lp.build(), backend)
    if not sol.optimal:
        # the feasible set always contains full revelation of a per-state NE
        raise InfeasibleMarginals(f"reduced-form LP is {sol.status.value}")
    entries = {}
    for key, j in xvars.items():
        v = sol.x[j]
        if exact:
            if v:
                entries[key] = v
        elif v > 0:
            entries[key] = float(v)
    return ReducedForm(entries), sol.objective


def _obedience_terms(inst, xvars, c, mu) -> dict:
    """Obedience row coefficients per ``(agent, told, deviation)``."""
    rows = {}
    for i, acts in enumerate(inst.action_sets):
        for r in acts:
            for s in acts:
                if s != r:
                    rows[i, r, s] = {}
    for (t, n, i, r), j in xvars.items():
        for s in inst.action_sets[i]:
            if s == r:
                continue
            coef = mu[t] * (c(t, r, n[r]) - c(t, s, n[s] + 1))
            if coef:
                rows[i, r, s][j] = coef
    return rows


def solve_optimal_ce(inst: Instance, backend: str = "highs", max_size: int = DEFAULT_MAX_REDUCED):
    """Optimal correlated equilibrium: the single-state private problem."""
    if inst.num_states != 1:
        raise InvalidParams(f"correlated equilibrium needs one state, instance has {inst.num_states}")
    return solve_optimal_private(inst, backend, max_size)


# -- exponential oracle --------------------------------------------------------

def solve_bce_exponential(inst: Instance, backend: str = "highs",
                          max_size: int = DEFAULT_MAX_EXPONENTIAL):
    """Optimal Bayes correlated equilibrium over explicit action profiles.

    One variable per (state, profile); only usable on desk-sized games.
    Returns ``(ExplicitScheme, value)``.
    """
    size = profile_count(inst) * inst.num_states
    if size > max_size:
        raise SizeGuard(f"{size} state-profile pairs exceed the cap of {max_size}")
    exact = backend == "exact"
    c = cost_accessor(inst, exact)
    mu = _prior(inst, exact)
    profiles = list(all_profiles(inst))
    configs = [config_of_profile(inst, a) for a in profiles]
    S, P = inst.num_states, len(profiles)
    lp = LPBuilder(S * P, exact=exact)
    obey = {(i, r, s): {} for i, acts in enumerate(inst.action_sets)
            for r in acts for s in acts if s != r}
    for t in range(S):
        for k, (a, n) in enumerate(zip(profiles, configs)):
            j = t * P + k
            lp.c[j] = mu[t] * sum(m * c(t, r, m) for r, m in enumerate(n) if m)
            for i, r in enumerate(a):
                for s in inst.action_sets[i]:
                    if s != r:
                        coef = mu[t] * (c(t, r, n[r]) - c(t, s, n[s] + 1))
                        if coef:
                            obey[i, r, s][j] = coef
        lp.add_eq({t * P + k: 1 for k in range(P)}, 1)
    for terms in obey.values():
        if terms:
            lp.add_ub(terms, 0)
    sol = solve_lp(lp.build(), backend)
    if not sol.optimal:
        raise InfeasibleMarginals(f"exponential BCE LP is {sol.status.value}")
    per_state = []
    for t in range(S):
        per_state.append([
            (profiles[k], sol.x[t * P + k] if exact else float(sol.x[t * P + k]))
            for k in range(P) if sol.x[t * P + k] > 0
        ])
    return ExplicitScheme(per_state), sol.objective


# -- conversions and checks ----------------------------------------------------

def induced_reduced_form(inst: Instance, scheme: ExplicitScheme) -> ReducedForm:
    """Marginalise an explicit scheme: x[theta, n(a), i, a_i] += pi(a | theta)."""
    entries = {}
    for t, support in enumerate(scheme.per_state):
        for a, prob in support:
            n = config_of_profile(inst, a)
            for i, r in enumerate(a):
                key = (t, n, i, r)
                entries[key] = entries.get(key, 0) + prob
    return ReducedForm(entries)


def scheme_cost(inst: Instance, scheme: ExplicitScheme):
    """Expected social cost of an explicit scheme under the prior."""
    total = 0
    for t, support in enumerate(scheme.per_state):
        table = inst.costs[t]
        for a, prob in support:
            n = config_of_profile(inst, a)
            total += inst.prior[t] * prob * sum(m * table[r][m - 1] for r, m in enumerate(n) if m)
    return total


def reduced_cost(inst: Instance, x: ReducedForm):
    total = 0
    for (t, n, i, r), v in x.items():
        total += inst.prior[t] * v * inst.costs[t][r][n[r] - 1]
    return total


def check_reduced_feasibility(inst: Instance, x: ReducedForm, tol: float = FEASIBILITY_TOL) -> list:
    """Every violated implementability constraint of ``x`` with its residual.

    ``availability`` flags mass outside an action set or on an empty
    resource, ``nonnegative`` flags negative cells, ``mass`` a per-(agent,
    state) total other than 1, ``coupling`` a resource whose load differs from
    ``n_r`` times some agent's configuration mass.  Empty means feasible.
    """
    report = []
    N, R = inst.num_agents, inst.num_resources
    row_mass = defaultdict(int)
    branch = defaultdict(int)
    for (t, n, i, r), v in x.items():
        if v < -tol:
            report.append(Violation("nonnegative", (t, n, i, r), -v))
        if (r not in inst.action_sets[i] or not n[r]) and abs(v) > tol:
            report.append(Violation("availability", (t, n, i, r), abs(v)))
        row_mass[i, t] += v
        branch[t, n, i, r] += v
    for t in range(inst.num_states):
        for i in range(N):
            resid = abs(row_mass[i, t] - 1)
            if resid > tol:
                report.append(Violation("mass", (i, t), resid))
    configs = {(t, n) for (t, n, _, _) in x.entries}
    for t, n in sorted(configs):
        agent_mass = [sum(branch[t, n, i, r] for r in range(R)) for i in range(N)]
        for r in range(R):
            load = sum(branch[t, n, j, r] for j in range(N))
            for i in range(N):
                resid = abs(load - n[r] * agent_mass[i])
                if resid > tol:
                    report.append(Violation("coupling", (t, n, i, r), resid))
    return report


def obedience_residuals_reduced(inst: Instance, x: ReducedForm) -> dict:
    """Left-hand sides of the reduced obedience rows, keyed ``(i, r, r')``;
    a row is satisfied when its value is <= 0."""
    out = {(i, r, s): 0 for i, acts in enumerate(inst.action_sets)
           for r in acts for s in acts if s != r}
    for (t, n, i, r), v in x.items():
        if not v or not n[r]:
            continue
        table = inst.costs[t]
        for s in inst.action_sets[i]:
            if s != r:
                out[i, r, s] += inst.prior[t] * v * (table[r][n[r] - 1] - table[s][n[s]])
    return out


def obedience_residuals_explicit(inst: Instance, scheme: ExplicitScheme) -> dict:
    """Same quantities computed from the explicit scheme, profile by profile."""
    out = {(i, r, s): 0 for i, acts in enumerate(inst.action_sets)
           for r in acts for s in acts if s != r}
    for t, support in enumerate(scheme.per_state):
        table = inst.costs[t]
        for a, prob in support:
            n = config_of_profile(inst, a)
            for i, r in enumerate(a):
                for s in inst.action_sets[i]:
                    if s != r:
                        out[i, r, s] += inst.prior[t] * prob * (table[r][n[r] - 1] - table[s][n[s]])
    return out


def check_obedience(inst: Instance, scheme: ExplicitScheme, tol: float = FEASIBILITY_TOL) -> list:
    """Every ``(agent, recommended, deviation)`` whose expected gain from
    deviating exceeds ``tol``.  Empty means the scheme is a BCE."""
    res = obedience_residuals_explicit(inst, scheme)
    return [Violation("obedience", key, v) for key, v in res.items() if v > tol]


def project_reduced_form(inst: Instance, x: ReducedForm) -> ReducedForm:
    """Clean LP noise: clamp tiny negatives to zero and rescale each
    (agent, state) row to total mass one."""
    if all_exact(v for _, v in x.items()):
        return x
    entries = {}
    for key, v in x.items():
        if v < -NEGATIVE_CLAMP:
            raise InfeasibleMarginals(f"cell {key} is negative ({v})")
        if v > 0:
            entries[key] = float(v)
    mass = defaultdict(float)
    for (t, _, i, _), v in entries.items():
        mass[t, i] += v
    return ReducedForm({k: v / mass[k[0], k[2]] for k, v in entries.items()})


# -- sampling -------------------------------------------------------------------

@dataclass
class _Branch:
    config: tuple
    prob: object
    flow: tuple


def _branches(inst: Instance, x: ReducedForm, theta: int) -> list:
    """Configuration branches of state ``theta``: ``P(n | theta)`` (averaged
    over agents) and the conditional flow ``P(i -> r | n, theta)``."""
    N, R = inst.num_agents, inst.num_resources
    cells = defaultdict(lambda: [[0] * R for _ in range(N)])
    for (t, n, i, r), v in x.items():
        if t == theta:
            cells[n][i][r] += v
    exact = all_exact(v for _, v in x.items())
    out = []
    for n in sorted(cells):
        rows = cells[n]
        mass = [sum(row) for row in rows]
        prob = sum(mass) / N
        if exact:
            if not prob:
                continue
            flow = tuple(tuple(v / m if m else Fraction(0) for v in row) for row, m in zip(rows, mass))
        else:
            if prob < BRANCH_DROP:
                continue
            flow = _balance(rows, n)
        out.append(_Branch(n, prob, flow))
    if not exact:
        total = sum(b.prob for b in out)
        for b in out:
            b.prob /= total
    return out


def _balance(rows, demands, iters: int = 10_000, tol: float = 1e-14) -> tuple:
    """Row-normalise a float flow, then alternate row/column scaling on its
    support until rows sum to 1 and columns to ``demands``.  Removes solver
    noise without changing which edges carry flow."""
    f = np.asarray(rows, dtype=float)
    f[f < BRANCH_DROP * max(f.max(), 1.0)] = 0.0
    d = np.asarray(demands, dtype=float)
    for _ in range(iters):
        rs = f.sum(axis=1, keepdims=True)
        f = np.divide(f, rs, out=np.zeros_like(f), where=rs > 0)
        cs = f.sum(axis=0)
        if np.max(np.abs(cs - d)) < tol:
            break
        f = f * np.divide(d, cs, out=np.zeros_like(d), where=cs > 0)
    return tuple(tuple(float(v) for v in row) for row in f)


class PrivateSampler:
    """Draws action profiles from the scheme implementing a reduced form.

    A configuration is drawn first, then an assignment from that
    configuration's flow decomposition; decompositions are computed on first
    use and cached, so only branches that are actually drawn cost anything.
    """

    def __init__(self, inst: Instance, x: ReducedForm):
        self.inst = inst
        self.x = project_reduced_form(inst, x)
        self._branches = {}
        self._decomp = {}

    def branches(self, theta: int) -> list:
        if theta not in self._branches:
            if not 0 <= theta < self.inst.num_states:
                raise InvalidParams(f"state index {theta} out of range")
            self._branches[theta] = _branches(self.inst, self.x, theta)
        return self._branches[theta]

    def decomposition(self, theta: int, k: int):
        key = (theta, k)
        if key not in self._decomp:
            b = self.branches(theta)[k]
            self._decomp[key] = decompose_fractional_flow(BipartiteFlowProblem.from_rows(b.flow, b.config))
        return self._decomp[key]

    def sample(self, theta: int, rng: np.random.Generator) -> tuple:
        return tuple(int(r) for r in self.sample_many(theta, rng, 1)[0])

    def sample_many(self, theta: int, rng: np.random.Generator, size: int) -> np.ndarray:
        """``size`` profiles as an integer array of shape (size, N)."""
        branches = self.branches(theta)
        probs = np.array([float(b.prob) for b in branches])
        picks = rng.choice(len(branches), size=size, p=probs / probs.sum())
        out = np.empty((size, self.inst.num_agents), dtype=int)
        for k in range(len(branches)):
            idx = np.flatnonzero(picks == k)
            if not idx.size:
                continue
            if branches[k].prob <= 0:
                raise DegenerateConfiguration(f"drew configuration {branches[k].config} with zero mass")
            dec = self.decomposition(theta, k)
            w = np.array([float(v) for v in dec.weights])
            choice = rng.choice(len(dec.assignments), size=idx.size, p=w / w.sum())
            out[idx] = np.asarray(dec.assignments)[choice]
        return out


def sample_private(inst: Instance, x: ReducedForm, theta: int, rng: np.random.Generator) -> tuple:
    """One profile drawn for state ``theta``; the caller owns ``rng``."""
    return PrivateSampler(inst, x).sample(theta, rng)


def explicit_from_reduced(inst: Instance, x: ReducedForm) -> ExplicitScheme:
    """Materialise the full scheme: every branch decomposed, with
    ``pi(a | theta) = p_k * P(n | theta)``."""
    sampler = PrivateSampler(inst, x)
    per_state = []
    for t in range(inst.num_states):
        probs = {}
        for k, b in enumerate(sampler.branches(t)):
            for a, w in sampler.decomposition(t, k):
                probs[a] = probs.get(a, 0) + w * b.prob
        per_state.append(sorted(probs.items()))
    return ExplicitScheme(per_state)


def max_cell_difference(x: ReducedForm, y: ReducedForm) -> float:
    keys = set(x.entries) | set(y.entries)
    return max((abs(float(x[k]) - float(y[k])) for k in keys), default=0.0)


def profile_frequencies(profiles: Sequence[Sequence[int]]) -> dict:
    counts = defaultdict(int)
    for a in profiles:
        counts[tuple(int(r) for r in a)] += 1
    return dict(counts)
