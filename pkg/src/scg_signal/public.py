"""Optimal public signaling under optimistic equilibrium selection.

The simplex of posteriors is cut into regions, one per signature (see
:mod:`scg_signal.equilibrium`).  Inside a region the optimistic social cost of
the signature's equilibrium is linear in the posterior, so the optimal scheme
is found by a single LP with one unnormalised posterior vector per feasible
signature, coupled by the requirement that the vectors sum to the prior.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    DEFAULT_MAX_CONFIGS,
    Instance,
    all_exact,
    config_of_profile,
    cost_accessor,
    enumerate_configurations,
    expected_cost_functions,
    social_cost,
)
from .equilibrium import (
    Signature,
    best_nash,
    find_obeying_assignment,
    fixed_label,
    ordered_pairs,
    pair_is_free,
    worst_nash,
)
from .errors import DimensionMismatch, InvalidScheme, SizeGuard
from .lpsolve import LPBuilder, solve_lp

DEFAULT_MAX_SIGNATURES = 10**7
SIGNAL_DROP = 1e-12
SCHEME_TOL = 1e-9


@dataclass(frozen=True)
class Signal:
    """One public signal: emission probability per state, the posterior it
    induces, and the recommended pure NE with its expected social cost."""

    emission: tuple
    probability: object
    posterior: tuple
    config: tuple
    assignment: tuple
    cost: object


@dataclass(frozen=True)
class PublicScheme:
    signals: tuple

    def __len__(self):
        return len(self.signals)

    def __iter__(self):
        return iter(self.signals)

    @property
    def emissions(self) -> list:
        return [s.emission for s in self.signals]


def _zero_like(values):
    return Fraction(0) if all_exact(values) else 0.0


def scheme_from_emissions(inst: Instance, emissions: Sequence[Sequence], recommend=None) -> PublicScheme:
    """Build a scheme from ``emissions[k][theta] = pi(sigma_k | theta)``.

    ``recommend[k]`` may supply ``(config, assignment)`` for signal ``k``;
    otherwise the cost-minimising NE at the posterior is recommended.
    """
    signals = []
    for k, em in enumerate(emissions):
        if len(em) != inst.num_states:
            raise DimensionMismatch(f"signal {k} has {len(em)} emission entries")
        joint = [mu * e for mu, e in zip(inst.prior, em)]
        prob = sum(joint, _zero_like(joint))
        if prob <= 0:
            continue
        post = tuple(j / prob for j in joint)
        costs = expected_cost_functions(inst, post)
        if recommend is not None and recommend[k] is not None:
            config, assignment = recommend[k]
        else:
            ne = best_nash(inst, costs)
            config, assignment = ne.config, ne.assignment
        signals.append(Signal(tuple(em), prob, post, tuple(config), tuple(assignment),
                              social_cost(costs, config)))
    return PublicScheme(tuple(signals))


def scheme_from_posteriors(inst: Instance, weighted: Sequence[tuple], recommend=None) -> PublicScheme:
    """Build a scheme from ``(Pr(sigma), posterior)`` pairs that decompose the
    prior.  Zero-prior states emit the first signal."""
    emissions = []
    for prob, post in weighted:
        emissions.append(tuple(
            (prob * p / mu) if mu else int(not emissions)
            for p, mu in zip(post, inst.prior)
        ))
    return scheme_from_emissions(inst, emissions, recommend)


def validate_public_scheme(inst: Instance, scheme: PublicScheme, tol: float = SCHEME_TOL) -> None:
    """Raise :class:`InvalidScheme` unless emissions are distributions per
    state and the stored posteriors are consistent with them."""
    if not scheme.signals:
        raise InvalidScheme("scheme has no signals")
    for t in range(inst.num_states):
        col = [s.emission[t] for s in scheme.signals]
        if min(col) < -tol:
            raise InvalidScheme(f"negative emission probability for state {t}")
        slack = 0 if all_exact(col) else tol
        if inst.prior[t] and abs(sum(col) - 1) > slack:
            raise InvalidScheme(f"emissions for state {t} sum to {sum(col)}")
    for k, s in enumerate(scheme.signals):
        for t in range(inst.num_states):
            lhs = s.posterior[t] * s.probability
            rhs = inst.prior[t] * s.emission[t]
            slack = 0 if all_exact((lhs, rhs)) else tol
            if abs(lhs - rhs) > slack:
                raise InvalidScheme(f"signal {k} posterior inconsistent at state {t}")


def evaluate_public_scheme(inst: Instance, scheme: PublicScheme, selection: str = "best"):
    """Expected social cost when every signal is played at its best (or
    worst) pure NE."""
    validate_public_scheme(inst, scheme)
    pick = {"best": best_nash, "worst": worst_nash}[selection]
    total = None
    for s in scheme.signals:
        value = s.probability * pick(inst, expected_cost_functions(inst, s.posterior)).cost
        total = value if total is None else total + value
    return total


def full_info_scheme(inst: Instance) -> PublicScheme:
    one, zero = (Fraction(1), Fraction(0)) if inst.exact else (1.0, 0.0)
    S = inst.num_states
    emissions = [tuple(one if t == k else zero for t in range(S)) for k in range(S)]
    return scheme_from_emissions(inst, emissions)


def no_info_scheme(inst: Instance) -> PublicScheme:
    one = Fraction(1) if inst.exact else 1.0
    return scheme_from_emissions(inst, [tuple(one for _ in range(inst.num_states))])


# -- per-region LPs ----------------------------------------------------------

def state_social_costs(inst: Instance, n: Sequence[int], exact: bool = False) -> list:
    """SC(n, theta) = sum_r n_r c_r^theta(n_r) for every state."""
    c = cost_accessor(inst, exact)
    return [sum((k * c(t, r, k) for r, k in enumerate(n) if k), 0) for t in range(inst.num_states)]


def signature_rows(inst: Instance, sig: Signature, exact: bool = False) -> list:
    """Homogeneous region rows ``d`` with ``sum_theta p_theta d_theta <= 0``.

    LE pairs give C_r(n_r) - C_s(n_s + 1) <= 0, GT pairs the reverse (weak).
    Pairs out of an empty resource impose nothing.
    """
    n, c = sig.config, cost_accessor(inst, exact)
    rows = []
    for r, s in ordered_pairs(len(n)):
        if not pair_is_free(n, r, s):
            continue
        d = [c(t, r, n[r]) - c(t, s, n[s] + 1) for t in range(inst.num_states)]
        rows.append(d if sig.label(r, s) else [-v for v in d])
    return rows


def profile_rows(inst: Instance, a: Sequence[int], exact: bool = False) -> list:
    """Rows making ``a`` a pure NE: c_{a_i}(n_{a_i}) - c_s(n_s + 1) <= 0."""
    n, c = config_of_profile(inst, a), cost_accessor(inst, exact)
    rows = []
    for i, r in enumerate(a):
        for s in inst.action_sets[i]:
            if s != r:
                rows.append([c(t, r, n[r]) - c(t, s, n[s] + 1) for t in range(inst.num_states)])
    return rows


def _posterior_lp(inst, rows, objective, backend):
    exact = backend == "exact"
    S = inst.num_states
    lp = LPBuilder(S, exact=exact)
    lp.c = list(objective)
    for d in rows:
        lp.add_ub({t: d[t] for t in range(S) if d[t]}, 0)
    lp.add_eq({t: 1 for t in range(S)}, 1)
    sol = solve_lp(lp.build(), backend)
    if not sol.optimal:
        return None, float("inf")
    return tuple(sol.x), sol.objective


def per_profile_lp(inst: Instance, w: Sequence, a: Sequence[int], backend: str = "highs"):
    """Best weight-adjusted posterior among those making ``a`` a pure NE.

    Returns ``(posterior, objective)``; an empty region gives ``(None, inf)``.
    """
    exact = backend == "exact"
    sc = state_social_costs(inst, config_of_profile(inst, a), exact)
    obj = [sc[t] + (w[t] if exact else float(w[t])) for t in range(inst.num_states)]
    return _posterior_lp(inst, profile_rows(inst, a, exact), obj, backend)


def per_signature_lp(inst: Instance, w: Sequence, sig: Signature, backend: str = "highs"):
    """Best weight-adjusted posterior within the region of ``sig``."""
    exact = backend == "exact"
    sc = state_social_costs(inst, sig.config, exact)
    obj = [sc[t] + (w[t] if exact else float(w[t])) for t in range(inst.num_states)]
    return _posterior_lp(inst, signature_rows(inst, sig, exact), obj, backend)


# -- signature enumeration ---------------------------------------------------

def signature_candidate_count(inst: Instance, max_configs: int = DEFAULT_MAX_CONFIGS) -> int:
    R = inst.num_resources
    total = 0
    for n in enumerate_configurations(inst, max_configs):
        total += 1 if inst.is_symmetric else 2 ** (sum(1 for k in n if k) * (R - 1))
    return total


def _label_choices(inst: Instance, n) -> Sequence[tuple]:
    R = inst.num_resources
    pairs = ordered_pairs(R)
    free = [k for k, (r, s) in enumerate(pairs) if pair_is_free(n, r, s)]
    base = [fixed_label(n, r, s) for r, s in pairs]
    if inst.is_symmetric:
        # with full action sets an occupied resource needs every label LE
        labels = list(base)
        for k in free:
            labels[k] = True
        return [tuple(labels)]
    out = []
    for bits in itertools.product((True, False), repeat=len(free)):
        labels = list(base)
        for k, b in zip(free, bits):
            labels[k] = b
        # two occupied resources that both want to leave for each other can
        # only coexist at an exact tie, which signature_of labels LE anyway
        if any(not labels[_pair_index(R, r, s)] and not labels[_pair_index(R, s, r)]
               for r, s in pairs if r < s and n[r] and n[s]):
            continue
        out.append(tuple(labels))
    return out


def _pair_index(R, r, s):
    return r * (R - 1) + (s if s < r else s - 1)


def feasible_signatures(inst: Instance, max_signatures: int = DEFAULT_MAX_SIGNATURES,
                        max_configs: int = DEFAULT_MAX_CONFIGS, threads: int = 1) -> list:
    """Signatures admitting an obeying equilibrium, with a witness profile
    each, in deterministic (configuration, label) order."""
    count = signature_candidate_count(inst, max_configs)
    if count > max_signatures:
        raise SizeGuard(f"{count} candidate signatures exceed the cap of {max_signatures}")

    def scan(n):
        found = []
        for labels in _label_choices(inst, n):
            sig = Signature(n, labels)
            a = find_obeying_assignment(inst, sig)
            if a is not None:
                found.append((sig, a))
        return found

    configs = enumerate_configurations(inst, max_configs)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            chunks = list(pool.map(scan, configs))
    else:
        chunks = [scan(n) for n in configs]
    return [item for chunk in chunks for item in chunk]


def best_weighted_posterior(inst: Instance, w: Sequence, backend: str = "highs",
                            max_signatures: int = DEFAULT_MAX_SIGNATURES, threads: int = 1):
    """Minimise SC*(C(p)) + w.p over the simplex by solving one LP per
    feasible signature.  Returns ``(posterior, signature, objective)``."""
    sigs = [sig for sig, _ in feasible_signatures(inst, max_signatures, threads=threads)]

    def solve(sig):
        return per_signature_lp(inst, w, sig, backend)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(solve, sigs))
    else:
        results = [solve(sig) for sig in sigs]
    best = (None, None, float("inf"))
    for sig, (post, obj) in zip(sigs, results):
        if post is not None and obj < best[2]:
            best = (post, sig, obj)
    return best


def best_weighted_posterior_by_profiles(inst: Instance, w: Sequence, backend: str = "highs"):
    """Same optimum as :func:`best_weighted_posterior`, by one LP per action
    profile (exponential; oracle use only)."""
    best = (None, None, float("inf"))
    for a in itertools.product(*(sorted(s) for s in inst.action_sets)):
        post, obj = per_profile_lp(inst, w, a, backend)
        if post is not None and obj < best[2]:
            best = (post, a, obj)
    return best


# -- aggregated LP -----------------------------------------------------------

def _aggregated_lp(inst: Instance, regions: Sequence[tuple], backend: str):
    """One unnormalised posterior per region; ``regions`` holds
    ``(rows, state_costs)`` pairs."""
    exact = backend == "exact"
    S = inst.num_states
    lp = LPBuilder(len(regions) * S, exact=exact)
    for k, (rows, sc) in enumerate(regions):
        base = k * S
        for t in range(S):
            lp.c[base + t] = sc[t]
        for d in rows:
            lp.add_ub({base + t: d[t] for t in range(S) if d[t]}, 0)
    for t in range(S):
        mu = inst.prior[t] if exact else float(inst.prior[t])
        lp.add_eq({k * S + t: 1 for k in range(len(regions))}, mu)
    sol = solve_lp(lp.build(), backend)
    if not sol.optimal:
        raise InvalidScheme(f"aggregated public LP is {sol.status.value}")
    y = [sol.x[k * S:(k + 1) * S] for k in range(len(regions))]
    return y, sol.objective


def solve_optimal_public(inst: Instance, backend: str = "highs",
                         max_signatures: int = DEFAULT_MAX_SIGNATURES, threads: int = 1):
    """Social-cost-minimising public scheme under optimistic selection.

    Returns ``(scheme, value)`` where the scheme has at most one signal per
    feasible signature and recommends that signature's obeying equilibrium.
    """
    exact = backend == "exact"
    sigs = feasible_signatures(inst, max_signatures, threads=threads)
    regions = [(signature_rows(inst, sig, exact), state_social_costs(inst, sig.config, exact))
               for sig, _ in sigs]
    y, value = _aggregated_lp(inst, regions, backend)
    return _scheme_from_masses(inst, y, [(sig.config, a) for sig, a in sigs], exact), value


def solve_public_by_profiles(inst: Instance, backend: str = "highs"):
    """Optimal public value by aggregating one region per action profile
    (exponential oracle for :func:`solve_optimal_public`)."""
    exact = backend == "exact"
    profiles = list(itertools.product(*(sorted(s) for s in inst.action_sets)))
    regions = [(profile_rows(inst, a, exact),
                state_social_costs(inst, config_of_profile(inst, a), exact))
               for a in profiles]
    y, value = _aggregated_lp(inst, regions, backend)
    recs = [(config_of_profile(inst, a), a) for a in profiles]
    return _scheme_from_masses(inst, y, recs, exact), value


def _scheme_from_masses(inst, y, recs, exact) -> PublicScheme:
    S = inst.num_states
    keep = []
    for k, mass in enumerate(y):
        total = sum(mass)
        if (total > 0) if exact else (float(total) >= SIGNAL_DROP):
            keep.append(k)
    emissions = []
    for k in keep:
        em = []
        for t in range(S):
            mu = inst.prior[t]
            if not mu:
                em.append(type(mu)(1) if k == keep[0] else type(mu)(0))
                continue
            col = sum(y[j][t] for j in keep)
            em.append(y[k][t] / col if col else 0)
        emissions.append(tuple(em if exact else (max(float(v), 0.0) for v in em)))
    return scheme_from_emissions(inst, emissions, [recs[k] for k in keep])


def public_value_chain(inst: Instance) -> dict:
    """Optimistic values of the optimal, full-information and
    no-information public schemes."""
    _, value = solve_optimal_public(inst)
    return {
        "public": value,
        "full_info": float(evaluate_public_scheme(inst, full_info_scheme(inst), "best")),
        "no_info": float(evaluate_public_scheme(inst, no_info_scheme(inst), "best")),
    }
