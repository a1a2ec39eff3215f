"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also repeated in the terminal summary.
"""
import itertools
import math
import time
from fractions import Fraction as F

import numpy as np
import pytest

from scg_signal import (
    PrivateSampler,
    best_nash,
    best_response_dynamics,
    check_obedience,
    coloring_scheme,
    config_of_profile,
    cycle_graph,
    enumerate_configurations,
    evaluate_public_scheme,
    expected_cost_functions,
    explicit_from_reduced,
    figure1_private_scheme,
    find_obeying_assignment,
    full_info_scheme,
    gen_figure1,
    gen_hardness,
    gen_random,
    gen_table1,
    induced_reduced_form,
    is_pure_ne,
    no_info_scheme,
    potential,
    signature_of,
    solve_bce_exponential,
    solve_optimal_private,
    solve_optimal_public,
)
from scg_signal.equilibrium import allowable_sets, best_response_path, brute_force_nash_profiles, potential_minimizer
from scg_signal.private import ExplicitScheme, max_cell_difference, scheme_cost
from scg_signal.public import solve_public_by_profiles

RESULTS = []
CHAIN_TOL = 1e-7


def verdict(k, ok, detail):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def private_suite():
    """(seed, N, R, S) for criterion 2: N <= 4, R <= 3, |Theta| <= 2."""
    rng = np.random.default_rng(2024)
    return [(seed, int(rng.integers(2, 5)), int(rng.integers(2, 4)), int(rng.integers(1, 3)))
            for seed in range(50)]


def public_suite():
    """(seed, N, R, S) for criterion 3 with R^N <= 256."""
    rng = np.random.default_rng(77)
    out = []
    for seed in range(100, 124):
        R = int(rng.integers(2, 4))
        N = int(rng.integers(2, 6 if R == 2 else 5))
        out.append((seed, N, R, int(rng.integers(1, 4))))
    return out


def suite_instances():
    """Every instance generated by the suite, for the value chain."""
    insts = [gen_random(N, R, S, seed, asymmetric=bool(seed % 2)) for seed, N, R, S in private_suite()]
    insts += [gen_random(N, R, S, seed) for seed, N, R, S in public_suite()]
    insts += [gen_table1(), gen_table1((F(3, 5), F(2, 5))), gen_figure1(),
              gen_hardness(cycle_graph(4), 2, 1, 0)]
    return insts


def test_criterion_1_table1():
    start = time.perf_counter()
    d = gen_table1()
    expect = {(1, 0): 11, (0, 1): 12, (F(3, 5), F(2, 5)): F(47, 5), (F(2, 5), F(3, 5)): F(96, 5)}
    got = {p: best_nash(d, expected_cost_functions(d, p)).cost for p in expect}
    elapsed = time.perf_counter() - start
    ok = all(type(got[p]) in (int, F) and got[p] == v for p, v in expect.items()) and elapsed < 1
    verdict(1, ok, f"values {[str(got[p]) for p in expect]}, {elapsed:.3f}s")


def test_criterion_2_private_oracle():
    start = time.perf_counter()
    worst = 0.0
    for seed, N, R, S in private_suite():
        inst = gen_random(N, R, S, seed, asymmetric=bool(seed % 2))
        _, lp = solve_optimal_private(inst)
        _, bce = solve_bce_exponential(inst)
        worst = max(worst, abs(float(lp) - float(bce)))
    elapsed = time.perf_counter() - start
    verdict(2, worst <= 1e-6 and elapsed < 300,
            f"50 instances, max gap {worst:.2e}, {elapsed:.1f}s")


def test_criterion_3_public_oracle():
    start = time.perf_counter()
    gap_oracle = gap_eval = 0.0
    for seed, N, R, S in public_suite():
        inst = gen_random(N, R, S, seed)
        assert R ** N <= 256
        scheme, value = solve_optimal_public(inst)
        _, oracle = solve_public_by_profiles(inst)
        gap_oracle = max(gap_oracle, abs(float(value) - float(oracle)))
        gap_eval = max(gap_eval, abs(float(value) - float(evaluate_public_scheme(inst, scheme, "best"))))
    elapsed = time.perf_counter() - start
    ok = gap_oracle <= 1e-6 and gap_eval <= 1e-7 and elapsed < 300
    verdict(3, ok, f"{len(public_suite())} instances, oracle gap {gap_oracle:.2e}, "
                   f"evaluation gap {gap_eval:.2e}, {elapsed:.1f}s")


def sampler_fixtures(count=10):
    """Solver reduced forms that genuinely mix: the first seeds whose optimum
    has at least four fractional cells.  Most random optima are 0/1 and would
    not exercise the decomposition."""
    out = []
    for seed in itertools.count(500):
        inst = gen_random(4, 3, 2, seed, asymmetric=bool(seed % 2))
        x, _ = solve_optimal_private(inst)
        if sum(1 for _, v in x.items() if 1e-6 < float(v) < 1 - 1e-6) >= 4:
            out.append((inst, x))
        if len(out) == count:
            return out


def test_criterion_4_sampler():
    draws = 100_000
    recon = 0.0
    rounds_ok = marg_ok = True
    cells = 0
    for inst, x in sampler_fixtures():
        explicit = explicit_from_reduced(inst, x)
        recon = max(recon, max_cell_difference(induced_reduced_form(inst, explicit), x))
        N, R = inst.num_agents, inst.num_resources
        sampler = PrivateSampler(inst, x)
        rng = np.random.default_rng(inst.num_states + len(x))
        for t in range(inst.num_states):
            for k in range(len(sampler.branches(t))):
                rounds_ok &= sampler.decomposition(t, k).rounds <= N * R + N + R
            profiles = sampler.sample_many(t, rng, draws)
            configs = np.stack([np.bincount(row, minlength=R) for row in profiles])
            for n in sampler.x.configurations(t):
                in_n = np.all(configs == np.array(n), axis=1)
                for i in range(N):
                    for r in range(R):
                        p = float(sampler.x[t, n, i, r])
                        freq = np.count_nonzero(in_n & (profiles[:, i] == r)) / draws
                        sigma = math.sqrt(p * (1 - p) / draws)
                        cells += 1
                        if abs(freq - p) > 3 * sigma + 1e-9:
                            marg_ok = False
    verdict(4, recon <= 1e-7 and rounds_ok and marg_ok,
            f"reconstruction {recon:.2e}, rounds bounded {rounds_ok}, "
            f"{cells} cells within 3 sigma {marg_ok}")


def test_criterion_5_value_chain():
    bad = []
    insts = suite_instances()
    for inst in insts:
        _, priv = solve_optimal_private(inst)
        _, pub = solve_optimal_public(inst)
        full = evaluate_public_scheme(inst, full_info_scheme(inst), "best")
        none = evaluate_public_scheme(inst, no_info_scheme(inst), "best")
        bound = min(float(full), float(none))
        if not (float(priv) <= float(pub) + CHAIN_TOL and float(pub) <= bound + CHAIN_TOL):
            bad.append(inst.name)
    verdict(5, not bad, f"{len(insts)} instances, violations {bad}")


def test_criterion_6_figure1():
    start = time.perf_counter()
    inst = gen_figure1(5, F(1, 100), 2)
    full = evaluate_public_scheme(inst, full_info_scheme(inst), "best")
    scheme = ExplicitScheme(figure1_private_scheme(inst))
    obedient = not check_obedience(inst, scheme)
    cost = scheme_cost(inst, scheme)
    _, priv = solve_optimal_private(inst)
    elapsed = time.perf_counter() - start
    ok = full == 5 and obedient and cost == F(101, 100) and float(priv) <= 1.01 + 1e-9 and elapsed < 30
    verdict(6, ok, f"full-info {full}, scheme obedient {obedient} cost {cost}, "
                   f"private {float(priv):.6f}, {elapsed:.2f}s")


def test_criterion_7_coloring():
    start = time.perf_counter()
    graph = cycle_graph(4)
    inst = gen_hardness(graph, 2, 1, 0)
    scheme = coloring_scheme(inst, graph, [1, 2, 1, 2])
    value = evaluate_public_scheme(inst, scheme, "best")
    _, opt = solve_optimal_public(inst)
    elapsed = time.perf_counter() - start
    ok = inst.num_agents == 2 and value == 1 and float(opt) <= 1 + 1e-9 and elapsed < 30
    verdict(7, ok, f"coloring scheme {value}, public optimum {float(opt):.6f}, {elapsed:.2f}s")


def _signature_ne_profiles(inst, costs):
    out = set()
    for n in enumerate_configurations(inst):
        allowed = allowable_sets(inst, signature_of(costs, n))
        if find_obeying_assignment(inst, signature_of(costs, n)) is None:
            continue
        out.update(a for a in itertools.product(*allowed) if config_of_profile(inst, a) == tuple(n))
    return out


def test_criterion_8_equilibrium_invariants():
    failures = []
    rng = np.random.default_rng(8)
    for seed in range(100):
        N, R = int(rng.integers(2, 6)), int(rng.integers(2, 5))
        while R ** N > 1024:
            N -= 1
        inst = gen_random(N, R, 1, 800 + seed, asymmetric=bool(seed % 2))
        costs = inst.costs[0]
        n_star = potential_minimizer(inst, costs)
        a_star = find_obeying_assignment(inst, signature_of(costs, n_star))
        if a_star is None or not is_pure_ne(costs, a_star, inst.action_sets):
            failures.append((seed, "potential minimizer"))
        start = tuple(sorted(acts)[0] for acts in inst.action_sets)
        path = best_response_path(inst, costs, start)
        phis = [potential(costs, config_of_profile(inst, a)) for a in path]
        end = best_response_dynamics(inst, costs, start)
        if any(b >= a for a, b in zip(phis, phis[1:])) or not is_pure_ne(costs, end, inst.action_sets):
            failures.append((seed, "best response"))
        if set(brute_force_nash_profiles(inst, costs)) != _signature_ne_profiles(inst, costs):
            failures.append((seed, "NE set"))
    verdict(8, not failures, f"100 instances, failures {failures}")


def test_criterion_9_scale():
    t0 = time.perf_counter()
    solve_optimal_public(gen_random(20, 3, 5, 9))
    t_pub = time.perf_counter() - t0
    t0 = time.perf_counter()
    solve_optimal_private(gen_random(10, 3, 3, 9))
    t_priv = time.perf_counter() - t0
    verdict(9, t_pub < 60 and t_priv < 60, f"public {t_pub:.2f}s, private {t_priv:.2f}s")


@pytest.fixture(scope="module", autouse=True)
def _summary(request):
    yield
    request.config._acceptance_lines = list(RESULTS)
