from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from oracles import best_ne_cost, grid_min_sc, is_ne, mixed_costs, simplex_grid
from strategies import instances
from scg_signal import (
    best_nash,
    best_weighted_posterior,
    coloring_scheme,
    cycle_graph,
    enumerate_configurations,
    evaluate_public_scheme,
    expected_cost_functions,
    full_info_scheme,
    gen_figure1,
    gen_hardness,
    gen_random,
    gen_table1,
    is_pure_ne,
    make_instance,
    no_info_scheme,
    per_profile_lp,
    per_signature_lp,
    signature_of,
    solve_optimal_public,
)
from scg_signal.equilibrium import Signature
from scg_signal.errors import InvalidScheme, SizeGuard
from scg_signal.public import (
    Signal,
    PublicScheme,
    best_weighted_posterior_by_profiles,
    feasible_signatures,
    scheme_from_posteriors,
    signature_rows,
    solve_public_by_profiles,
    validate_public_scheme,
)


@pytest.fixture
def d():
    return gen_table1()


def single_state():
    return make_instance(3, [[(1, 2, 5), (2, 2, 3)]], [1])


# -- per-profile / per-signature LPs -------------------------------------------

def test_per_profile_lp_table1(d):
    post, obj = per_profile_lp(d, (0, 0), (0, 0, 1), backend="exact")
    assert obj <= F(47, 5)
    # p = (0.6, 0.4) is inside the region, so the optimum cannot exceed 9.4
    C = expected_cost_functions(d, (F(3, 5), F(2, 5)))
    assert best_ne_cost(d, C) == F(47, 5)
    # the optimum equals a fine grid search over the region
    grid = min(
        2 * C2[0][1] + C2[1][0]
        for p in simplex_grid(2, 1000)
        for C2 in [mixed_costs(d, p)]
        if C2[0][1] <= C2[1][1] and C2[1][0] <= C2[0][2]
    )
    assert obj == grid


def test_per_profile_lp_region_excludes_point_mass(d):
    post, obj = per_profile_lp(d, (0, 0), (0, 1, 1), backend="exact")
    # with two agents on resource 2 in state 1, deviating pays 10 > 1
    assert post is None or post != (1, 0)


def test_single_state_profile_lp_is_ne_cost():
    inst = single_state()
    C = inst.costs[0]
    for a in [(0, 1, 1), (0, 0, 1)]:
        post, obj = per_profile_lp(inst, (0,), a, backend="exact")
        n = [a.count(0), a.count(1)]
        expected = sum(k * C[r][k - 1] for r, k in enumerate(n) if k)
        if is_ne(C, a, inst.action_sets, 2):
            assert obj == expected
        else:
            assert post is None and obj == float("inf")


def test_per_signature_lp_examples(d):
    post, obj = per_signature_lp(d, (0, 0), Signature((2, 1), (True, True)), backend="exact")
    assert obj <= F(47, 5)
    post, obj = per_signature_lp(d, (0, 0), Signature((3, 0), (True, False)), backend="exact")
    assert obj <= 12


def test_contradictory_signature_is_infeasible():
    # identical states; GT both ways needs c_1(1) >= c_2(2) and c_2(1) >= c_1(2),
    # i.e. 1 >= 4 and 2 >= 3
    inst = make_instance(2, [[(1, 3), (2, 4)], [(1, 3), (2, 4)]], [F(1, 2), F(1, 2)])
    sig = Signature((1, 1), (False, False))
    assert len(signature_rows(inst, sig, exact=True)) == 2
    post, obj = per_signature_lp(inst, (0, 0), sig, backend="exact")
    assert post is None and obj == float("inf")


def test_best_weighted_posterior_table1_matches_grid(d):
    post, sig, obj = best_weighted_posterior(d, (0, 0), backend="exact")
    assert obj == grid_min_sc(d, steps=1000)
    # the minimum is at p = (1/2, 1/2), below the 9.4 value at (0.6, 0.4)
    assert obj == 9 and post == (F(1, 2), F(1, 2)) and sig.config == (2, 1)


def test_best_weighted_posterior_single_state():
    inst = single_state()
    _, _, obj = best_weighted_posterior(inst, (0,), backend="exact")
    assert obj == best_nash(inst, inst.costs[0]).cost


@given(instances(max_agents=3, max_states=3), st.data())
def test_weight_shift(inst, data):
    w = data.draw(st.lists(st.integers(-5, 5), min_size=inst.num_states, max_size=inst.num_states))
    c = data.draw(st.integers(-5, 5))
    p1, s1, o1 = best_weighted_posterior(inst, w, backend="exact")
    p2, s2, o2 = best_weighted_posterior(inst, [v + c for v in w], backend="exact")
    assert (p1, s1) == (p2, s2) and o2 == o1 + c


@given(instances(max_agents=3, max_states=2), st.data())
def test_profile_and_signature_optima_agree(inst, data):
    for _ in range(3):
        w = data.draw(st.lists(st.integers(-10, 10), min_size=inst.num_states, max_size=inst.num_states))
        _, _, a = best_weighted_posterior(inst, w)
        _, _, b = best_weighted_posterior_by_profiles(inst, w)
        assert abs(a - b) <= 1e-6


def test_region_covering_on_grid():
    for seed in range(3):
        inst = gen_random(3, 3, 3, seed, asymmetric=seed == 2)
        for p in simplex_grid(3, 20):
            C = expected_cost_functions(inst, p)
            for n in enumerate_configurations(inst):
                sig = signature_of(C, n)
                for row in signature_rows(inst, sig, exact=True):
                    assert sum(pt * v for pt, v in zip(p, row)) <= 0


# -- aggregated LP -------------------------------------------------------------

def test_single_state_public(d):
    inst = single_state()
    scheme, value = solve_optimal_public(inst, backend="exact")
    assert len(scheme) == 1 and value == best_nash(inst, inst.costs[0]).cost


def test_table1_public_matches_profile_oracle(d):
    _, v = solve_optimal_public(d, backend="exact")
    _, o = solve_public_by_profiles(d, backend="exact")
    assert v == o == 9


def test_c4_public_at_most_n_minus_one():
    inst = gen_hardness(cycle_graph(4), 2, 1, 0)
    _, value = solve_optimal_public(inst)
    assert value <= 1 + 1e-9


@given(instances(max_agents=3, max_states=2))
def test_public_value_equals_evaluation_and_beats_baselines(inst):
    scheme, value = solve_optimal_public(inst)
    validate_public_scheme(inst, scheme)
    assert abs(float(evaluate_public_scheme(inst, scheme, "best")) - value) <= 1e-7
    full = evaluate_public_scheme(inst, full_info_scheme(inst), "best")
    none_ = evaluate_public_scheme(inst, no_info_scheme(inst), "best")
    assert value <= min(full, none_) + 1e-7
    for s in scheme:
        C = expected_cost_functions(inst, s.posterior)
        assert is_pure_ne(C, s.assignment, inst.action_sets)


@given(instances(max_agents=3, max_states=2))
def test_public_exact_and_float_agree(inst):
    _, a = solve_optimal_public(inst)
    _, b = solve_optimal_public(inst, backend="exact")
    assert abs(a - float(b)) <= 1e-7


@given(instances(max_agents=3, max_states=2))
def test_scheme_decomposes_prior(inst):
    scheme, _ = solve_optimal_public(inst, backend="exact")
    for t in range(inst.num_states):
        assert sum(s.probability * s.posterior[t] for s in scheme) == inst.prior[t]
        assert sum(s.emission[t] for s in scheme) == 1


def test_signature_size_guard():
    inst = make_instance(6, [[tuple(range(6))] * 4], [1], action_sets=[(0, 1, 2, 3)] * 5 + [(0, 1)])
    with pytest.raises(SizeGuard):
        feasible_signatures(inst, max_signatures=10)


# -- evaluation and baselines --------------------------------------------------

def test_full_info_table1(d):
    assert evaluate_public_scheme(d, full_info_scheme(d), "best") == F(23, 2)
    assert [s.posterior for s in full_info_scheme(d)] == [(1, 0), (0, 1)]


def test_no_info_table1():
    d = gen_table1((F(3, 5), F(2, 5)))
    scheme = no_info_scheme(d)
    assert scheme.signals[0].posterior == d.prior
    assert evaluate_public_scheme(d, scheme, "best") == F(47, 5)


def test_figure1_full_info_costs_n():
    f = gen_figure1(5, F(1, 100), 2)
    assert evaluate_public_scheme(f, full_info_scheme(f), "best") == 5


def test_coloring_scheme_value():
    g = cycle_graph(4)
    inst = gen_hardness(g, 2, 1, 0)
    scheme = coloring_scheme(inst, g, [1, 2, 1, 2])
    assert len(scheme) == 2
    assert evaluate_public_scheme(inst, scheme, "best") == 1


def test_worst_selection_not_below_best(d):
    for scheme in (full_info_scheme(d), no_info_scheme(d)):
        assert evaluate_public_scheme(d, scheme, "worst") >= evaluate_public_scheme(d, scheme, "best")


def test_invalid_scheme_rejected(d):
    bad = PublicScheme((Signal((F(1, 2), F(1, 2)), F(1, 2), (F(1, 2), F(1, 2)), (2, 1), (0, 0, 1), 0),))
    with pytest.raises(InvalidScheme):
        evaluate_public_scheme(d, bad)
    with pytest.raises(InvalidScheme):
        validate_public_scheme(d, PublicScheme(()))


def test_scheme_from_posteriors_roundtrip(d):
    scheme = scheme_from_posteriors(d, [(F(1, 2), (1, 0)), (F(1, 2), (0, 1))])
    assert evaluate_public_scheme(d, scheme) == F(23, 2)
