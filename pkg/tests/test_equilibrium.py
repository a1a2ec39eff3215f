from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from oracles import best_ne_cost, ne_profiles, worst_ne_cost
from strategies import instances, posteriors
from scg_signal import (
    best_nash,
    best_response_dynamics,
    config_of_profile,
    enumerate_configurations,
    expected_cost_functions,
    find_obeying_assignment,
    gen_table1,
    is_pure_ne,
    make_instance,
    potential,
    signature_of,
    worst_nash,
)
from scg_signal.equilibrium import LE, GT, Signature, best_response_path, potential_minimizer
from scg_signal.errors import InvalidAction


@pytest.fixture
def d():
    return gen_table1()


@pytest.fixture
def t1():
    return make_instance(2, [[(1, 2), (1, 2)]], [1])


def test_signature_examples(d):
    sig = signature_of(expected_cost_functions(d, (F(3, 5), F(2, 5))), (2, 1))
    assert sig.label(0, 1) is LE and sig.label(1, 0) is LE
    sig = signature_of(expected_cost_functions(d, (0, 1)), (2, 1))
    assert sig.label(1, 0) is GT


def test_signature_all_le_for_identical_resources(t1):
    assert all(signature_of(t1.costs[0], (1, 1)).labels)


def test_signature_label_count_checked():
    with pytest.raises(ValueError):
        Signature((1, 1), (True,))


def test_full_resource_convention():
    # the empty resource's label into the full one is GT; nothing queries C(N+1)
    sig = signature_of(((1, 1), (5, 5)), (2, 0))
    assert sig.label(1, 0) is GT and sig.label(0, 1) is LE


def test_find_obeying_assignment_examples(d, t1):
    a = find_obeying_assignment(t1, signature_of(t1.costs[0], (1, 1)))
    assert sorted(a) == [0, 1]
    forced = make_instance(2, [[(1, 2), (1, 2)]], [1], action_sets=[(0,), (0,)])
    assert find_obeying_assignment(forced, Signature((1, 1), (True, True))) is None
    a = find_obeying_assignment(d, signature_of(d.costs[0], (2, 1)))
    assert config_of_profile(d, a) == (2, 1)


def test_is_pure_ne_examples(d, t1):
    assert is_pure_ne(d.costs[0], (0, 0, 1), d.action_sets)
    assert not is_pure_ne(d.costs[1], (0, 0, 1), d.action_sets)
    assert not is_pure_ne(t1.costs[0], (0, 0), t1.action_sets)
    with pytest.raises(InvalidAction):
        is_pure_ne(t1.costs[0], (0, 5), t1.action_sets)


@pytest.mark.parametrize("p, cost, config", [
    ((1, 0), 11, (2, 1)),
    ((0, 1), 12, (3, 0)),
    ((F(3, 5), F(2, 5)), F(47, 5), (2, 1)),
    ((F(2, 5), F(3, 5)), F(96, 5), (3, 0)),
])
def test_best_nash_table1(d, p, cost, config):
    res = best_nash(d, expected_cost_functions(d, p))
    assert res.cost == cost and res.config == config


def test_table1_not_convex_nor_concave(d):
    v = {p: best_nash(d, expected_cost_functions(d, p)).cost
         for p in [(1, 0), (0, 1), (F(3, 5), F(2, 5)), (F(2, 5), F(3, 5))]}
    # (0.6,0.4) = 0.6*(1,0) + 0.4*(0,1): value below the chord
    assert v[F(3, 5), F(2, 5)] < F(3, 5) * v[1, 0] + F(2, 5) * v[0, 1]
    # (0.4,0.6) = 0.4*(1,0) + 0.6*(0,1): value above the chord
    assert v[F(2, 5), F(3, 5)] > F(2, 5) * v[1, 0] + F(3, 5) * v[0, 1]


def test_best_response_dynamics_examples(d, t1):
    assert best_response_dynamics(t1, t1.costs[0], (0, 1)) == (0, 1)
    end = best_response_dynamics(t1, t1.costs[0], (0, 0))
    assert config_of_profile(t1, end) == (1, 1)
    end = best_response_dynamics(d, d.costs[0], (1, 1, 1))
    assert is_pure_ne(d.costs[0], end, d.action_sets)
    n = config_of_profile(d, end)
    assert sum(k * d.costs[0][r][k - 1] for r, k in enumerate(n) if k) == 11


@given(instances(), st.data())
def test_signature_matching_equals_bruteforce(inst, data):
    C = expected_cost_functions(inst, data.draw(posteriors(inst.num_states)))
    brute = {config_of_profile(inst, a) for a in ne_profiles(inst, C)}
    for n in enumerate_configurations(inst):
        a = find_obeying_assignment(inst, signature_of(C, n))
        assert (a is not None) == (n in brute)
        if a is not None:
            assert config_of_profile(inst, a) == n and is_pure_ne(C, a, inst.action_sets)


@given(instances(), st.data())
def test_best_and_worst_nash_against_bruteforce(inst, data):
    C = expected_cost_functions(inst, data.draw(posteriors(inst.num_states)))
    best, worst = best_nash(inst, C), worst_nash(inst, C)
    assert best.cost == best_ne_cost(inst, C) and worst.cost == worst_ne_cost(inst, C)
    assert best.cost <= worst.cost
    assert is_pure_ne(C, best.assignment, inst.action_sets)
    assert is_pure_ne(C, worst.assignment, inst.action_sets)


@given(instances(), st.data())
def test_potential_minimizer_is_equilibrium(inst, data):
    C = expected_cost_functions(inst, data.draw(posteriors(inst.num_states)))
    n = potential_minimizer(inst, C)
    a = find_obeying_assignment(inst, signature_of(C, n))
    assert a is not None and is_pure_ne(C, a, inst.action_sets)


@given(instances(), st.data())
def test_best_response_potential_strictly_decreases(inst, data):
    C = expected_cost_functions(inst, data.draw(posteriors(inst.num_states)))
    start = tuple(data.draw(st.sampled_from(sorted(acts))) for acts in inst.action_sets)
    path = best_response_path(inst, C, start)
    pots = [potential(C, config_of_profile(inst, a)) for a in path]
    assert all(a > b for a, b in zip(pots, pots[1:]))
    assert is_pure_ne(C, path[-1], inst.action_sets)


@given(instances(asymmetric=False))
def test_all_equal_costs_give_all_le(inst):
    flat = tuple(tuple(1 for _ in range(inst.num_agents)) for _ in range(inst.num_resources))
    for n in enumerate_configurations(inst):
        sig = signature_of(flat, n)
        occupied = [r for r in range(len(n)) if n[r]]
        assert all(sig.label(r, s) for r in occupied for s in range(len(n)) if s != r)
