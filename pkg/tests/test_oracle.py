import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _instances import A, B, GOAL, START, U, fig1_graph, fig1_scheme, random_trivial
from aggmos.aggregation import solution_cost, trivial_scheme
from aggmos.core import ContractError, MOGraph, ParetoFrontier, pareto_filter
from aggmos.oracle import (
    EnumerationBudget,
    EnumerationIncomplete,
    brute_force_pof,
    enumerate_simple_paths,
    verify_eps_cover,
)


def _complete(n):
    return MOGraph(n, 1, [(u, v, (1.0,)) for u in range(n) for v in range(n) if u != v])


def test_chain():
    g = MOGraph(3, 1, [(0, 1, (1,)), (1, 2, (1,))])
    assert enumerate_simple_paths(g, 0, 2) == [(0, 1, 2)]


def test_diamond():
    g = MOGraph(4, 1, [(0, 1, (1,)), (0, 2, (1,)), (1, 3, (1,)), (2, 3, (1,))])
    assert enumerate_simple_paths(g, 0, 3) == [(0, 1, 3), (0, 2, 3)]


def test_k4_has_five_paths():
    paths = enumerate_simple_paths(_complete(4), 0, 3)
    assert len(paths) == 5
    assert paths == [(0, 1, 2, 3), (0, 1, 3), (0, 2, 1, 3), (0, 2, 3), (0, 3)]


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_complete_graph_count(n):
    # Choose and order any subset of the n - 2 inner vertices.
    inner = n - 2
    expected = sum(len(list(itertools.permutations(range(inner), k))) for k in range(inner + 1))
    assert len(enumerate_simple_paths(_complete(n), 0, n - 1)) == expected


def test_budget_overflow_is_explicit():
    with pytest.raises(EnumerationIncomplete):
        enumerate_simple_paths(_complete(6), 0, 5, EnumerationBudget(max_paths=10))
    with pytest.raises(EnumerationIncomplete):
        enumerate_simple_paths(_complete(5), 0, 4, EnumerationBudget(max_path_length=3))
    # A length limit that every path respects is fine.
    assert len(enumerate_simple_paths(_complete(4), 0, 3, EnumerationBudget(max_path_length=4))) == 5
    with pytest.raises(ContractError):
        EnumerationBudget(max_paths=0)


def test_dead_end_region_is_not_walked():
    # Start 0 joins the goal 13 directly and a 12-clique that never leads there.
    # Walking every simple prefix of the clique would take billions of steps.
    clique = range(1, 13)
    edges = [(u, v, (1.0,)) for u in clique for v in clique if u != v]
    edges += [(0, 1, (1.0,)), (1, 0, (1.0,)), (0, 13, (5.0,))]
    g = MOGraph(14, 1, edges)
    assert enumerate_simple_paths(g, 0, 13) == [(0, 13)]
    assert enumerate_simple_paths(g, 0, 13, EnumerationBudget(max_paths=1)) == [(0, 13)]


def test_no_path_and_trivial_path():
    g = MOGraph(3, 1, [(0, 1, (1,))])
    assert enumerate_simple_paths(g, 0, 2) == []
    assert enumerate_simple_paths(g, 1, 1) == [(1,)]
    assert len(brute_force_pof(g, 0, 2, trivial_scheme(1))) == 0


def test_single_path_pof():
    g = MOGraph(3, 2, [(0, 1, (1, 2)), (1, 2, (3, 4))])
    front = brute_force_pof(g, 0, 2, trivial_scheme(2))
    assert list(front) == [((4.0, 6.0), (0, 1, 2))]


def test_fig1_pof():
    front = brute_force_pof(fig1_graph(), START, GOAL, fig1_scheme())
    assert dict(front.entries) == {(0.0, 5.0): (START, GOAL), (0.9, 3.0): (START, A, U, GOAL)}
    assert (START, B, U, GOAL) not in {p for _, p in front}


def test_verify_eps_cover_examples():
    exact = [(1.0, 1.0)]
    assert verify_eps_cover(exact, exact, (0.0, 0.0))
    assert verify_eps_cover(exact, [(1.05, 1.0)], (0.1, 0.0))
    assert not verify_eps_cover(exact, [(1.2, 1.0)], (0.1, 0.0))
    assert verify_eps_cover([], [], (0.1, 0.1))
    assert not verify_eps_cover(exact, [], (0.1, 0.1))
    front = ParetoFrontier([((1.0, 1.0), (0,))])
    assert verify_eps_cover(front, front, (0.0, 0.0))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_pof_is_insensitive_to_enumeration_order(seed):
    g, s, a, b = random_trivial(seed, n=7)
    paths = enumerate_simple_paths(g, a, b)
    rng = random.Random(seed)
    shuffled = paths[:]
    rng.shuffle(shuffled)
    again = pareto_filter((solution_cost(p, g, s), p) for p in shuffled)
    assert again.cost_set() == brute_force_pof(g, a, b, s).cost_set()


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_enumerated_paths_are_simple_and_unique(seed):
    g, _, a, b = random_trivial(seed, n=7)
    paths = enumerate_simple_paths(g, a, b)
    assert len(set(paths)) == len(paths)
    for p in paths:
        assert len(set(p)) == len(p) and p[0] == a and p[-1] == b
        g.check_path(p)
