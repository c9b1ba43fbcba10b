import random

import pytest

from localsearch_cc.graphs import Hypercube, complete_graph, path_graph
from localsearch_cc.search import QueryInstance, is_local_max, random_vetols
from localsearch_cc.solvers import (aldous_search, check_result, default_samples,
                                    random_query_instance, random_vertex, steepest_ascent)


def test_start_at_local_max_costs_closed_neighbourhood():
    g = Hypercube(4)
    inst = QueryInstance(g, lambda v: 5 if v == 0 else 1)
    res = steepest_ascent(inst, 0)
    assert res.vertex == 0 and res.steps == 0 and res.queries == 1 + 4
    assert inst.queries == 5


def test_path_climb():
    inst = QueryInstance(path_graph(3), [1, 2, 3].__getitem__)
    res = steepest_ascent(inst, 0)
    assert (res.vertex, res.value, res.steps) == (2, 3, 2)
    assert res.queries == 1 + 1 + 2 + 1


def test_popcount_climb_takes_n_steps():
    n = 8
    inst = QueryInstance(Hypercube(n), lambda v: bin(v).count("1"))
    res = steepest_ascent(inst, 0)
    assert res.vertex == 2 ** n - 1 and res.steps == n
    assert res.queries == 1 + n * (n + 1)


def test_cache_avoids_requery():
    inst = QueryInstance(path_graph(3), [1, 2, 3].__getitem__)
    assert steepest_ascent(inst, 0, cache=True).queries == 3


def test_aldous_full_sampling_and_single_sample():
    g = complete_graph(6)
    inst = random_query_instance(g, random.Random(0))
    res = aldous_search(inst, t=g.num_vertices(), seed=1)
    assert check_result(inst, res)
    one = aldous_search(inst, t=1, seed=2)
    assert check_result(inst, one) and one.queries >= 1 + 5
    with pytest.raises(ValueError):
        aldous_search(inst, t=0)


def test_aldous_on_vetols_respects_validity():
    rng = random.Random(3)
    inst = random_vetols(Hypercube(6), 64, rng, p_valid=0.7)
    res = aldous_search(inst, seed=4)
    assert inst.valid(res.vertex) and is_local_max(inst, res.vertex)


def test_default_samples_and_random_vertex():
    g = Hypercube(6)
    assert default_samples(g) == 20
    rng = random.Random(0)
    assert all(0 <= random_vertex(g, rng) < 64 for _ in range(100))
