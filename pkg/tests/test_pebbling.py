import random

import pytest

from localsearch_cc.graphs import ReplicationGraph
from localsearch_cc.pebbling import (
    PebbInstance,
    PromiseViolation,
    format_pebb,
    parse_pebb,
    pebb_check,
    pebb_solve_bruteforce,
    pebb_to_vetols,
    random_pebb,
    topological_number,
)


def test_topological_number_decreases_along_edges():
    M = 3
    G = ReplicationGraph(M)
    nums = {topological_number(v, M) for v in G.vertices()}
    assert nums == set(range(1, 3 * M ** 6 + 1))
    inst = random_pebb(M, 0)
    for v in inst.dag.vertices():
        for u in inst.dag.successors(v):
            if u[0] == 0:
                continue
            for i in range(3):
                for j in range(3):
                    assert topological_number(v + (i,), M) > topological_number(u + (j,), M)


def test_promise_enforced():
    inst = random_pebb(3, 1)
    src = next(v for v in inst.dag.vertices() if v[0] == 0)
    inst.alice_bits[(src, inst.bob_index[src])] = 0
    with pytest.raises(PromiseViolation) as err:
        pebb_to_vetols(inst)
    assert err.value.vertex == src and err.value.kind == "source"


def test_solutions_exist_and_check():
    for seed in range(5):
        inst = random_pebb(3, seed, p_true=0.8)
        sols = pebb_solve_bruteforce(inst)
        assert sols
        for v in sols:
            assert pebb_check(inst, v)


def test_valid_set_and_values():
    inst = random_pebb(3, 2)
    veto = pebb_to_vetols(inst)
    v = next(iter(inst.dag.vertices()))
    I = inst.bob_index[v]
    assert veto.valid(v + (I,)) and not veto.valid(v + ((I + 1) % 3,))
    assert veto.W == 9 * 3 ** 6
    assert all(1 <= veto.f(x) <= veto.W for x in list(veto.graph.vertices())[:200])


def test_format_roundtrip():
    inst = random_pebb(3, 4)
    back = parse_pebb(format_pebb(inst))
    assert back.alice_bits == inst.alice_bits and back.bob_index == inst.bob_index
    with pytest.raises(ValueError):
        parse_pebb("b 0:0:0:0 0 1\n")
