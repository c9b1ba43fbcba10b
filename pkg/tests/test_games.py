import random
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from localsearch_cc import games as Gm
from localsearch_cc.graphs import GraphError, Hypercube, complete_graph, cycle_graph
from localsearch_cc.search import SumLSInstance, local_maxima_bruteforce, random_sumls


def test_matching_pennies_cycle_sum():
    v = Gm.ms_cycle_check_2p(Gm.matching_pennies(), method="all")
    assert not v.exact and v.value == -8 and v.witness == (0, 1, 0, 1)
    assert Gm.better_reply_cycle(Gm.matching_pennies()) is not None


def test_prisoners_dilemma_exact_with_synthesized_potential():
    g = Gm.prisoners_dilemma()
    v = Gm.ms_cycle_check_2p(g)
    assert v.exact and v.equations == 1
    rep = Gm.potential_identity_check(g, potential=v.potential)
    assert rep.ok
    assert Gm.nash_set(g) == {(1, 1)}
    assert Gm.better_reply_cycle(g) is None


@settings(max_examples=60)
@given(st.integers(min_value=2, max_value=5), st.integers(min_value=2, max_value=5),
       st.integers(min_value=0, max_value=10 ** 6), st.booleans())
def test_pivot_and_full_enumeration_agree(N, K, seed, plant):
    rng = random.Random(seed)
    g = Gm.random_exact_game_2p(N, rng, W=5, K=K)
    if plant:
        g = Gm.plant_violation(g, rng)
    a = Gm.ms_cycle_check_2p(g, method="all")
    b = Gm.ms_cycle_check_2p(g)
    assert a.exact == b.exact == (not plant)
    if not b.exact:
        assert Gm.cycle_sum_2p(g.tables[0], g.tables[1], *b.witness) == b.value != 0
    else:
        assert Gm.potential_identity_check(g, potential=b.potential).ok


def test_sampled_cycle_check_is_tagged():
    v = Gm.ms_cycle_check_2p(Gm.prisoners_dilemma(), cap=1)
    assert v.exact and v.mode == "probabilistic"


def test_identity_check_finds_counterexample():
    g = Gm.matching_pennies()
    rep = Gm.potential_identity_check(g, potential=lambda p: 0)
    assert not rep.ok
    i, p, x = rep.counterexample
    assert g.utility(i, p) != g.utility(i, p[:i] + (x,) + p[i + 1:])


def test_np_cycle_check():
    t = np.random.default_rng(0).integers(0, 5, size=(2, 2, 2))
    ident = Gm.Game.from_tables([t, t, t], potential=t)
    assert Gm.ms_cycle_check_np(ident).exact
    g = Gm.build_ordinal_gadget_np(lambda a: 2, lambda a: 2, 1)
    v = Gm.ms_cycle_check_np(g)
    assert not v.exact
    a, b, up, down = v.witness
    assert Gm.closed_path_sum(g, a, b, up, down) == v.value


def test_nash_check_lexicographic_witness():
    g = Gm.prisoners_dilemma()
    assert Gm.nash_check(g, (0, 0)) == (False, (0, 1))


def _k5(W=2, seed=0):
    return random_sumls(complete_graph(5), W, random.Random(seed))


def test_game2p_requires_degree_four():
    inst = random_sumls(cycle_graph(5), 3, random.Random(0))
    with pytest.raises(GraphError):
        Gm.build_game_2p(inst)
    g = Gm.build_game_2p(inst, allow_lower_degree=True)
    assert g.actions[0] == 5 * 3 ** 5


def test_game2p_encode_decode_and_truth():
    g = Gm.build_game_2p(_k5())
    for code in (0, 17, g.actions[0] - 1):
        r, x = g.decode(code)
        assert g.encode(r, x) == code
    a, b = g.truthful_profile(2)
    assert g.decode(a) == (2, g.truth[2])


def test_game2p_best_response_matches_enumeration():
    g = Gm.build_game_2p(_k5(seed=3))
    rng = random.Random(1)
    for _ in range(30):
        p = (rng.randrange(g.actions[0]), rng.randrange(g.actions[1]))
        for i in (0, 1):
            best = max(g.utility(i, p[:i] + (x,) + p[i + 1:]) for x in range(g.actions[i]))
            assert g.best_response(i, p)[0] == best


def test_game2p_dense_block_matches_scalar():
    inst = SumLSInstance(complete_graph(5), [1, 2, 3, 4, 5].__getitem__,
                         [5, 3, 1, 4, 2].__getitem__, 5)
    g = Gm.build_game_2p(inst)
    rng = random.Random(2)
    lo = rng.randrange(g.actions[0] - 64)
    UA, UB, PHI = g.dense_block(lo, lo + 64)
    for _ in range(300):
        a, c = rng.randrange(g.actions[0]), rng.randrange(64)
        p = (a, lo + c)
        assert UA[a, c] == g.utility(0, p) and UB[a, c] == g.utility(1, p)
        assert PHI[a, c] == g.potential(p)


def test_priority_margins():
    for n in (2, 3, 4):
        for W in (2, 4, 8):
            assert min(Gm.priority_margins(n, W)) > 0, (n, W)
    assert Gm.priority_margins(5, 4)[3] < 0


def test_binary_game_layout_roundtrip():
    inst = random_sumls(Hypercube(3), 3, random.Random(0), distinct=True, lo=0)
    g = Gm.build_game_np(inst, 4)
    assert g.b == 2 and g.m == 7 and g.side == 38
    p = g.truthful_profile(5, 4, order_seed=9)
    v, xv, xf, w, yw, yf = g.decode(p)
    assert (v, w) == (5, 4) and sorted(xv) == list(g.ball2[5])
    assert g.encode(v, xv, xf, w, yw, yf) == p
    for player in (0, 3, 10, 40, 75):
        side, part, slot, bit = g.group_of(player)
        assert g.player_index(side, part, slot, bit) == player


def test_binary_game_list_distance():
    inst = random_sumls(Hypercube(3), 3, random.Random(0), lo=0)
    g = Gm.build_game_np(inst, 4)
    exact = g.ball2[0]
    assert g.list_distance(0, exact, 2) == 0 and g.list_distance(0, exact, 1) == 0
    moved = (exact[0] ^ 0b111,) + exact[1:]
    assert g.list_distance(0, moved, 2) >= 1


def test_binary_game_needs_hypercube_and_range():
    with pytest.raises(GraphError):
        Gm.build_game_np(random_sumls(complete_graph(4), 3, random.Random(0)))
    with pytest.raises(ValueError):
        Gm.build_game_np(random_sumls(Hypercube(3), 9, random.Random(0)), 4)


def test_binary_game_ties_break_correspondence():
    """Adjacent equal sums make a truthful non-maximal pair stable."""
    fa = [1, 1, 3, 0, 0, 0, 0, 0]
    fb = [0] * 8
    inst = SumLSInstance(Hypercube(3), fa.__getitem__, fb.__getitem__, 4)
    g = Gm.build_game_np(inst, 4)
    assert 0 not in local_maxima_bruteforce(inst)
    assert Gm.nash_check(g, g.truthful_profile(0, 1))[0]


def test_binary_game_constants_fail_at_n5():
    """At n = 5 a truthful pair one step below a better vertex is an equilibrium."""
    fa = [0] * 32
    fa[0], fa[1] = 1, 2
    inst = SumLSInstance(Hypercube(5), fa.__getitem__, ([0] * 32).__getitem__, 4)
    g = Gm.build_game_np(inst, 4)
    p = g.truthful_profile(0, 1)
    assert 0 not in local_maxima_bruteforce(inst)
    assert Gm.nash_check(g, p)[0]
    i, level = g.designated_deviation(p)
    assert level == 4 and g.potential(g.flip(p, i)) < g.potential(p)


def test_gadget_np_parameters_checked():
    with pytest.raises(ValueError):
        Gm.build_ordinal_gadget_np(lambda a: 1, lambda a: 2, 1)
    with pytest.raises(ValueError):
        Gm.build_ordinal_gadget_2p([[1]], [[2]])


def test_better_reply_cycle_is_a_cycle():
    g = Gm.build_ordinal_gadget_2p([[0, 2], [0, 0]], [[0, 2], [2, 0]])
    cyc = Gm.better_reply_cycle(g)
    assert cyc is not None
    for p, q in zip(cyc, cyc[1:] + cyc[:1]):
        diff = [i for i in range(2) if p[i] != q[i]]
        assert len(diff) == 1
        i = diff[0]
        assert g.utility(i, q) > g.utility(i, p)


def test_batch_cycle_detector_matches_dfs():
    rng = np.random.default_rng(5)
    UA = rng.integers(0, 4, size=(200, 3, 3))
    UB = rng.integers(0, 4, size=(200, 3, 3))
    got = Gm.has_better_reply_cycle_2p_batch(UA, UB)
    for t in range(200):
        g = Gm.Game.from_tables([UA[t], UB[t]])
        assert bool(got[t]) == (Gm.better_reply_cycle(g) is not None)
