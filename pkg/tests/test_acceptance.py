"""Acceptance oracles: one test per criterion, at the pinned tolerances."""

import math
import random
import statistics
import time
from itertools import product

import numpy as np
import pytest

from localsearch_cc import embeddings as E
from localsearch_cc import games as Gm
from localsearch_cc import protocols as P
from localsearch_cc.graphs import (
    Grid,
    Hypercube,
    complete_graph,
    cycle_graph,
    path_graph,
    random_bounded_degree,
    random_regular,
)
from localsearch_cc.lifted import lifted_vetols
from localsearch_cc.pebbling import pebb_solve_bruteforce, pebb_to_vetols, random_pebb
from localsearch_cc.search import (
    QueryInstance,
    SumLSInstance,
    VetoLSInstance,
    distinctify,
    is_local_max,
    local_maxima_bruteforce,
    random_sumls,
    random_vetols,
    simls_build,
    veto_to_sum,
)
from localsearch_cc.solvers import aldous_search, random_query_instance


# ---------------------------------------------------------------- 1. VIED verification


def test_c1_hypercube_embedding_m4_exhaustive():
    rep = E.verify_vied(E.embed_G_hypercube(4))
    assert rep.ok, rep.as_record()
    assert rep.mode == "exhaustive"
    assert rep.vertices == 3 * 4 ** 6
    assert rep.edges == 3 * 4 ** 6 * 36 // 2


def test_c1_grid_embedding_m4_exhaustive():
    rep = E.verify_vied(E.embed_G_grid(4))
    assert rep.ok, rep.as_record()
    assert rep.mode == "exhaustive"
    assert rep.edges == 3 * 4 ** 6 * 18


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_c1_odd_embedding_exhaustive(n):
    rep = E.verify_vied(E.embed_hyp_odd(n))
    assert rep.ok, rep.as_record()
    assert rep.vertices == 2 ** n and rep.edges == n * 2 ** (n - 1)


def test_c1_grid3d_embedding_k5_and_random():
    assert E.verify_vied(E.embed_deg4_grid3d(complete_graph(5))).ok
    for seed in range(20):
        rng = random.Random(seed)
        n = rng.randint(5, 40)
        g = random_bounded_degree(n, 4, rng.randint(n, 2 * n), rng)
        assert max(g.degree(v) for v in g.vertices()) <= 4
        rep = E.verify_vied(E.embed_deg4_grid3d(g))
        assert rep.ok, (seed, rep.as_record())


# ---------------------------------------------------------------- 2. reduction exactness


def test_c2_pebb_to_vetols_bijection_m3():
    for seed in range(50):
        inst = random_pebb(3, seed)
        sols = pebb_solve_bruteforce(inst)
        maxima = local_maxima_bruteforce(pebb_to_vetols(inst))
        assert maxima == {v + (inst.bob_index[v],) for v in sols}, seed
        assert len(maxima) == len(sols)


@pytest.mark.parametrize("graph", [Grid([4, 4]), Hypercube(6)], ids=["grid4x4", "hypercube6"])
def test_c2_vetols_to_sumls_exact(graph):
    for seed in range(30):
        rng = random.Random(seed)
        inst = random_vetols(graph, 20, rng, p_valid=rng.uniform(0.2, 0.9))
        vstar = rng.choice(sorted(inst.valid_set()))
        s = veto_to_sum(inst, vstar)
        assert local_maxima_bruteforce(s) == local_maxima_bruteforce(inst), seed


def _hand_built_embeddings():
    c3 = E.explicit_embedding(
        cycle_graph(3), cycle_graph(9), {i: 3 * i for i in range(3)},
        {(i, (i + 1) % 3): [(3 * i + t) % 9 for t in range(4)] for i in range(3)}, "c3->c9")
    p3 = E.explicit_embedding(
        path_graph(3), path_graph(7), {0: 0, 1: 3, 2: 6},
        {(0, 1): [0, 1, 2, 3], (1, 2): [3, 4, 5, 6]}, "p3->p7")
    corners = {0: (0, 0), 1: (0, 2), 2: (2, 2), 3: (2, 0)}
    c4 = E.explicit_embedding(
        cycle_graph(4), Grid([3, 3]), corners,
        {(0, 1): [(0, 0), (0, 1), (0, 2)], (1, 2): [(0, 2), (1, 2), (2, 2)],
         (2, 3): [(2, 2), (2, 1), (2, 0)], (3, 0): [(2, 0), (1, 0), (0, 0)]}, "c4->grid3x3")
    return [c3, p3, c4, E.embed_hyp_odd(2)]


def test_c2_transfer_exact_on_hand_built_embeddings():
    for emb in _hand_built_embeddings():
        rep = E.verify_vied(emb)
        assert rep.ok, (emb.name, rep.as_record())
        verts = list(emb.source.vertices())
        for seed in range(20):
            rng = random.Random(seed)
            vals = rng.sample(range(1, 10 * len(verts) + 1), len(verts))
            f = dict(zip(verts, vals))
            S = {v for v in verts if rng.random() < 0.7} or {verts[0]}
            inst = VetoLSInstance(emb.source, f.__getitem__, S.__contains__, max(vals))
            out = E.transfer_vetols(emb, inst, rep)
            want = {emb.phi(v) for v in local_maxima_bruteforce(inst)}
            assert local_maxima_bruteforce(out) == want, (emb.name, seed)


# ---------------------------------------------------------------- 3. lifted pipeline


def test_c3_pipeline_k4_m2_exact():
    H = complete_graph(4)
    for seed in range(30):
        rng = random.Random(seed)
        q = QueryInstance(H, {v: rng.randint(1, 8) for v in H.vertices()}.__getitem__)
        q2 = distinctify(q)
        sim = simls_build(q2, 2, seed)
        veto = lifted_vetols(sim)
        assert veto.graph.max_degree() <= 4
        vstar = next(v for v in veto.graph.vertices() if veto.valid(v))
        s = veto_to_sum(veto, vstar)
        want = local_maxima_bruteforce(q2)
        mv = local_maxima_bruteforce(veto)
        ms = local_maxima_bruteforce(s)
        assert mv == ms, seed
        assert {x[1] for x in ms} == want, seed
        assert want <= local_maxima_bruteforce(q), seed


# ---------------------------------------------------------------- 4. games


def _k5_instance():
    g = complete_graph(5)
    fa = dict(zip(range(5), (1, 2, 3, 4, 5)))
    fb = dict(zip(range(5), (5, 3, 1, 4, 2)))
    return SumLSInstance(g, fa.__getitem__, fb.__getitem__, 5)


def _truthful_max_set(game, inst):
    return {game.truthful_profile(v) for v in local_maxima_bruteforce(inst)}


def test_c4_game2p_k5_w5_exhaustive():
    inst = _k5_instance()
    game = Gm.build_game_2p(inst)
    assert game.actions == (5 * 5 ** 5,) * 2
    ok, deviations, nash = game.dense_scan()
    assert ok
    assert deviations > 4 * 10 ** 6
    assert nash == _truthful_max_set(game, inst) == {game.truthful_profile(3)}


def _unique_argmax_k5(seed, W):
    """K5 instance with a single maximum sum (so adjacent maxima cannot tie)."""
    rng = random.Random(seed)
    while True:
        inst = random_sumls(complete_graph(5), W, rng)
        sums = [inst.value(v) for v in range(5)]
        if sums.count(max(sums)) == 1:
            return inst


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_c4_game2p_k5_w2_all_deviations(seed):
    inst = _unique_argmax_k5(seed, 2)
    game = Gm.build_game_2p(inst, W=2)
    rep = Gm.potential_identity_check(game)
    assert rep.ok, rep.counterexample
    assert rep.deviations == 2 * 160 * (160 * 159 // 2)
    assert abs(rep.deviations - 4e6) / 4e6 < 0.05
    assert Gm.nash_set(game) == _truthful_max_set(game, inst)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_c4_game2p_k5_w2_ties(seed):
    """With tied neighbouring maxima, truthful pairs (v, w) at equal sums are also stable."""
    inst = random_sumls(complete_graph(5), 2, random.Random(seed))
    game = Gm.build_game_2p(inst, W=2)
    maxima = local_maxima_bruteforce(inst)
    want = {game.truthful_profile(v, w) for v in maxima for w in maxima
            if inst.value(v) == inst.value(w)}
    assert Gm.nash_set(game) == want


def _np_instance(seed):
    rng = random.Random(seed)
    return random_sumls(Hypercube(3), 3, rng, distinct=True, lo=0)


def test_c4_gamenp_constants():
    assert Gm.priority_constants(3, 4) == (839808, 31104, 1728, 108, 36, 1)
    game = Gm.build_game_np(_np_instance(0), 4)
    assert game.k == (839808, 31104, 1728, 108, 36, 1)
    assert game.n_players == 76


def test_c4_gamenp_identity_on_10k_profiles():
    game = Gm.build_game_np(_np_instance(0), 4)
    rng = random.Random(12345)
    profiles = []
    for t in range(10 ** 4):
        if t % 2:
            profiles.append(Gm.random_profile(game, rng))
        else:
            v = rng.randrange(8)
            p = list(game.truthful_profile(v, v ^ (1 << rng.randrange(3)), order_seed=t))
            for _ in range(rng.randint(0, 6)):
                p[rng.randrange(76)] ^= 1
            profiles.append(tuple(p))
    rep = Gm.potential_identity_check(game, profiles=profiles)
    assert rep.ok, rep.counterexample
    assert rep.deviations == 76 * 10 ** 4


def test_c4_gamenp_truthful_local_max_survives():
    checked = 0
    for seed in range(5):
        inst = _np_instance(seed)
        game = Gm.build_game_np(inst, 4)
        for v in local_maxima_bruteforce(inst):
            for order in (None, seed, seed + 100):
                ok, dev = Gm.nash_check(game, game.truthful_profile(v, order_seed=order))
                assert ok, (seed, v, dev)
                checked += 1
    assert checked > 0


def test_c4_gamenp_designated_deviation_improves():
    game = Gm.build_game_np(_np_instance(0), 4)
    conforming = {game.truthful_profile(v) for v in local_maxima_bruteforce(game.inst)}
    seen = 0
    s = 0
    while seen < 10 ** 3:
        rng = random.Random(s)
        s += 1
        v = rng.randrange(8)
        w = v if rng.random() < 0.5 else v ^ (1 << rng.randrange(3))
        p = list(game.truthful_profile(v, w, order_seed=s))
        for _ in range(rng.choice([0, 1, 1, 2, 3, 10, 40])):
            p[rng.randrange(76)] ^= 1
        p = tuple(p)
        pv, _, _, pw, _, _ = game.decode(p)
        if pv == pw and is_local_max(game.inst, pv) and game.designated_deviation(p) is None:
            # conforming up to slot order: must be an equilibrium
            assert Gm.nash_check(game, p)[0]
            continue
        seen += 1
        dev = game.designated_deviation(p)
        assert dev is not None, s
        i, level = dev
        q = game.flip(p, i)
        assert game.utility(i, q) > game.utility(i, p), (s, level)
        assert game.potential(q) > game.potential(p), (s, level)
    assert conforming


# ---------------------------------------------------------------- 5. protocols


def test_c5_detect_exact_2p_matches_oracle():
    false_rej = false_acc = 0
    bits = []
    for seed in range(200):
        rng = random.Random(seed)
        g = Gm.random_exact_game_2p(16, rng, W=8)
        if seed % 2:
            g = Gm.plant_violation(g, rng)
        truth = Gm.ms_cycle_check_2p(g).exact
        assert truth == (seed % 2 == 0)
        v = P.detect_exact_potential_2p(g.table(0), g.table(1), k=20, seed=seed)
        false_rej += truth and not v.exact
        false_acc += (not truth) and v.exact
        assert v.equations == 16 ** 2 * 15 ** 2 // 4
        bits.append(v.transcript.bits)
    assert false_rej == 0
    assert false_acc <= 1
    assert max(bits) <= 2000
    rng = random.Random(0)
    g = Gm.random_exact_game_2p(16, rng, W=8)
    base = P.baseline_full_exchange((g.table(0), g.table(1)))
    span = int(g.table(0).max() - g.table(0).min()) + 1
    assert base.transcript.bits == 256 * math.ceil(math.log2(span))
    assert max(bits) < base.transcript.bits


def test_c5_verify_sumls_witness_closed_form_hypercube10():
    g = Hypercube(10)
    for seed in range(5):
        rng = random.Random(seed)
        W = rng.choice([7, 50, 1000])
        inst = random_sumls(g, W, rng)
        maxima = local_maxima_bruteforce(inst)
        for v in [0, 1023, rng.randrange(1024)] + sorted(maxima)[:2]:
            out = P.verify_sumls_witness(inst, v)
            assert out.transcript.bits == 2 * 11 * math.ceil(math.log2(2 * W + 1))
            assert out.accepted == (v in maxima)


# ---------------------------------------------------------------- 6. ordinal gadgets


def test_c6_gadget_2x2_cycle_iff_both_two():
    for x, y in product((0, 2), repeat=2):
        cyc = Gm.better_reply_cycle(Gm.gadget_2x2(x, y))
        assert (cyc is not None) == (x == 2 and y == 2)


def test_c6_two_player_gadget_n3_exhaustive():
    masks = np.arange(512)
    bits = ((masks[:, None] >> np.arange(9)) & 1) * 2
    Ys = bits.reshape(512, 3, 3)
    for xi in range(512):
        Xs = np.broadcast_to(bits[xi].reshape(3, 3), (512, 3, 3))
        UA, UB = Gm.ordinal_gadget_tables_2p_batch(Xs, Ys)
        cyc = Gm.has_better_reply_cycle_2p_batch(UA, UB)
        inter = ((Xs == 2) & (Ys == 2)).any(axis=(1, 2))
        assert (cyc == inter).all(), xi
    rng = random.Random(0)
    for _ in range(200):
        xi, yi = rng.randrange(512), rng.randrange(512)
        X, Y = bits[xi].reshape(3, 3), bits[yi].reshape(3, 3)
        g = Gm.build_ordinal_gadget_2p(X, Y)
        UA, UB = Gm.ordinal_gadget_tables_2p_batch(X[None], Y[None])
        assert (UA[0] == g.tables[0]).all() and (UB[0] == g.tables[1]).all()
        assert (Gm.better_reply_cycle(g) is not None) == bool(((X == 2) & (Y == 2)).any())


def test_c6_multi_player_gadget_n2_exhaustive():
    cube = list(product((0, 1), repeat=2))
    for xs in product((0, 2), repeat=4):
        for ys in product((0, 2), repeat=4):
            x = dict(zip(cube, xs))
            y = dict(zip(cube, ys))
            g = Gm.build_ordinal_gadget_np(x.__getitem__, y.__getitem__, 2)
            cyc = Gm.better_reply_cycle(g)
            inter = any(x[a] == 2 and y[a] == 2 for a in cube)
            assert (cyc is not None) == inter


# ---------------------------------------------------------------- 7. sparse ball bound


def test_c7_ball_intersection_at_most_73():
    emb = E.sparse_embed_G_hypercube(4)
    base = emb.base
    worst = 0
    for v in base.vertices():
        worst = max(worst, emb.ball_intersection(E.triple(base.phi_key(v))))
    image = sorted(emb.base_image())
    n = emb.target.n
    rng = random.Random(0)
    for _ in range(10 ** 4):
        w = E.triple(rng.choice(image))
        for _ in range(rng.randint(0, 2)):
            w ^= 1 << rng.randrange(n)
        worst = max(worst, emb.ball_intersection(w))
    assert worst <= 73


# ---------------------------------------------------------------- 8. solvers


def test_c8_aldous_correct_and_sqrt_scaling():
    t0 = time.time()
    means = {}
    for n in (8, 10, 12):
        g = Hypercube(n)
        qs = []
        for seed in range(200):
            q = random_query_instance(g, random.Random(seed))
            res = aldous_search(q, math.ceil(math.sqrt(2 ** n)), seed=seed)
            assert is_local_max(q, res.vertex)
            qs.append(res.queries)
        means[n] = statistics.mean(qs)
    for lo, hi in ((8, 10), (10, 12)):
        assert 1.4 <= means[hi] / means[lo] <= 2.6, means
    assert time.time() - t0 <= 60
