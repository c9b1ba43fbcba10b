"""Command-line entry point: every subcommand prints JSON-lines report records.

Exit codes: 0 success, 2 usage error (argparse), 3 verification failure,
4 bad input file.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import embeddings as E
from . import formats as F
from . import games as Gm
from . import protocols as P
from .graphs import GraphError, complete_graph
from .lifted import lifted_vetols
from .pebbling import (
    format_pebb,
    parse_pebb,
    pebb_solve_bruteforce,
    pebb_to_vetols,
    random_pebb,
)
from .search import (
    DEFAULT_CAP,
    CapExceeded,
    QueryInstance,
    SumLSInstance,
    VetoLSInstance,
    distinctify,
    local_maxima_bruteforce,
    random_sumls,
    random_vetols,
    simls_build,
    veto_to_sum,
)
from .solvers import aldous_search, random_query_instance, steepest_ascent

SCHEMA = "localsearch_cc.report/1"
EXIT_VERIFY = 3
EXIT_INPUT = 4


class VerificationFailed(Exception):
    def __init__(self, record):
        super().__init__(record.get("kind", "verification failed"))
        self.record = record


def emit(kind: str, **fields):
    rec = {"schema": SCHEMA, "kind": kind}
    rec.update(fields)
    print(json.dumps(rec, default=_jsonable, sort_keys=False))
    return rec


def _jsonable(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x, key=repr)
    if hasattr(x, "item"):
        return x.item()
    return repr(x)


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise F.FormatError(str(exc)) from exc


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def load_instance(path):
    text = _read(path)
    head = text.lstrip().split(None, 1)[0] if text.strip() else ""
    if head == "pebb":
        return parse_pebb(text)
    if head == "game":
        return F.parse_game(text)
    return F.parse_instance(text)


def load_game(spec):
    if spec.startswith("builtin:"):
        return F.builtin_game(spec[len("builtin:"):])
    return F.parse_game(_read(spec))


# ---------------------------------------------------------------- subcommands


def cmd_gen(a):
    rng = random.Random(a.seed)
    if a.kind == "pebb":
        _write(format_pebb(random_pebb(a.M, a.seed)), a.out)
        return
    if a.kind in ("game-exact", "game-planted"):
        g = Gm.random_exact_game_2p(a.N, rng, a.W)
        if a.kind == "game-planted":
            g = Gm.plant_violation(g, rng)
        _write(F.format_game(g), a.out)
        return
    g = F.graph_from_spec(a.graph)
    if a.kind == "vetols":
        inst = random_vetols(g, a.W, rng)
    elif a.kind == "sumls":
        inst = random_sumls(g, a.W, rng, distinct=a.distinct)
    else:
        inst = random_query_instance(g, rng, a.W)
    _write(F.format_instance(inst), a.out)


def cmd_reduce(a):
    inst = load_instance(a.instance)
    if a.to == "vetols":
        if not hasattr(inst, "alice_bits"):
            raise F.FormatError("reduce --to vetols expects a pebb instance")
        out = pebb_to_vetols(inst)
        sols = pebb_solve_bruteforce(inst)
        maxima = local_maxima_bruteforce(out, a.cap)
        image = {v + (inst.bob_index[v],) for v in sols}
        ok = maxima == image
        rec = dict(reduction="pebb->vetols", solutions=len(sols), maxima=len(maxima),
                   correspondence="exact" if ok else "mismatch")
    else:
        if not isinstance(inst, VetoLSInstance):
            raise F.FormatError("reduce --to sumls expects a vetols instance")
        vstar = next(v for v in inst.graph.vertices() if inst.valid(v))
        out = veto_to_sum(inst, vstar, a.cap)
        m1 = local_maxima_bruteforce(inst, a.cap)
        m2 = local_maxima_bruteforce(out, a.cap)
        ok = m1 == m2
        rec = dict(reduction="vetols->sumls", maxima=len(m1),
                   correspondence="exact" if ok else "mismatch")
    if a.out:
        _write(F.format_instance(out), a.out)
    emit("reduce", **rec)
    if not ok:
        raise VerificationFailed(rec)


def builtin_embedding(name, a):
    if name == "hyp":
        return E.embed_G_hypercube(a.M)
    if name == "grid":
        return E.embed_G_grid(a.M)
    if name == "odd":
        return E.embed_hyp_odd(a.n)
    if name == "deg4":
        g = F.graph_from_spec(a.graph) if a.graph else complete_graph(5)
        return E.embed_deg4_grid3d(g)
    if name == "sparse":
        return E.sparse_embed_G_hypercube(a.M)
    raise F.FormatError(f"unknown builtin embedding {name!r}")


def _load_embedding(spec, a):
    if spec.startswith("builtin:"):
        return builtin_embedding(spec[len("builtin:"):], a)
    return F.parse_embedding(_read(spec))


def cmd_embed(a):
    emb = _load_embedding(a.embedding, a)
    n = emb.source.num_vertices()
    if n > a.cap:
        raise CapExceeded(f"{n} source vertices exceed the cap {a.cap}")
    src = F.graph_spec(emb.source) or emb.source.name
    tgt = F.graph_spec(emb.target) or emb.target.name
    _write(F.format_embedding(emb, src, tgt), a.out)


def cmd_verify_embedding(a):
    emb = _load_embedding(a.embedding, a)
    rep = E.verify_vied(emb, sample=a.sample, seed=a.seed)
    rec = emit("verify-embedding", embedding=a.embedding, **rep.as_record())
    if not rep.ok:
        raise VerificationFailed(rec)


def cmd_oracle(a):
    inst = load_instance(a.instance)
    if hasattr(inst, "alice_bits"):
        sols = pebb_solve_bruteforce(inst)
        emit("oracle", problem="pebb", solutions=sorted(sols))
    elif isinstance(inst, Gm.Game):
        nash = Gm.nash_set(inst, a.cap)
        cyc = Gm.better_reply_cycle(inst, a.cap)
        emit("oracle", problem="game", nash=sorted(nash), better_reply_cycle=cyc)
    else:
        emit("oracle", problem=type(inst).__name__,
             local_maxima=sorted(local_maxima_bruteforce(inst, a.cap), key=repr))


def cmd_game(a):
    if a.action == "check":
        g = load_game(a.instance)
        v = Gm.ms_cycle_check_2p(g) if g.n_players == 2 else Gm.ms_cycle_check_np(g)
        emit("game", action="check", exact=v.exact, witness=v.witness, cycle_sum=v.value,
             equations=v.equations, mode=v.mode, nash=sorted(Gm.nash_set(g, a.cap)))
        return
    inst = load_instance(a.instance)
    if not isinstance(inst, SumLSInstance):
        raise F.FormatError("game build expects a sumls instance")
    maxima = local_maxima_bruteforce(inst, a.cap)
    if a.action == "build-2p":
        g = Gm.build_game_2p(inst, allow_lower_degree=a.allow_lower_degree)
        bad = []
        for v in maxima:
            p = g.truthful_profile(v)
            if not Gm.nash_check(g, p)[0]:
                bad.append(v)
        rec = emit("game", action="build-2p", actions=g.actions[0], local_maxima=len(maxima),
                   truthful_nash_failures=bad)
    else:
        g = Gm.build_game_np(inst)
        bad = [v for v in maxima if not Gm.nash_check(g, g.truthful_profile(v))[0]]
        rec = emit("game", action="build-np", players=g.n_players, k=g.k,
                   local_maxima=len(maxima), truthful_nash_failures=bad)
    if bad:
        raise VerificationFailed(rec)


def cmd_protocol(a):
    name = a.name
    if name in ("detect-exact-2p", "detect-exact-np", "baseline-game"):
        g = load_game(a.instance)
        if name == "detect-exact-2p":
            if g.n_players != 2:
                raise F.FormatError("detect-exact-2p needs a two-player game")
            v = P.detect_exact_potential_2p(g.table(0), g.table(1), a.confidence, a.seed)
        elif name == "detect-exact-np":
            v = P.detect_exact_potential_np(g, k=a.confidence, seed=a.seed)
        else:
            out = P.baseline_full_exchange((g.table(0), g.table(1)))
            emit("protocol", name=name, verdict=out.transcript.outcome,
                 **out.transcript.as_record())
            return
        emit("protocol", name=name, **v.as_record())
        return
    inst = load_instance(a.instance)
    if name == "verify-sumls":
        v = F.decode_code(a.vertex) if a.vertex is not None else next(iter(inst.graph.vertices()))
        out = P.verify_sumls_witness(inst, v)
        emit("protocol", name=name, verdict=out.transcript.outcome, improving=out.detail,
             **out.transcript.as_record())
    elif name == "baseline":
        out = P.baseline_full_exchange(inst, a.cap)
        emit("protocol", name=name, verdict="solved", solution=out.solution,
             **out.transcript.as_record())
    else:
        raise F.FormatError(f"unknown protocol {name!r}")


def cmd_solve(a):
    if a.instance:
        inst = load_instance(a.instance)
    else:
        g = F.graph_from_spec(a.graph)
        inst = random_query_instance(g, random.Random(a.seed))
    if a.alg == "steepest":
        start = F.decode_code(a.start) if a.start is not None else next(iter(inst.graph.vertices()))
        res = steepest_ascent(inst, start)
    else:
        res = aldous_search(inst, a.samples, seed=a.seed)
    emit("solve", alg=a.alg, **res.as_record())


def _h_graph(name):
    name = name.lower()
    if name == "k4":
        return complete_graph(4)
    return F.graph_from_spec(name)


def cmd_pipeline(a):
    H = _h_graph(a.H)
    rng = random.Random(a.seed)
    q = QueryInstance(H, {v: rng.randint(1, 2 * H.num_vertices()) for v in H.vertices()}.__getitem__)
    q2 = distinctify(q)
    sim = simls_build(q2, a.M, a.seed)
    veto = lifted_vetols(sim)
    vstar = next(v for v in veto.graph.vertices() if veto.valid(v))
    s = veto_to_sum(veto, vstar, a.cap)
    want = local_maxima_bruteforce(q2, a.cap)
    got_v = local_maxima_bruteforce(veto, a.cap)
    got_s = local_maxima_bruteforce(s, a.cap)
    ok = got_v == got_s and {x[1] for x in got_s} == want and all(
        x[2] == sim.bob_index[x[1]] for x in got_s)
    rec = emit("pipeline", H=a.H, M=a.M, seed=a.seed, tree_vertices=veto.graph.num_vertices(),
               max_degree=veto.graph.max_degree(), maxima=sorted(want),
               correspondence="exact" if ok else "mismatch")
    if not ok:
        raise VerificationFailed(rec)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    cap_default = int(os.environ.get("LSCC_CAP", DEFAULT_CAP))
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=int, default=cap_default, help="enumeration guard")
    common.add_argument("--out", default=None)

    p = argparse.ArgumentParser(prog="localsearch-cc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("gen", parents=[common], help="generate a seeded instance")
    s.add_argument("kind", choices=["pebb", "vetols", "sumls", "query", "game-exact", "game-planted"])
    s.add_argument("--graph", default="hypercube:4")
    s.add_argument("--M", type=int, default=3)
    s.add_argument("--W", type=int, default=8)
    s.add_argument("--N", type=int, default=4)
    s.add_argument("--distinct", action="store_true")
    s.set_defaults(fn=cmd_gen)

    s = sub.add_parser("reduce", parents=[common], help="apply a reduction and check it")
    s.add_argument("--instance", required=True)
    s.add_argument("--to", choices=["vetols", "sumls"], required=True)
    s.set_defaults(fn=cmd_reduce)

    for name, fn, hlp in (("embed", cmd_embed, "write an embedding file"),
                          ("verify-embedding", cmd_verify_embedding, "check the VIED properties")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("embedding", help="builtin:{hyp,grid,odd,deg4,sparse} or a file")
        s.add_argument("--M", type=int, default=4)
        s.add_argument("--n", type=int, default=3)
        s.add_argument("--graph", default=None, help="source graph for builtin:deg4")
        s.add_argument("--sample", type=int, default=None)
        s.set_defaults(fn=fn)

    s = sub.add_parser("oracle", parents=[common], help="brute-force solutions")
    s.add_argument("--instance", required=True)
    s.set_defaults(fn=cmd_oracle)

    s = sub.add_parser("game", parents=[common], help="build or check games")
    s.add_argument("action", choices=["build-2p", "build-np", "check"])
    s.add_argument("--instance", required=True)
    s.add_argument("--allow-lower-degree", action="store_true")
    s.set_defaults(fn=cmd_game)

    s = sub.add_parser("protocol", parents=[common], help="run a protocol")
    s.add_argument("run", choices=["run"])
    s.add_argument("name", choices=["detect-exact-2p", "detect-exact-np", "verify-sumls",
                                    "baseline", "baseline-game"])
    s.add_argument("--instance", required=True, help="file, or builtin:pd / builtin:mp for games")
    s.add_argument("--confidence", type=int, default=20)
    s.add_argument("--vertex", default=None)
    s.set_defaults(fn=cmd_protocol)

    s = sub.add_parser("solve", parents=[common], help="query-model local search")
    s.add_argument("--alg", choices=["steepest", "aldous"], default="aldous")
    s.add_argument("--samples", type=int, default=None)
    s.add_argument("--instance", default=None)
    s.add_argument("--graph", default="hypercube:8")
    s.add_argument("--start", default=None)
    s.set_defaults(fn=cmd_solve)

    s = sub.add_parser("pipeline", parents=[common], help="query -> SimLS -> lifted VetoLS -> SumLS")
    s.add_argument("--H", default="k4")
    s.add_argument("--M", type=int, default=2)
    s.set_defaults(fn=cmd_pipeline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except VerificationFailed:
        return EXIT_VERIFY
    except (F.FormatError, GraphError, CapExceeded, KeyError, ValueError) as exc:
        emit("error", error=type(exc).__name__, message=str(exc))
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
