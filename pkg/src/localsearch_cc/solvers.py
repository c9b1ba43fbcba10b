"""Query-model local search with exact query accounting."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .graphs import GraphFamily, Grid, Hypercube
from .search import QueryInstance, VetoLSInstance, dominates, is_local_max


@dataclass
class SolveResult:
    vertex: object
    value: int
    queries: int
    steps: int = 0

    def as_record(self) -> dict:
        return {"vertex": self.vertex, "value": self.value, "queries": self.queries,
                "steps": self.steps}


class Counter:
    """Value oracle that counts every evaluation (optionally caching)."""

    def __init__(self, inst, cache=False):
        self.inst = inst
        self.count = 0
        self.cache = {} if cache else None

    def __call__(self, v):
        if self.cache is not None and v in self.cache:
            return self.cache[v]
        self.count += 1
        x = self.inst.h(v) if isinstance(self.inst, QueryInstance) else self.inst.value(v)
        if self.cache is not None:
            self.cache[v] = x
        return x


def _candidates(inst, v):
    ns = inst.graph.neighbors(v)
    if isinstance(inst, VetoLSInstance):
        ns = [w for w in ns if inst.valid(w)]
    return sorted(ns)


def _climb(inst, start, value, fv, oracle) -> SolveResult:
    v = start
    steps = 0
    while True:
        best, bval = None, None
        for w in _candidates(inst, v):
            x = oracle(w)
            if not dominates(fv, x) and (bval is None or x > bval):
                best, bval = w, x
        if best is None:
            return SolveResult(v, fv, oracle.count, steps)
        v, fv = best, bval
        steps += 1


def steepest_ascent(inst, start, cache=False) -> SolveResult:
    """Move to the best strictly improving neighbour until none exists.

    Each visited vertex costs one query for itself (the start only) and one
    per neighbour; ties go to the smallest vertex code.
    """
    inst.graph.check(start)
    oracle = Counter(inst, cache)
    res = _climb(inst, start, None, oracle(start), oracle)
    if isinstance(inst, QueryInstance):
        inst.queries += res.queries
    return res


def random_vertex(g: GraphFamily, rng: random.Random):
    if isinstance(g, Hypercube):
        return rng.getrandbits(g.n) if g.n else 0
    if isinstance(g, Grid):
        return tuple(l + rng.randrange(d) for l, d in zip(g.lo, g.dims))
    verts = getattr(g, "_vertex_list", None)
    if verts is None:
        verts = list(g.vertices())
        g._vertex_list = verts
    return rng.choice(verts)


def default_samples(g: GraphFamily) -> int:
    return math.ceil(math.sqrt(g.num_vertices() * max(1, g.max_degree())))


def aldous_search(inst, t: int | None = None, seed=0, cache=False) -> SolveResult:
    """Query t uniform vertices, then climb from the best one."""
    g = inst.graph
    if t is None:
        t = default_samples(g)
    if t < 1:
        raise ValueError("t must be >= 1")
    rng = random.Random(seed)
    oracle = Counter(inst, cache)
    best, bval = None, None
    for _ in range(t):
        v = random_vertex(g, rng)
        if isinstance(inst, VetoLSInstance) and not inst.valid(v):
            continue
        x = oracle(v)
        if bval is None or x > bval or (x == bval and v < best):
            best, bval = v, x
    if best is None:
        raise ValueError("no valid vertex sampled")
    res = _climb(inst, best, None, bval, oracle)
    if isinstance(inst, QueryInstance):
        inst.queries += res.queries
    return res


def random_query_instance(g: GraphFamily, rng: random.Random, W: int | None = None) -> QueryInstance:
    """Uniform random values (i.i.d. in [1, W], default W = |V|)."""
    W = g.num_vertices() if W is None else W
    vals = {v: rng.randint(1, W) for v in g.vertices()}
    return QueryInstance(g, vals.__getitem__)


def check_result(inst, res: SolveResult) -> bool:
    return is_local_max(inst, res.vertex)
