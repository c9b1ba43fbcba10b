"""Local-search instance types, brute-force oracles and simple reductions.

Local maxima are weak: a vertex survives when no (valid) neighbour has a
strictly larger value.  ``dominates`` is the single comparator used here and
by the solvers.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from typing import Callable

from .graphs import GraphFamily, bfs_distances

DEFAULT_CAP = int(os.environ.get("LSCC_CAP", 1 << 20))


class CapExceeded(RuntimeError):
    """The graph is too large for an exhaustive scan."""


def dominates(x: int, y: int) -> bool:
    """True when a vertex of value x is not beaten by a neighbour of value y."""
    return x >= y


def table(values: dict) -> Callable:
    return values.__getitem__


@dataclass
class VetoLSInstance:
    """Alice holds ``f``; Bob holds the valid set (membership oracle)."""

    graph: GraphFamily
    f: Callable
    valid: Callable
    W: int

    def value(self, v):
        return self.f(v)

    def valid_set(self, cap=DEFAULT_CAP) -> set:
        return {v for v in _enumerate(self.graph, cap) if self.valid(v)}


@dataclass
class SumLSInstance:
    """Alice holds ``f_A``, Bob holds ``f_B``; the target is f_A + f_B."""

    graph: GraphFamily
    f_A: Callable
    f_B: Callable
    W: int
    distinct: bool = False

    def value(self, v):
        return self.f_A(v) + self.f_B(v)


@dataclass
class QueryInstance:
    """A single potential ``h`` readable only through counted queries."""

    graph: GraphFamily
    h: Callable
    queries: int = 0
    index: dict | None = None

    def query(self, v):
        self.queries += 1
        return self.h(v)

    def value(self, v):
        return self.h(v)

    def vertex_index(self) -> dict:
        """1-based index of each vertex in enumeration order."""
        if self.index is None:
            self.index = {v: r + 1 for r, v in enumerate(self.graph.vertices())}
        return self.index


@dataclass
class SimLSInstance:
    """Index-gadget split of a query instance.

    Alice holds ``alice_arrays[v][i]`` for i in range(M); Bob holds the
    correct index ``bob_index[v]``.  ``access_log`` records every array cell
    read through ``composed``.
    """

    graph: GraphFamily
    M: int
    alice_arrays: dict
    bob_index: dict
    access_log: list = field(default_factory=list)

    def composed(self, v):
        i = self.bob_index[v]
        self.access_log.append((v, i))
        return self.alice_arrays[v][i]


def _enumerate(g: GraphFamily, cap: int):
    n = g.num_vertices()
    if n > cap:
        raise CapExceeded(f"{g.name} has {n} vertices, above the cap {cap}")
    return g.vertices()


def is_local_max(inst, v) -> bool:
    """Weak local maximality of v (among valid vertices for VetoLS)."""
    g = inst.graph
    if isinstance(inst, VetoLSInstance):
        if not inst.valid(v):
            return False
        fv = inst.f(v)
        return all(dominates(fv, inst.f(w)) for w in g.neighbors(v) if inst.valid(w))
    fv = inst.value(v)
    return all(dominates(fv, inst.value(w)) for w in g.neighbors(v))


def improving_neighbor(inst, v):
    """A neighbour that beats v, or None."""
    fv = inst.value(v)
    for w in inst.graph.neighbors(v):
        if isinstance(inst, VetoLSInstance) and not inst.valid(w):
            continue
        if not dominates(fv, inst.value(w)):
            return w
    return None


def local_maxima_bruteforce(inst, cap: int = DEFAULT_CAP) -> set:
    """Exact set of (valid) weak local maxima by exhaustive scan."""
    return {v for v in _enumerate(inst.graph, cap) if is_local_max(inst, v)}


def veto_to_sum(inst: VetoLSInstance, vstar, cap: int = DEFAULT_CAP) -> SumLSInstance:
    """Bob replaces his veto by ``-d(v, v*) (W+1)`` on invalid vertices.

    Distances come from a BFS from ``vstar`` (analytic distances are used
    instead when the family provides them and the graph is too large).
    """
    if not inst.valid(vstar):
        raise ValueError(f"v* = {vstar!r} is not a valid vertex")
    g = inst.graph
    W = inst.W
    if g.num_vertices() <= cap and type(g).distance is GraphFamily.distance:
        dist = bfs_distances(g, vstar)

        def d(v):
            if v not in dist:
                raise ValueError(f"{v!r} cannot reach v*")
            return dist[v]
    else:
        def d(v):
            return g.distance(v, vstar)

    def f_B(v):
        return 0 if inst.valid(v) else -d(v) * (W + 1)

    return SumLSInstance(g, inst.f, f_B, W)


def distinctify(q: QueryInstance) -> QueryInstance:
    """h'(v) = 2N h(v) + index(v): distinct values, LocalMax(h') within LocalMax(h)."""
    idx = q.vertex_index()
    N = len(idx)
    h = q.h

    def h2(v):
        return 2 * N * h(v) + idx[v]

    return QueryInstance(q.graph, h2, index=idx)


def simls_build(q: QueryInstance, M: int, seed) -> SimLSInstance:
    """Hide h behind an index gadget of size M with seeded decoys."""
    rng = random.Random(seed)
    vals = [q.h(v) for v in q.graph.vertices()]
    lo, hi = min(vals), max(vals)
    arrays, index = {}, {}
    for v in q.graph.vertices():
        I = rng.randrange(M)
        row = [rng.randint(lo, hi) for _ in range(M)]
        row[I] = q.h(v)
        arrays[v] = row
        index[v] = I
    return SimLSInstance(q.graph, M, arrays, index)


def simls_as_query(sim: SimLSInstance) -> QueryInstance:
    return QueryInstance(sim.graph, sim.composed)


def random_vetols(g: GraphFamily, W: int, rng, p_valid: float = 0.5) -> VetoLSInstance:
    """Seeded VetoLS instance with explicit tables (nonempty valid set)."""
    verts = list(g.vertices())
    f = {v: rng.randint(1, W) for v in verts}
    S = {v for v in verts if rng.random() < p_valid}
    if not S:
        S.add(rng.choice(verts))
    return VetoLSInstance(g, f.__getitem__, S.__contains__, W)


def random_sumls(g: GraphFamily, W: int, rng, distinct: bool = False, lo: int = 1,
                 tries: int = 1000) -> SumLSInstance:
    """Seeded SumLS instance with values in [lo, W]; optionally adjacent sums distinct."""
    verts = list(g.vertices())
    for _ in range(tries):
        fa = {v: rng.randint(lo, W) for v in verts}
        fb = {v: rng.randint(lo, W) for v in verts}
        if not distinct or all(fa[u] + fb[u] != fa[w] + fb[w] for u, w in g.edges()):
            return SumLSInstance(g, fa.__getitem__, fb.__getitem__, W, distinct=distinct)
    raise RuntimeError("could not draw an instance with distinct adjacent sums")
