"""Lifting a SimLS instance on a 3-regular graph to VetoLS on a degree-4 graph.

Every pair (v, i) with i in range(M) becomes two complete binary trees of
depth 3a (M = 2^a) sharing their root: an out-tree with nodes t_s and an
in-tree with nodes t'_s, s a bit string of length <= 3a.  The out-leaf
s = (j1, j2, j3) is wired to one leaf of the in-tree of (w_k, j_k) for each
of the three neighbours w_1 < w_2 < w_3 of v.

Node codes: ``("t", v, i, l, x)`` and ``("u", v, i, l, x)`` where ``x`` holds
the l bits of s (first bit most significant).  The shared root is
``("t", v, i, 0, 0)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Explicit, GraphError, GraphFamily
from .search import SimLSInstance, VetoLSInstance


class TreeGraph(Explicit):
    def __init__(self, H: GraphFamily, M: int, adj: dict, nbrs: dict, cross: dict):
        super().__init__(adj, f"tree({H.name},M={M})")
        self.H = H
        self.M = M
        self.a = M.bit_length() - 1
        self.depth = 3 * self.a
        self.nbrs = nbrs
        self.cross = cross

    def root(self, v, i):
        return ("t", v, i, 0, 0)

    def out_leaf(self, v, i, js):
        a = self.a
        j1, j2, j3 = js
        return ("t", v, i, self.depth, (j1 << 2 * a) | (j2 << a) | j3)

    def leaf_targets(self, v, i, js):
        """The three in-tree leaves wired to an out-leaf."""
        return self.cross[self.out_leaf(v, i, js)]

    @staticmethod
    def owner(node):
        return node[1]


def _node(kind, v, i, l, x):
    if l == 0:
        return ("t", v, i, 0, 0)
    return (kind, v, i, l, x)


def build_tree_graph(H: GraphFamily, M: int) -> TreeGraph:
    """Shared-root double trees per (v, i), cross-wired round-robin."""
    if M < 2 or M & (M - 1):
        raise GraphError("M must be a power of two >= 2")
    verts = list(H.vertices())
    for v in verts:
        if H.degree(v) != 3:
            raise GraphError(f"H must be 3-regular; {v!r} has degree {H.degree(v)}")
    a = M.bit_length() - 1
    depth = 3 * a
    adj = {}

    def link(x, y):
        adj.setdefault(x, []).append(y)
        adj.setdefault(y, []).append(x)

    for v in verts:
        for i in range(M):
            adj.setdefault(("t", v, i, 0, 0), [])
            for kind in ("t", "u"):
                for l in range(depth):
                    for x in range(1 << l):
                        parent = _node(kind, v, i, l, x)
                        link(parent, (kind, v, i, l + 1, 2 * x))
                        link(parent, (kind, v, i, l + 1, 2 * x + 1))
    nbrs = {v: sorted(H.neighbors(v)) for v in verts}
    rr = {}
    cross = {}
    mask = (1 << a) - 1
    for v in verts:
        for i in range(M):
            for s in range(1 << depth):
                js = ((s >> 2 * a) & mask, (s >> a) & mask, s & mask)
                leaf = ("t", v, i, depth, s)
                targets = []
                for k, w in enumerate(nbrs[v]):
                    slot = (w, js[k])
                    c = rr.get(slot, 0)
                    rr[slot] = c + 1
                    tgt = ("u", w, js[k], depth, c % (1 << depth))
                    link(leaf, tgt)
                    targets.append(tgt)
                cross[leaf] = targets
    return TreeGraph(H, M, adj, nbrs, cross)


def nbin(tree: TreeGraph, sim: SimLSInstance, v) -> int:
    """Correct indices of v's three neighbours, packed as 3a bits."""
    a = tree.a
    out = 0
    for w in tree.nbrs[v]:
        out = (out << a) | sim.bob_index[w]
    return out


def lift_potential(sim: SimLSInstance, tree: TreeGraph):
    """f(t_s) = 7a f(v,i) + 3a + |s|,  f(t'_s) = 7a f(v,i) + 3a - |s|."""
    a = tree.a

    def f(node):
        kind, v, i, l, _ = node
        base = 7 * a * sim.alice_arrays[v][i] + 3 * a
        return base + l if kind == "t" else base - l

    return f


def lift_valid_set(sim: SimLSInstance, tree: TreeGraph):
    """t_s valid iff i = I(v) and s is a prefix of nbin(v); t'_s iff i = I(v)."""
    depth = tree.depth
    codes = {v: nbin(tree, sim, v) for v in tree.nbrs}

    def valid(node):
        kind, v, i, l, x = node
        if i != sim.bob_index[v]:
            return False
        if kind == "u":
            return True
        return x == codes[v] >> (depth - l)

    return valid


def lifted_vetols(sim: SimLSInstance, tree: TreeGraph | None = None) -> VetoLSInstance:
    if tree is None:
        tree = build_tree_graph(sim.graph, sim.M)
    f = lift_potential(sim, tree)
    a = tree.a
    top = max(max(row) for row in sim.alice_arrays.values())
    inst = VetoLSInstance(tree, f, lift_valid_set(sim, tree), W=7 * a * top + 6 * a)
    return inst


def tree_vertex_count(M: int) -> int:
    """Nodes of one shared-root double tree of depth 3 log2 M."""
    a = M.bit_length() - 1
    return 2 * ((1 << (3 * a + 1)) - 1) - 1
