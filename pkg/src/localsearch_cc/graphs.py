"""Graph families as implicit neighbour oracles.

Every family exposes ``neighbors(v)``, ``is_vertex(v)`` and, when small
enough, ``vertices()``.  Structured families are never materialised: the
replication graph at M=4 has 12288 vertices, but the hypercubes used as
embedding targets have more than a hundred dimensions.

Families that serve as embedding targets also expose a compact integer
*key* for each vertex (``key``, ``from_key``, ``key_neighbors``,
``key_adjacent``).  Verifiers work on keys so that millions of path
vertices fit in memory.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations, product
from typing import Hashable, Iterable, Iterator


class GraphError(ValueError):
    """Invalid vertex code or unsupported parameter."""


class Unreachable(GraphError):
    """Raised by ``graph_distance`` when no path exists."""


class GraphFamily:
    """Base class.  Subclasses implement ``neighbors`` and ``is_vertex``."""

    name = "graph"
    directed = False

    def neighbors(self, v) -> list:
        raise NotImplementedError

    def is_vertex(self, v) -> bool:
        raise NotImplementedError

    def vertices(self) -> Iterator:
        raise NotImplementedError

    def num_vertices(self) -> int:
        return sum(1 for _ in self.vertices())

    def check(self, v):
        if not self.is_vertex(v):
            raise GraphError(f"{v!r} is not a vertex of {self.name}")
        return v

    def degree(self, v) -> int:
        return len(self.neighbors(v))

    def max_degree(self) -> int:
        return max(self.degree(v) for v in self.vertices())

    def edges(self) -> Iterator[tuple]:
        """Each undirected edge once, as ``(u, v)`` ordered by vertex rank."""
        rank = {v: r for r, v in enumerate(self.vertices())}
        for u in rank:
            for w in self.neighbors(u):
                if rank[u] < rank[w]:
                    yield (u, w)

    # key interface (identity by default)
    def key(self, v):
        return v

    def from_key(self, k):
        return k

    def key_neighbors(self, k) -> list:
        return [self.key(w) for w in self.neighbors(self.from_key(k))]

    def key_adjacent(self, a, b) -> bool:
        return b in self.key_neighbors(a)

    def adjacent(self, u, v) -> bool:
        return self.key_adjacent(self.key(u), self.key(v))

    def distance(self, u, v) -> int:
        return bfs_distance(self, u, v)

    def __repr__(self):
        return self.name


def bfs_distance(g: GraphFamily, u, v) -> int:
    if u == v:
        return 0
    seen = {u}
    frontier = deque([(u, 0)])
    while frontier:
        x, d = frontier.popleft()
        for y in g.neighbors(x):
            if y == v:
                return d + 1
            if y not in seen:
                seen.add(y)
                frontier.append((y, d + 1))
    raise Unreachable(f"{v!r} unreachable from {u!r} in {g.name}")


def bfs_distances(g: GraphFamily, source) -> dict:
    """Distances from ``source`` to every reachable vertex."""
    dist = {source: 0}
    frontier = deque([source])
    while frontier:
        x = frontier.popleft()
        for y in g.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                frontier.append(y)
    return dist


def graph_distance(g: GraphFamily, u, v) -> int:
    """Exact shortest-path distance; analytic where the family allows."""
    g.check(u)
    g.check(v)
    return g.distance(u, v)


def neighbors(g: GraphFamily, v) -> list:
    g.check(v)
    return g.neighbors(v)


# ---------------------------------------------------------------- hypercube


class Hypercube(GraphFamily):
    """``{0,1}^n`` with vertices as int bitmasks (bit t is coordinate t)."""

    def __init__(self, n: int):
        if n < 1:
            raise GraphError("hypercube dimension must be positive")
        self.n = n
        self.name = f"hypercube({n})"

    def is_vertex(self, v) -> bool:
        return isinstance(v, int) and 0 <= v < (1 << self.n)

    def neighbors(self, v):
        return [v ^ (1 << t) for t in range(self.n)]

    key_neighbors = neighbors

    def key_adjacent(self, a, b):
        return (a ^ b).bit_count() == 1

    def vertices(self):
        return iter(range(1 << self.n))

    def num_vertices(self):
        return 1 << self.n

    def max_degree(self):
        return self.n

    def degree(self, v):
        return self.n

    def edges(self):
        for v in range(1 << self.n):
            for t in range(self.n):
                w = v | (1 << t)
                if w != v:
                    yield (v, w)

    def distance(self, u, v):
        return (u ^ v).bit_count()


def bits(v: int, n: int) -> str:
    """Render a hypercube vertex as a bit string, coordinate 0 first."""
    return "".join("1" if v >> t & 1 else "0" for t in range(n))


def from_bits(s: str) -> int:
    return sum(1 << t for t, ch in enumerate(s) if ch == "1")


# ---------------------------------------------------------------- grid


class Grid(GraphFamily):
    """Box grid ``prod_t [lo_t, lo_t + dims_t)`` with unit steps (no wrap).

    Keys pack each coordinate into a fixed-width bit field, so a grid whose
    axes are mostly binary behaves like a hypercube in key space.
    """

    def __init__(self, dims: Iterable[int], lo: Iterable[int] | None = None):
        self.dims = tuple(int(d) for d in dims)
        if not self.dims or min(self.dims) < 1:
            raise GraphError("grid needs at least one axis of positive size")
        self.lo = tuple(lo) if lo is not None else (0,) * len(self.dims)
        if len(self.lo) != len(self.dims):
            raise GraphError("lo and dims differ in length")
        self.name = "grid(" + ",".join(map(str, self.dims)) + ")"
        self.widths = [max(1, (d - 1).bit_length()) for d in self.dims]
        self.offsets = []
        off = 0
        for w in self.widths:
            self.offsets.append(off)
            off += w
        self.total_bits = off
        self._field_of_bit = []
        for t, w in enumerate(self.widths):
            self._field_of_bit.extend([t] * w)
        self._masks = [((1 << w) - 1) << o for w, o in zip(self.widths, self.offsets)]

    def is_vertex(self, v) -> bool:
        return (
            isinstance(v, tuple)
            and len(v) == len(self.dims)
            and all(isinstance(x, int) and l <= x < l + d for x, l, d in zip(v, self.lo, self.dims))
        )

    def neighbors(self, v):
        out = []
        for t, (x, l, d) in enumerate(zip(v, self.lo, self.dims)):
            for y in (x - 1, x + 1):
                if l <= y < l + d:
                    out.append(v[:t] + (y,) + v[t + 1:])
        return out

    def vertices(self):
        return product(*[range(l, l + d) for l, d in zip(self.lo, self.dims)])

    def num_vertices(self):
        n = 1
        for d in self.dims:
            n *= d
        return n

    def distance(self, u, v):
        return sum(abs(a - b) for a, b in zip(u, v))

    def key(self, v):
        k = 0
        for x, l, o in zip(v, self.lo, self.offsets):
            k |= (x - l) << o
        return k

    def from_key(self, k):
        return tuple(
            ((k >> o) & ((1 << w) - 1)) + l for o, w, l in zip(self.offsets, self.widths, self.lo)
        )

    def field(self, k, t):
        return (k >> self.offsets[t]) & ((1 << self.widths[t]) - 1)

    def key_neighbors(self, k):
        out = []
        for t, (o, w, d) in enumerate(zip(self.offsets, self.widths, self.dims)):
            x = (k >> o) & ((1 << w) - 1)
            base = k & ~self._masks[t]
            if x > 0:
                out.append(base | ((x - 1) << o))
            if x + 1 < d:
                out.append(base | ((x + 1) << o))
        return out

    def key_adjacent(self, a, b):
        x = a ^ b
        if x == 0:
            return False
        t = self._field_of_bit[(x & -x).bit_length() - 1]
        if x & ~self._masks[t]:
            return False
        return abs(self.field(a, t) - self.field(b, t)) == 1


# ---------------------------------------------------------------- odd graph


class OddGraph(GraphFamily):
    """(k-1)-subsets of {1..2k-1}, adjacent iff disjoint.

    Element e is stored as bit e-1 of the vertex bitmask.
    """

    def __init__(self, k: int):
        if k < 2:
            raise GraphError("odd graph needs k >= 2")
        self.k = k
        self.ground = 2 * k - 1
        self.full = (1 << self.ground) - 1
        self.name = f"odd({k})"

    def is_vertex(self, v):
        return isinstance(v, int) and 0 <= v <= self.full and v.bit_count() == self.k - 1

    def neighbors(self, v):
        comp = self.full & ~v
        return [comp & ~(1 << t) for t in range(self.ground) if comp >> t & 1]

    def key_neighbors(self, k):
        return self.neighbors(k)

    def key_adjacent(self, a, b):
        return a & b == 0 and a != b

    def vertices(self):
        for c in combinations(range(self.ground), self.k - 1):
            yield sum(1 << t for t in c)

    def degree(self, v):
        return self.k

    def max_degree(self):
        return self.k

    def distance(self, u, v):
        s = (u & v).bit_count()
        return min(2 * (self.k - 1 - s), 2 * s + 1)


def odd_vertex(elements: Iterable[int]) -> int:
    """Bitmask of a subset of {1..2k-1} given by its elements."""
    return sum(1 << (e - 1) for e in elements)


def odd_elements(v: int) -> frozenset:
    return frozenset(t + 1 for t in range(v.bit_length()) if v >> t & 1)


# ---------------------------------------------------------------- pebbling DAG

DISPLACEMENTS = ((1, 1), (1, -1), (2, 1), (2, -1), (3, 1), (3, -1))
"""(axis, sign) pairs; axis 1..3 addresses k2..k4 of a D-vertex."""


class PebblingDag(GraphFamily):
    """D on ``[M^3] x [M]^3`` (0-based).  (k1,..,k4) has the six successors
    (k1+1, one of k2..k4 moved by +-1 mod M) unless k1 is the last layer."""

    directed = True

    def __init__(self, M: int):
        if M < 3:
            raise GraphError("pebbling DAG needs M >= 3 (+1 and -1 mod M must differ)")
        self.M = M
        self.layers = M ** 3
        self.name = f"pebbling_dag({M})"

    def is_vertex(self, v):
        return (
            isinstance(v, tuple)
            and len(v) == 4
            and all(isinstance(x, int) for x in v)
            and 0 <= v[0] < self.layers
            and all(0 <= x < self.M for x in v[1:])
        )

    def move(self, v, axis, sign, dk1=1):
        w = list(v)
        w[0] = v[0] + dk1
        w[axis] = (v[axis] + sign) % self.M
        return tuple(w)

    def successors(self, v):
        if v[0] == self.layers - 1:
            return []
        return [self.move(v, a, s) for a, s in DISPLACEMENTS]

    def predecessors(self, v):
        if v[0] == 0:
            return []
        return [self.move(v, a, s, -1) for a, s in DISPLACEMENTS]

    def neighbors(self, v):
        return self.successors(v) + self.predecessors(v)

    def vertices(self):
        M = self.M
        return product(range(self.layers), range(M), range(M), range(M))

    def num_vertices(self):
        return self.M ** 6

    def sources(self):
        return (v for v in self.vertices() if v[0] == 0)

    def sinks(self):
        return (v for v in self.vertices() if v[0] == self.layers - 1)


# ---------------------------------------------------------------- replication graph


class ReplicationGraph(GraphFamily):
    """Undirected D with coordinate 1 wrapped mod M^3, every vertex tripled.

    Vertices are ``(k1, k2, k3, k4, i)`` with i in {0,1,2}.  Each D edge
    (v, u) becomes the nine edges ((v,i),(u,j)).  The result is 36-regular on
    3 M^6 vertices.
    """

    def __init__(self, M: int):
        if M < 3:
            raise GraphError("replication graph needs M >= 3")
        self.M = M
        self.layers = M ** 3
        self.name = f"replication({M})"

    def is_vertex(self, v):
        return (
            isinstance(v, tuple)
            and len(v) == 5
            and all(isinstance(x, int) for x in v)
            and 0 <= v[0] < self.layers
            and all(0 <= x < self.M for x in v[1:4])
            and 0 <= v[4] < 3
        )

    def _shift(self, v, axis, sign, dk1):
        w = list(v[:4])
        w[0] = (v[0] + dk1) % self.layers
        w[axis] = (v[axis] + sign) % self.M
        return tuple(w)

    def up_neighbors(self, v):
        """Neighbours one layer up: ``((axis, sign), j, vertex)`` triples."""
        out = []
        for a, s in DISPLACEMENTS:
            base = self._shift(v, a, s, 1)
            for j in range(3):
                out.append(((a, s), j, base + (j,)))
        return out

    def down_neighbors(self, v):
        out = []
        for a, s in DISPLACEMENTS:
            base = self._shift(v, a, -s, -1)
            for j in range(3):
                out.append(((a, s), j, base + (j,)))
        return out

    def neighbors(self, v):
        return [w for _, _, w in self.up_neighbors(v)] + [w for _, _, w in self.down_neighbors(v)]

    def degree(self, v):
        return 36

    def max_degree(self):
        return 36

    def vertices(self):
        M = self.M
        return product(range(self.layers), range(M), range(M), range(M), range(3))

    def num_vertices(self):
        return 3 * self.M ** 6

    def edges(self):
        """Every edge once, oriented from its lower layer to the next."""
        for v in self.vertices():
            for _, _, u in self.up_neighbors(v):
                yield (v, u)

    def orient(self, x, y):
        """Return ``(lower, upper, (axis, sign))`` for an edge, or raise."""
        for a, b in ((x, y), (y, x)):
            if (a[0] + 1) % self.layers == b[0]:
                for (ax, s) in DISPLACEMENTS:
                    if self._shift(a, ax, s, 1) == b[:4]:
                        return a, b, (ax, s)
        raise GraphError(f"{x!r} -- {y!r} is not an edge of {self.name}")


def parity(v) -> int:
    """Parity of k1+k2+k3+k4 for a D- or G-vertex."""
    return (v[0] + v[1] + v[2] + v[3]) % 2


def edge_coloring(gG: ReplicationGraph):
    """Proper 108-edge-colouring oracle ``color(x, y) -> 0..107``.

    Colour = (layer parity of the lower end, displacement, (i, j)).  It is
    proper only when the layer count M^3 is even; otherwise the wrap edges
    between the last layer and layer 0 join two even layers.
    """
    if not isinstance(gG, ReplicationGraph):
        raise GraphError("edge_coloring expects a ReplicationGraph")
    if gG.layers % 2:
        raise GraphError("108-colouring needs an even number of layers (M even)")

    def color(x, y):
        lo, hi, disp = gG.orient(x, y)
        return ((lo[0] % 2) * 6 + DISPLACEMENTS.index(disp)) * 9 + lo[4] * 3 + hi[4]

    return color


def color_of(layer_parity: int, disp, i: int, j: int) -> int:
    return (layer_parity * 6 + DISPLACEMENTS.index(disp)) * 9 + i * 3 + j


def decode_color(m: int):
    """Inverse of ``color_of``: ``(layer_parity, (axis, sign), i, j)``."""
    rest, ij = divmod(m, 9)
    lp, d = divmod(rest, 6)
    return lp, DISPLACEMENTS[d], ij // 3, ij % 3


# ---------------------------------------------------------------- explicit


class Explicit(GraphFamily):
    """Undirected graph given by adjacency lists over hashable vertices."""

    def __init__(self, adj: dict, name: str = "explicit"):
        self.adj = {v: list(ns) for v, ns in adj.items()}
        self.name = name
        for v, ns in self.adj.items():
            for w in ns:
                if w not in self.adj or v not in self.adj[w]:
                    raise GraphError(f"adjacency not symmetric at {v!r} -- {w!r}")
                if w == v:
                    raise GraphError(f"self-loop at {v!r}")
        self._sets = {v: set(ns) for v, ns in self.adj.items()}

    @classmethod
    def from_edges(cls, vertices: Iterable[Hashable], edges: Iterable[tuple], name="explicit"):
        adj = {v: [] for v in vertices}
        for u, v in edges:
            if v not in adj[u]:
                adj[u].append(v)
                adj[v].append(u)
        return cls(adj, name)

    @classmethod
    def from_networkx(cls, nxg, name="explicit"):
        return cls.from_edges(sorted(nxg.nodes()), nxg.edges(), name)

    def is_vertex(self, v):
        try:
            return v in self.adj
        except TypeError:
            return False

    def neighbors(self, v):
        return list(self.adj[v])

    def key_adjacent(self, a, b):
        return b in self._sets[a]

    def vertices(self):
        return iter(self.adj)

    def num_vertices(self):
        return len(self.adj)


def complete_graph(n: int) -> Explicit:
    return Explicit.from_edges(range(n), combinations(range(n), 2), f"K{n}")


def path_graph(n: int) -> Explicit:
    return Explicit.from_edges(range(n), [(i, i + 1) for i in range(n - 1)], f"P{n}")


def cycle_graph(n: int) -> Explicit:
    return Explicit.from_edges(range(n), [(i, (i + 1) % n) for i in range(n)], f"C{n}")


def random_regular(d: int, n: int, seed: int) -> Explicit:
    """Seeded random d-regular graph (used in place of explicit expanders)."""
    import networkx as nx

    return Explicit.from_networkx(nx.random_regular_graph(d, n, seed=seed), f"rr{d}_{n}_{seed}")


def random_bounded_degree(n: int, max_deg: int, n_edges: int, rng) -> Explicit:
    """Random simple graph on ``range(n)`` with degree at most ``max_deg``."""
    deg = [0] * n
    edges = set()
    attempts = 0
    while len(edges) < n_edges and attempts < 50 * n_edges + 100:
        attempts += 1
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v or deg[u] >= max_deg or deg[v] >= max_deg:
            continue
        e = (min(u, v), max(u, v))
        if e in edges:
            continue
        edges.add(e)
        deg[u] += 1
        deg[v] += 1
    return Explicit.from_edges(range(n), sorted(edges), f"rb{n}")


# ---------------------------------------------------------------- Hamiltonian paths


def gray_code(k: int) -> list[int]:
    """Reflected Gray code on k bits (a Hamiltonian cycle of the k-cube)."""
    return [i ^ (i >> 1) for i in range(1 << k)]


def gray_rank(g: int) -> int:
    """Inverse of the reflected Gray code."""
    r = 0
    while g:
        r ^= g
        g >>= 1
    return r


def grid_cycle(a: int, b: int) -> list[tuple[int, int]]:
    """Hamiltonian cycle of the a x b grid, starting at (0, 0), not closed."""
    if a < 2 or b < 2:
        raise GraphError("grid cycle needs both sides >= 2")
    if a % 2 and b % 2:
        raise GraphError(f"{a}x{b} grid has no Hamiltonian cycle (both sides odd)")
    if a % 2:
        return [(r, c) for c, r in grid_cycle(b, a)]
    out = [(0, 0)]
    for r in range(a):
        cols = range(1, b) if r % 2 == 0 else range(b - 1, 0, -1)
        out.extend((r, c) for c in cols)
    out.extend((r, 0) for r in range(a - 1, 0, -1))
    return out


def grid_path(a: int, b: int) -> list[tuple[int, int]]:
    """Serpentine Hamiltonian path of the a x b grid."""
    out = []
    for r in range(a):
        cols = range(b) if r % 2 == 0 else range(b - 1, -1, -1)
        out.extend((r, c) for c in cols)
    return out


def hamiltonian_path(kind: str, *params, cycle: bool = False) -> list:
    """Hamiltonian path (or closed cycle, last entry repeating the first).

    ``kind`` is ``"hypercube"`` with one parameter k (codes as bit strings,
    most significant bit first) or ``"grid2d"`` with parameters (a, b).
    """
    if kind == "hypercube":
        (k,) = params
        seq = [format(g, f"0{k}b") for g in gray_code(k)]
    elif kind == "grid2d":
        a, b = params
        seq = grid_cycle(a, b) if cycle else grid_path(a, b)
    else:
        raise GraphError(f"unknown Hamiltonian path kind {kind!r}")
    if cycle:
        seq = seq + [seq[0]]
    return seq
