"""Vertex-isolated edge-disjoint (VIED) embeddings.

An embedding of G into H is an injective vertex map phi plus, for every
edge {u, v} of G, a simple H-path chi(u, v) from phi(u) to phi(v) such that

* interiors of distinct paths are disjoint, and
* every vertex of chi(w, w') is at H-distance >= 2 from phi(v) whenever v is
  not an endpoint of {w, w'}.

Embeddings are stored in the target's *key* space (ints for the families
used here) and decoded to vertex codes on demand.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable

from .graphs import (
    DISPLACEMENTS,
    Explicit,
    GraphError,
    GraphFamily,
    Grid,
    Hypercube,
    OddGraph,
    ReplicationGraph,
    color_of,
    decode_color,
    gray_code,
    gray_rank,
    grid_cycle,
    parity,
)
from .search import VetoLSInstance


@dataclass
class VIEDEmbedding:
    source: GraphFamily
    target: GraphFamily
    phi_key: Callable
    chi_keys: Callable
    name: str = "embedding"
    edge_iter: Callable | None = None

    def phi(self, v):
        return self.target.from_key(self.phi_key(v))

    def chi(self, e):
        return [self.target.from_key(k) for k in self.chi_keys(e)]

    def vertices(self):
        return self.source.vertices()

    def edges(self):
        return self.edge_iter() if self.edge_iter else self.source.edges()


def explicit_embedding(source: GraphFamily, target: GraphFamily, phi: dict, chi: dict,
                       name="explicit") -> VIEDEmbedding:
    """Embedding from explicit tables of vertex codes.

    ``chi`` maps an edge ``(u, v)`` to the code list from phi(u) to phi(v);
    lookups in the opposite orientation return the reversed path.
    """
    phik = {v: target.key(c) for v, c in phi.items()}
    chik = {e: [target.key(c) for c in p] for e, p in chi.items()}

    def chi_keys(e):
        u, v = e
        if (u, v) in chik:
            return chik[(u, v)]
        if (v, u) in chik:
            return chik[(v, u)][::-1]
        raise KeyError(f"no path for edge {e!r}")

    return VIEDEmbedding(source, target, phik.__getitem__, chi_keys, name,
                         edge_iter=lambda: iter(list(chik)))


# ---------------------------------------------------------------- verifier


@dataclass
class VIEDReport:
    ok: bool
    kind: str | None = None
    witness: object = None
    vertices: int = 0
    edges: int = 0
    path_vertices: int = 0
    mode: str = "exhaustive"
    detail: str = ""

    def as_record(self) -> dict:
        return {
            "ok": self.ok,
            "violation": self.kind,
            "witness": repr(self.witness) if self.witness is not None else None,
            "vertices": self.vertices,
            "edges": self.edges,
            "path_vertices": self.path_vertices,
            "mode": self.mode,
        }


def verify_vied(emb: VIEDEmbedding, sample: int | None = None, seed=0) -> VIEDReport:
    """Check all four VIED properties using only the target's key oracles.

    ``sample`` restricts the path checks to a seeded subset of edges; in that
    mode disjointness is only certified among the sampled paths.
    """
    H = emb.target
    rep = VIEDReport(ok=True, mode="exhaustive" if sample is None else f"sampled({sample})")

    # injectivity, and the radius-1 ball of every image vertex
    owner = {}
    ball = {}
    for v in emb.vertices():
        k = emb.phi_key(v)
        if k in owner:
            return _fail(rep, "injectivity", (owner[k], v), "two vertices share an image")
        owner[k] = v
        rep.vertices += 1
    for k, v in owner.items():
        for x in [k] + list(H.key_neighbors(k)):
            prev = ball.get(x)
            if prev is None:
                ball[x] = v
            elif isinstance(prev, list):
                prev.append(v)
            else:
                ball[x] = [prev, v]

    edges = emb.edges()
    if sample is not None:
        edges = list(edges)
        rng = random.Random(seed)
        edges = rng.sample(edges, min(sample, len(edges)))

    used = set()
    for e in edges:
        u, v = e
        path = emb.chi_keys(e)
        rep.edges += 1
        rep.path_vertices += len(path)
        if not path or path[0] != emb.phi_key(u) or path[-1] != emb.phi_key(v):
            return _fail(rep, "path_endpoints", e, "path does not join phi(u) to phi(v)")
        for a, b in zip(path, path[1:]):
            if not H.key_adjacent(a, b):
                return _fail(rep, "path_adjacency", (e, H.from_key(a), H.from_key(b)),
                             "consecutive path vertices are not adjacent")
        if len(set(path)) != len(path):
            return _fail(rep, "path_simple", e, "path repeats a vertex")
        for x in path[1:-1]:
            if x in used:
                other = _find_path_owner(emb, edges, x, e)
                return _fail(rep, "edge_disjoint", (H.from_key(x), other, e),
                             "interior vertex shared by two paths")
            used.add(x)
        for x in path:
            o = ball.get(x)
            if o is None:
                continue
            for w in (o if isinstance(o, list) else (o,)):
                if w != u and w != v:
                    return _fail(rep, "vertex_isolation", (w, e, H.from_key(x)),
                                 "path vertex within distance 1 of a non-incident image")
    return rep


def _fail(rep, kind, witness, detail):
    rep.ok = False
    rep.kind = kind
    rep.witness = witness
    rep.detail = detail
    return rep


def _find_path_owner(emb, edges, x, exclude):
    for e in (edges if isinstance(edges, list) else emb.edges()):
        if e != exclude and x in emb.chi_keys(e)[1:-1]:
            return e
    return None


# ---------------------------------------------------------------- transfer


def transfer_vetols(emb: VIEDEmbedding, inst: VetoLSInstance, report: VIEDReport | None = None
                    ) -> VetoLSInstance:
    """Move a VetoLS instance along a verified embedding.

    Values are scaled by L = lcm of all path lengths; the k-th vertex of the
    path from phi(u) to phi(v) (length l) gets ((l-k) f(u) + k f(v)) L / l.
    Vertices outside the image get 0 and are invalid.
    """
    if report is None:
        report = verify_vied(emb)
    if not report.ok or report.mode != "exhaustive":
        raise ValueError(f"embedding not verified: {report.kind} {report.detail}")
    G, H = emb.source, emb.target
    for u, v in emb.edges():
        if inst.f(u) == inst.f(v):
            raise ValueError(f"equal values on adjacent vertices {u!r}, {v!r}")
    paths = {e: emb.chi_keys(e) for e in emb.edges()}
    L = 1
    for p in paths.values():
        L = math.lcm(L, len(p) - 1)
    vals, valid = {}, set()
    for v in G.vertices():
        k = emb.phi_key(v)
        vals[k] = L * inst.f(v)
        if inst.valid(v):
            valid.add(k)
    for (u, v), p in paths.items():
        l = len(p) - 1
        fu, fv = inst.f(u), inst.f(v)
        both = inst.valid(u) and inst.valid(v)
        for k in range(1, l):
            vals[p[k]] = ((l - k) * fu + k * fv) * (L // l)
            if both:
                valid.add(p[k])

    def f(x):
        return vals.get(H.key(x), 0)

    def is_valid(x):
        return H.key(x) in valid

    out = VetoLSInstance(H, f, is_valid, inst.W * L)
    out.scale = L
    return out


# ---------------------------------------------------------------- replication graph


REPLICATION_CODE = (0b000, 0b011, 0b101)
"""Even-weight 3-bit codes of the replication index (pairwise distance 2)."""


def replication_steps(i: int, j: int) -> list[int]:
    """Code states from c(i) to c(j), flipping differing bits low first."""
    state = REPLICATION_CODE[i]
    out = [state]
    diff = state ^ REPLICATION_CODE[j]
    for t in range(3):
        if diff >> t & 1:
            state ^= 1 << t
            out.append(state)
    return out


class ReplicationEmbedding(VIEDEmbedding):
    """Block-structured embedding of ReplicationGraph(M) (hypercube or grid).

    The target key is split into: a code of k1 along a Hamiltonian cycle, codes
    of k2, k3, k4 along Hamiltonian cycles, a 3-bit replication code, a parity
    bit, 108 edge bits and a 3-bit counter C (values written as numbers).
    The edge of colour m from layer k to layer k+1 is routed as: set edge
    bit m; C = 001; advance k1; C = 011; move the displaced coordinate;
    C = 111; rewrite the replication code; C = 110, 100, 000; clear edge
    bit m.
    """

    def __init__(self, M, target, enc1, encs, masks, b5_off, p_off, e_off, c_off, name):
        self.M = M
        self.G = ReplicationGraph(M)
        self.enc1 = enc1
        self.encs = encs
        self.inv1 = {c: k for k, c in enumerate(enc1)}
        self.invs = [{c: k for k, c in enumerate(e)} for e in encs]
        self.masks = masks
        self.b5_off, self.p_off, self.e_off, self.c_off = b5_off, p_off, e_off, c_off
        super().__init__(self.G, target, self._phi, self._chi, name)

    def _phi(self, v):
        k1, k2, k3, k4, i = v
        return (self.enc1[k1] | self.encs[0][k2] | self.encs[1][k3] | self.encs[2][k4]
                | REPLICATION_CODE[i] << self.b5_off | parity(v) << self.p_off)

    def color(self, lo, hi, disp):
        return color_of(lo[0] % 2, disp, lo[4], hi[4])

    def _chi(self, e):
        x, y = e
        lo, hi, (ax, s) = self.G.orient(x, y)
        m = self.color(lo, hi, (ax, s))
        L, M = self.G.layers, self.M
        eb, c = 1 << (self.e_off + m), self.c_off
        key = self._phi(lo)
        path = [key]

        def step(delta):
            nonlocal key
            key ^= delta
            path.append(key)

        step(eb)
        step(1 << c)
        step(self.enc1[lo[0]] ^ self.enc1[(lo[0] + 1) % L])
        step(1 << (c + 1))
        enc = self.encs[ax - 1]
        step(enc[lo[ax]] ^ enc[(lo[ax] + s) % M])
        step(1 << (c + 2))
        states = replication_steps(lo[4], hi[4])
        for a, b in zip(states, states[1:]):
            step((a ^ b) << self.b5_off)
        step(1 << c)
        step(1 << (c + 1))
        step(1 << (c + 2))
        step(eb)
        return path if lo == x else path[::-1]

    def decode_prev(self, key):
        """Previous vertex on the (lower to upper) path through an interior key."""
        E = (key >> self.e_off) & ((1 << 108) - 1)
        if E.bit_count() != 1:
            raise ValueError("not an interior path vertex")
        m = E.bit_length() - 1
        lp, (ax, s), i, j = decode_color(m)
        c = self.c_off
        C = (key >> c) & 7
        k1 = self.inv1[key & self.masks[0]]
        ks = [self.invs[t][key & self.masks[t + 1]] for t in range(3)]
        P = (key >> self.p_off) & 1
        enc_par = (k1 + sum(ks)) % 2
        L, M = self.G.layers, self.M
        if C == 0b000:
            if k1 % 2 == lp:
                return key ^ (1 << (self.e_off + m))
            return key ^ (1 << (c + 2))
        if C == 0b001:
            if k1 % 2 == lp:
                return key ^ (1 << c)
            return key ^ self.enc1[k1] ^ self.enc1[(k1 - 1) % L]
        if C == 0b011:
            if enc_par != P:
                return key ^ (1 << (c + 1))
            enc = self.encs[ax - 1]
            ka = ks[ax - 1]
            return key ^ enc[ka] ^ enc[(ka - s) % M]
        if C == 0b111:
            states = replication_steps(i, j)
            b5 = (key >> self.b5_off) & 7
            t = states.index(b5)
            if t == 0:
                return key ^ (1 << (c + 2))
            return key ^ ((states[t] ^ states[t - 1]) << self.b5_off)
        if C == 0b110:
            return key ^ (1 << c)
        if C == 0b100:
            return key ^ (1 << (c + 1))
        raise ValueError(f"counter state {C:03b} never occurs")


def _power_of_two_exponent(M):
    if M < 1 or M & (M - 1):
        raise GraphError(f"M={M} is not a power of two")
    return M.bit_length() - 1


def embed_G_hypercube(M: int) -> ReplicationEmbedding:
    """ReplicationGraph(M) into Hypercube(6c+115), M = 2^c with c >= 2."""
    c = _power_of_two_exponent(M)
    if c < 2:
        raise GraphError("hypercube embedding needs M = 2^c with c >= 2")
    g1 = gray_code(3 * c)
    gc = gray_code(c)
    enc1 = g1
    encs = [[g << (3 * c + t * c) for g in gc] for t in range(3)]
    masks = [(1 << 3 * c) - 1] + [((1 << c) - 1) << (3 * c + t * c) for t in range(3)]
    b5 = 6 * c
    p = b5 + 3
    e = p + 1
    cnt = e + 108
    n = cnt + 3
    return ReplicationEmbedding(M, Hypercube(n), enc1, encs, masks, b5, p, e, cnt,
                                f"replication({M})->hypercube({n})")


def grid_embedding_shape(M: int) -> list[int]:
    s = math.isqrt(M)
    if s * s != M or s % 2 or s < 2:
        raise GraphError(f"grid embedding needs M = s^2 with s even (got M={M})")
    return [s ** 3, s ** 3] + [s] * 6 + [2] * (3 + 1 + 108 + 3)


def embed_G_grid(M: int) -> ReplicationEmbedding:
    """ReplicationGraph(M) into [M^1.5]^2 x [M^0.5]^6 x [2]^115."""
    dims = grid_embedding_shape(M)
    s = math.isqrt(M)
    H = Grid(dims)
    off = H.offsets
    cyc1 = grid_cycle(s ** 3, s ** 3)
    enc1 = [(r << off[0]) | (q << off[1]) for r, q in cyc1]
    cyc = grid_cycle(s, s)
    encs = [[(r << off[2 + 2 * t]) | (q << off[3 + 2 * t]) for r, q in cyc] for t in range(3)]
    masks = [H._masks[0] | H._masks[1]] + [H._masks[2 + 2 * t] | H._masks[3 + 2 * t] for t in range(3)]
    b5, p, e, cnt = off[8], off[11], off[12], off[120]
    return ReplicationEmbedding(M, H, enc1, encs, masks, b5, p, e, cnt,
                                f"replication({M})->grid({len(dims)} axes)")


# ---------------------------------------------------------------- hypercube into odd graph


def embed_hyp_odd(n: int) -> VIEDEmbedding:
    """Hypercube(n) into OddGraph(n+2) via S -> S u (S^c + n+1)."""
    if n < 1:
        raise GraphError("n must be positive")
    G, H = Hypercube(n), OddGraph(n + 2)
    full = (1 << (n + 1)) - 1
    top = 1 << (2 * n + 2)

    def phi2(s):
        return s | ((full ^ s) << (n + 1))

    def chi(e):
        u, v = e
        a, b = (u, v) if u < v else (v, u)
        i = (a ^ b).bit_length() - 1
        mid = ((full ^ a) & ~(1 << i)) | (a << (n + 1)) | top
        path = [phi2(a), mid, phi2(b)]
        return path if a == u else path[::-1]

    return VIEDEmbedding(G, H, phi2, chi, f"hypercube({n})->odd({n + 2})")


# ---------------------------------------------------------------- degree-4 graphs into the 3D grid


def _hookup(j: int, r: int) -> list[tuple]:
    x = 4 * j
    if r == 0:
        return [(x, 0, 0), (x, 1, 0)]
    if r == -1:
        return [(x, 0, 0), (x - 1, 0, 0), (x - 1, 1, 0)]
    if r == 1:
        return [(x, 0, 0), (x + 1, 0, 0), (x + 1, 1, 0)]
    if r == 2:
        return [(x, 0, 0), (x, -1, 0), (x + 1, -1, 0), (x + 2, -1, 0), (x + 2, 0, 0), (x + 2, 1, 0)]
    raise ValueError(r)


def embed_deg4_grid3d(g: GraphFamily) -> VIEDEmbedding:
    """Degree-<=4 graph on N vertices into a 4N x (2N+2) x 2 grid.

    Vertex number j (1-based, in enumeration order) sits at (4j, 0, 0) and
    owns the four terminal columns x = 4j-1 .. 4j+2.  Edge number i uses row
    y = i: it climbs its terminal column at z = 0, crosses at z = 1 and
    descends the other terminal column.
    """
    verts = list(g.vertices())
    N = len(verts)
    if any(g.degree(v) > 4 for v in verts):
        raise GraphError("embed_deg4_grid3d needs maximum degree <= 4")
    num = {v: j + 1 for j, v in enumerate(verts)}
    H = Grid((4 * max(N, 1), 2 * max(N, 1) + 2, 2), lo=(3, -1, 0))
    edges = sorted((min(num[u], num[v]), max(num[u], num[v])) for u, v in g.edges())
    used = {j: 0 for j in num.values()}
    paths, slots = {}, {}
    for i, (j, k) in enumerate(edges, start=1):
        rj, rk = used[j] - 1, used[k] - 1
        used[j] += 1
        used[k] += 1
        xj, xk = 4 * j + rj, 4 * k + rk
        p = _hookup(j, rj)
        p += [(xj, y, 0) for y in range(2, i + 1)]
        p.append((xj, i, 1))
        step = 1 if xk > xj else -1
        p += [(x, i, 1) for x in range(xj + step, xk + step, step)]
        p.append((xk, i, 0))
        p += [(xk, y, 0) for y in range(i - 1, 0, -1)]
        p += _hookup(k, rk)[::-1][1:]
        paths[(verts[j - 1], verts[k - 1])] = [H.key(c) for c in p]
        slots[(verts[j - 1], verts[k - 1])] = (rj, rk)

    def chi_keys(e):
        u, v = e
        if (u, v) in paths:
            return paths[(u, v)]
        return paths[(v, u)][::-1]

    def phi_key(v):
        return H.key((4 * num[v], 0, 0))

    emb = VIEDEmbedding(g, H, phi_key, chi_keys, f"{g.name}->grid3d",
                        edge_iter=lambda: iter(list(paths)))
    emb.slots = slots
    return emb


# ---------------------------------------------------------------- sparse (tripled) embedding


def _triple_table():
    tab = []
    for b in range(256):
        t = 0
        for i in range(8):
            if b >> i & 1:
                t |= 0b111 << (3 * i)
        tab.append(t)
    return tab


_TRIPLE = _triple_table()


def triple(x: int) -> int:
    """Replace every bit b by bbb."""
    out, shift = 0, 0
    while x:
        out |= _TRIPLE[x & 0xFF] << shift
        x >>= 8
        shift += 24
    return out


class SparseEmbedding(VIEDEmbedding):
    """The hypercube embedding with every coordinate tripled.

    Hamming distances triple, so paths of independent edges end up at
    distance >= 3 and radius-2 balls meet the image in very few vertices.
    """

    def __init__(self, base: ReplicationEmbedding):
        self.base = base
        self.n_base = base.target.n
        super().__init__(base.source, Hypercube(3 * self.n_base),
                         lambda v: triple(base.phi_key(v)),
                         lambda e: [triple(k) for k in base.chi_keys(e)],
                         f"tripled {base.name}")
        self._image = None

    def base_image(self) -> set:
        """Keys of phi(V) and of every path vertex in the untripled embedding."""
        if self._image is None:
            im = set()
            for v in self.base.vertices():
                im.add(self.base.phi_key(v))
            for e in self.base.edges():
                im.update(self.base.chi_keys(e))
            self._image = im
        return self._image

    def ball_intersection(self, w: int, r: int = 2) -> int:
        """|B_r(w) ∩ Im| in the tripled cube, using the 3-bit block structure.

        A tripled codeword u differs from w in each block t by the number of
        bits of w's block t that disagree with u_t.  Only base points near the
        majority decoding of w can be within distance r.
        """
        im = self.base_image()
        maj, cost0, nonuni, uni = 0, 0, [], []
        for t in range(self.n_base):
            ones = (w >> (3 * t) & 7).bit_count()
            if ones >= 2:
                maj |= 1 << t
            c = min(ones, 3 - ones)
            cost0 += c
            (nonuni if c else uni).append(t)
        budget = r - cost0
        if budget < 0:
            return 0
        count = 0
        for a in range(0, min(budget, len(nonuni)) + 1):
            rest = budget - a
            for flips in combinations(nonuni, a):
                fm = sum(1 << t for t in flips)
                for b in range(0, rest // 3 + 1):
                    for more in combinations(uni, b):
                        u = maj ^ fm ^ sum(1 << t for t in more)
                        if u in im:
                            count += 1
        return count

    def base_ball_intersection(self, x: int, r: int = 2) -> int:
        """Same count in the untripled cube (brute force over the ball)."""
        im = self.base_image()
        n = self.n_base
        count = 0
        for d in range(r + 1):
            for flips in combinations(range(n), d):
                if x ^ sum(1 << t for t in flips) in im:
                    count += 1
        return count


def sparse_embed_G_hypercube(M: int) -> SparseEmbedding:
    return SparseEmbedding(embed_G_hypercube(M))


def ball_intersection(emb: SparseEmbedding, w: int, r: int = 2) -> int:
    return emb.ball_intersection(w, r)
