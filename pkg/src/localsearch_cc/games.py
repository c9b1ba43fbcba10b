"""Normal-form games, exact/ordinal potential checks and the hard games.

Actions are integers ``0..count-1`` and profiles are tuples of actions.
Utilities and potentials are exact integers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Callable

import numpy as np

from .graphs import GraphError, GraphFamily, Hypercube
from .search import SumLSInstance, is_local_max

DEFAULT_CAP = 1 << 22


class GameCapExceeded(RuntimeError):
    pass


@dataclass
class Game:
    n_players: int
    actions: tuple
    utility: Callable
    potential: Callable | None = None
    name: str = "game"
    tables: list | None = None
    best_response: Callable | None = None

    @classmethod
    def from_tables(cls, tables, name="game", potential=None):
        """Game from per-player payoff arrays of shape ``actions``."""
        tabs = [np.asarray(t, dtype=np.int64) for t in tables]
        shape = tabs[0].shape

        def u(i, prof):
            return int(tabs[i][prof])

        pot = None
        if potential is not None:
            ptab = np.asarray(potential, dtype=np.int64)

            def pot(prof):
                return int(ptab[prof])

        return cls(len(tabs), tuple(shape), u, pot, name, tabs)

    def profiles(self, cap=DEFAULT_CAP):
        size = math.prod(self.actions)
        if size > cap:
            raise GameCapExceeded(f"{size} profiles exceed the cap {cap}")
        return product(*[range(k) for k in self.actions])

    def table(self, i, cap=DEFAULT_CAP) -> np.ndarray:
        if self.tables is not None:
            return self.tables[i]
        size = math.prod(self.actions)
        if size > cap:
            raise GameCapExceeded(f"{size} profiles exceed the cap {cap}")
        out = np.empty(self.actions, dtype=np.int64)
        for p in self.profiles(cap):
            out[p] = self.utility(i, p)
        return out


def identical_interest(table) -> Game:
    t = np.asarray(table)
    return Game.from_tables([t, t], "identical", potential=t)


def matching_pennies() -> Game:
    uA = np.array([[1, -1], [-1, 1]])
    return Game.from_tables([uA, -uA], "matching_pennies")


def prisoners_dilemma() -> Game:
    uA = np.array([[3, 0], [5, 1]])
    return Game.from_tables([uA, uA.T], "prisoners_dilemma")


# ---------------------------------------------------------------- exact potential checks


@dataclass
class CycleVerdict:
    exact: bool
    witness: tuple | None = None
    value: int = 0
    equations: int = 0
    mode: str = "exhaustive"
    potential: Callable | None = None


def random_exact_game_2p(N: int, rng, W: int = 8, K: int | None = None) -> Game:
    """u_A = phi + p(b), u_B = phi + q(a): exact by construction."""
    K = N if K is None else K
    phi = np.array([[rng.randint(0, W) for _ in range(K)] for _ in range(N)])
    p = np.array([rng.randint(0, W) for _ in range(K)])
    q = np.array([rng.randint(0, W) for _ in range(N)])
    return Game.from_tables([phi + p[None, :], phi + q[:, None]], "random_exact", potential=phi)


def plant_violation(g: Game, rng) -> Game:
    """Perturb one payoff of one player; no single-cell change stays exact."""
    tabs = [t.copy() for t in g.tables]
    i = rng.randrange(len(tabs))
    cell = tuple(rng.randrange(k) for k in g.actions)
    tabs[i][cell] += rng.choice([-1, 1]) * rng.randint(1, 3)
    return Game.from_tables(tabs, g.name + "+planted")


def cycle_sum_2p(uA, uB, a, a2, b, b2) -> int:
    """Sum of unilateral gains around (a,b) -> (a2,b) -> (a2,b2) -> (a,b2) -> (a,b)."""
    return (
        (uA[a2, b] - uA[a, b]) + (uB[a2, b2] - uB[a2, b])
        + (uA[a, b2] - uA[a2, b2]) + (uB[a, b] - uB[a, b2])
    )


def ms_cycle_check_2p(g: Game, cap=DEFAULT_CAP, method="pivot", samples=10_000, seed=0
                      ) -> CycleVerdict:
    """Decide the four-cycle condition for a two-player game.

    The cycle sum equals D(a2,b) - D(a,b) - D(a2,b2) + D(a,b2) for
    D = uA - uB, so all cycles vanish iff the cycles through (0, 0) do.
    ``method="all"`` enumerates every canonical cycle instead.  Above the
    cap, random cycles are sampled and the verdict is tagged probabilistic.
    """
    if g.n_players != 2:
        raise ValueError("two-player game expected")
    N, K = g.actions
    c = N * (N - 1) // 2 * (K * (K - 1) // 2)
    if N * K > cap:
        rng = random.Random(seed)
        for _ in range(samples):
            a, a2 = sorted(rng.sample(range(N), 2))
            b, b2 = sorted(rng.sample(range(K), 2))
            u = lambda i, x, y: g.utility(i, (x, y))
            s = ((u(0, a2, b) - u(0, a, b)) + (u(1, a2, b2) - u(1, a2, b))
                 + (u(0, a, b2) - u(0, a2, b2)) + (u(1, a, b) - u(1, a, b2)))
            if s:
                return CycleVerdict(False, (a, a2, b, b2), s, c, "probabilistic")
        return CycleVerdict(True, None, 0, c, "probabilistic")
    uA, uB = g.table(0, cap), g.table(1, cap)
    if method == "all":
        for a, a2 in combinations(range(N), 2):
            for b, b2 in combinations(range(K), 2):
                s = int(cycle_sum_2p(uA, uB, a, a2, b, b2))
                if s:
                    return CycleVerdict(False, (a, a2, b, b2), s, c)
    else:
        D = uA - uB
        T = D - D[0:1, :] - D[:, 0:1] + D[0, 0]
        bad = np.argwhere(T != 0)
        if len(bad):
            a2, b2 = (int(x) for x in bad[0])
            s = int(cycle_sum_2p(uA, uB, 0, a2, 0, b2))
            return CycleVerdict(False, (0, a2, 0, b2), s, c)
    phi = uA[:, 0:1] - uA[0, 0] + uB - uB[:, 0:1]
    return CycleVerdict(True, None, 0, c, potential=lambda p: int(phi[p]))


def _mixed(a, b, S):
    """Profile with players in S playing b, the rest playing a."""
    return tuple(b[i] if i in S else a[i] for i in range(len(a)))


def closed_path_sum(g: Game, a, b, up, down) -> int:
    """Gains along a -> b (players switch in order ``up``) -> a (order ``down``)."""
    n = g.n_players
    total = 0
    S = set()
    for k in range(n):
        i = up[k]
        before = _mixed(a, b, S)
        S.add(i)
        total += g.utility(i, _mixed(a, b, S)) - g.utility(i, before)
    S = set()
    for k in range(n):
        i = down[k]
        before = _mixed(b, a, S)
        S.add(i)
        total += g.utility(i, _mixed(b, a, S)) - g.utility(i, before)
    return total


def ms_cycle_check_np(g: Game, cap=200_000, samples=5_000, seed=0) -> CycleVerdict:
    """Check every closed deviation path (a, b, up, down) when few enough."""
    n = g.n_players
    size = math.prod(g.actions)
    perms = list(permutations(range(n)))
    c = size * size * len(perms) ** 2
    if c > cap:
        rng = random.Random(seed)
        for _ in range(samples):
            a = tuple(rng.randrange(k) for k in g.actions)
            b = tuple(rng.randrange(k) for k in g.actions)
            up, down = rng.choice(perms), rng.choice(perms)
            s = closed_path_sum(g, a, b, up, down)
            if s:
                return CycleVerdict(False, (a, b, up, down), s, c, "probabilistic")
        return CycleVerdict(True, None, 0, c, "probabilistic")
    profs = list(g.profiles())
    for a in profs:
        for b in profs:
            for up in perms:
                for down in perms:
                    s = closed_path_sum(g, a, b, up, down)
                    if s:
                        return CycleVerdict(False, (a, b, up, down), s, c)
    return CycleVerdict(True, None, 0, c)


@dataclass
class IdentityReport:
    ok: bool
    counterexample: tuple | None = None
    deviations: int = 0
    mode: str = "exhaustive"


def potential_identity_check(g: Game, potential=None, profiles=None, cap=DEFAULT_CAP
                             ) -> IdentityReport:
    """Check u_i(a_i, a_-i) - u_i(a'_i, a_-i) = phi(a_i, a_-i) - phi(a'_i, a_-i).

    Exhaustively, the identity holds for all pairs iff u_i - phi is constant
    along each player's action line; that is what is checked, and the count
    of covered deviation pairs is reported.  With ``profiles``, every
    unilateral deviation from each given profile is checked directly.
    """
    phi = potential or g.potential
    if phi is None:
        raise ValueError("no potential attached")
    if profiles is not None:
        count = 0
        for p in profiles:
            fp = phi(p)
            for i in range(g.n_players):
                ui = g.utility(i, p)
                for x in range(g.actions[i]):
                    if x == p[i]:
                        continue
                    q = p[:i] + (x,) + p[i + 1:]
                    count += 1
                    if g.utility(i, q) - ui != phi(q) - fp:
                        return IdentityReport(False, (i, p, x), count, "sampled")
        return IdentityReport(True, None, count, "sampled")
    count = 0
    n = g.n_players
    for i in range(n):
        others = [range(k) for j, k in enumerate(g.actions) if j != i]
        ki = g.actions[i]
        for rest in product(*others):
            base = None
            for x in range(ki):
                p = rest[:i] + (x,) + rest[i:]
                d = g.utility(i, p) - phi(p)
                if base is None:
                    base, p0 = d, p
                elif d != base:
                    return IdentityReport(False, (i, p0, x), count)
            count += ki * (ki - 1) // 2
    return IdentityReport(True, None, count)


def nash_check(g: Game, profile):
    """``(True, None)`` or ``(False, (player, action))`` for the first strict improvement."""
    for i in range(g.n_players):
        ui = g.utility(i, profile)
        if g.best_response is not None:
            val, act = g.best_response(i, profile)
            if val > ui:
                return False, (i, act)
            continue
        for x in range(g.actions[i]):
            if x == profile[i]:
                continue
            q = profile[:i] + (x,) + profile[i + 1:]
            if g.utility(i, q) > ui:
                return False, (i, x)
    return True, None


def nash_set(g: Game, cap=DEFAULT_CAP) -> set:
    return {p for p in g.profiles(cap) if nash_check(g, p)[0]}


def better_reply_cycle(g: Game, cap=DEFAULT_CAP):
    """A cycle of strict unilateral improvements, or None when acyclic."""
    profs = list(g.profiles(cap))
    index = {p: r for r, p in enumerate(profs)}
    if g.tables is not None:
        tabs = g.tables
        util = lambda i, p: tabs[i][p]
    else:
        util = g.utility
    succ = []
    for p in profs:
        out = []
        for i in range(g.n_players):
            ui = util(i, p)
            for x in range(g.actions[i]):
                if x != p[i]:
                    q = p[:i] + (x,) + p[i + 1:]
                    if util(i, q) > ui:
                        out.append(index[q])
        succ.append(out)
    color = [0] * len(profs)
    parent = [-1] * len(profs)
    for s in range(len(profs)):
        if color[s]:
            continue
        stack = [(s, 0)]
        color[s] = 1
        while stack:
            x, k = stack[-1]
            if k < len(succ[x]):
                stack[-1] = (x, k + 1)
                y = succ[x][k]
                if color[y] == 0:
                    color[y] = 1
                    parent[y] = x
                    stack.append((y, 0))
                elif color[y] == 1:
                    cyc = [y]
                    z = x
                    while z != y:
                        cyc.append(z)
                        z = parent[z]
                    cyc.reverse()
                    cyc = [cyc[-1]] + cyc[:-1]
                    return [profs[t] for t in [y] + [t for t in cyc if t != y]]
            else:
                color[x] = 2
                stack.pop()
    return None


def has_better_reply_cycle_2p_batch(UA, UB) -> np.ndarray:
    """Cycle existence for a batch of two-player games, shape (G, N, K).

    Profiles without a strictly improving move to a surviving profile are
    peeled off until nothing changes; the improvement digraph is acyclic
    iff every profile gets peeled.
    """
    UA = np.asarray(UA)
    UB = np.asarray(UB)
    G, N, K = UA.shape
    betterA = UA[:, :, None, :] > UA[:, None, :, :]   # [g, a2, a, b]: a -> a2 improves
    betterB = UB[:, :, :, None] > UB[:, :, None, :]   # [g, a, b2, b]: b -> b2 improves
    alive = np.ones((G, N, K), dtype=bool)
    while True:
        outA = (betterA & alive[:, :, None, :]).any(axis=1)
        outB = (betterB & alive[:, :, :, None]).any(axis=2)
        nxt = alive & (outA | outB)
        if (nxt == alive).all():
            return alive.any(axis=(1, 2))
        alive = nxt


# ---------------------------------------------------------------- ordinal gadgets


def gadget_2x2(x: int, y: int) -> Game:
    """[[(2,1),(1,2)],[(1,y),(x,1)]]: a better-reply cycle iff x = y = 2."""
    uA = np.array([[2, 1], [1, x]])
    uB = np.array([[1, 2], [y, 1]])
    return Game.from_tables([uA, uB], f"gadget({x},{y})")


def build_ordinal_gadget_2p(X, Y) -> Game:
    """2N x 2N game: block (i, j) is gadget(X[i][j], Y[i][j]) plus (3(i+1), 3(j+1))."""
    X, Y = np.asarray(X), np.asarray(Y)
    N = X.shape[0]
    if not np.isin(X, (0, 2)).all() or not np.isin(Y, (0, 2)).all():
        raise ValueError("gadget parameters must lie in {0, 2}")
    uA = np.zeros((2 * N, 2 * N), dtype=np.int64)
    uB = np.zeros((2 * N, 2 * N), dtype=np.int64)
    for a in range(2 * N):
        for b in range(2 * N):
            i, r = divmod(a, 2)
            j, c = divmod(b, 2)
            x, y = X[i, j], Y[i, j]
            ga = ((2, 1), (1, x))[r][c]
            gb = ((1, 2), (y, 1))[r][c]
            uA[a, b] = ga + 3 * (a // 2 + 1)
            uB[a, b] = gb + 3 * (b // 2 + 1)
    return Game.from_tables([uA, uB], "ordinal_gadget_2p")


def ordinal_gadget_tables_2p_batch(Xs, Ys):
    """Payoff tables of build_ordinal_gadget_2p for a batch (G, N, N) of inputs."""
    Xs, Ys = np.asarray(Xs), np.asarray(Ys)
    N = Xs.shape[1]
    a = np.arange(2 * N)
    blk, r = a // 2, a % 2
    x = Xs[:, blk[:, None], blk[None, :]]
    y = Ys[:, blk[:, None], blk[None, :]]
    R, C = r[:, None], r[None, :]
    ga = np.where((R == 0) & (C == 0), 2, np.where((R == 1) & (C == 1), x, 1))
    gb = np.where((R == 0) & (C == 1), 2, np.where((R == 1) & (C == 0), y, 1))
    return ga + 3 * (blk[:, None] + 1), gb + 3 * (blk[None, :] + 1)


def build_ordinal_gadget_np(x, y, n: int, cap: int = 16) -> Game:
    """n + 2 players: the first n get a_i; the last two play gadget(x(a), y(a))."""
    if n > cap:
        raise GameCapExceeded(f"n={n} above cap {cap}")
    shape = (2,) * (n + 2)
    tabs = [np.zeros(shape, dtype=np.int64) for _ in range(n + 2)]
    for p in product(range(2), repeat=n + 2):
        a = p[:n]
        for i in range(n):
            tabs[i][p] = p[i]
        xa, ya = x(a), y(a)
        if xa not in (0, 2) or ya not in (0, 2):
            raise ValueError("gadget parameters must lie in {0, 2}")
        r, c = p[n], p[n + 1]
        tabs[n][p] = ((2, 1), (1, xa))[r][c]
        tabs[n + 1][p] = ((1, 2), (ya, 1))[r][c]
    return Game.from_tables(tabs, "ordinal_gadget_np")


# ---------------------------------------------------------------- two-player hard game


class TwoPlayerGame(Game):
    """Both players choose (v, x) in V x [W]^5: a vertex and reported values
    for it and its (up to four) neighbours.  Action (v, x) is encoded as
    ``rank(v) * W^5 + sum (x_t - 1) W^(4-t)``.

    Pure equilibria are the truthful pairs (v, v) with v a local maximum
    when adjacent sums are distinct; with ties, truthful pairs at adjacent
    equal-sum vertices can be stable too.
    """

    def __init__(self, inst: SumLSInstance, W: int | None = None, allow_lower_degree=False):
        g = inst.graph
        self.inst = inst
        self.verts = list(g.vertices())
        self.rank = {v: r for r, v in enumerate(self.verts)}
        self.nbrs = []
        for v in self.verts:
            ns = sorted(g.neighbors(v), key=self.rank.__getitem__)
            if len(ns) > 4 or (len(ns) < 4 and not allow_lower_degree):
                raise GraphError(f"two-player game needs a 4-regular graph ({v!r} has degree {len(ns)})")
            self.nbrs.append([self.rank[w] for w in ns])
        self.fA = [inst.f_A(v) for v in self.verts]
        self.fB = [inst.f_B(v) for v in self.verts]
        self.W = W if W is not None else inst.W
        W = self.W
        if min(self.fA + self.fB) < 1 or max(self.fA + self.fB) > W:
            raise ValueError("potentials must lie in [1, W]")
        N = len(self.verts)
        self.N = N
        self.adj = [[False] * N for _ in range(N)]
        for r in range(N):
            self.adj[r][r] = True
            for s in self.nbrs[r]:
                self.adj[r][s] = True
        self.truth = [self._truth(r, self.fA) for r in range(N)]
        self.truthB = [self._truth(r, self.fB) for r in range(N)]
        size = N * W ** 5
        super().__init__(2, (size, size), self._utility, self._potential, "game2p",
                         best_response=self._best_response)

    def _truth(self, r, f):
        ns = self.nbrs[r]
        return (f[r],) + tuple(f[s] for s in ns) + (1,) * (4 - len(ns))

    def encode(self, r, x):
        W = self.W
        code = r
        for t in range(5):
            code = code * W + (x[t] - 1)
        return code

    def decode(self, code):
        W = self.W
        xs = []
        for _ in range(5):
            code, d = divmod(code, W)
            xs.append(d + 1)
        return code, tuple(reversed(xs))

    def val(self, r, x, s):
        """Valuation of vertex s induced by report x about vertex r."""
        if s == r:
            return x[0]
        ns = self.nbrs[r]
        for t, q in enumerate(ns):
            if q == s:
                return x[t + 1]
        return 0

    def _utility(self, i, prof):
        v, x = self.decode(prof[0])
        w, y = self.decode(prof[1])
        W4 = 4 * self.W
        shared = W4 * self.adj[v][w] + self.val(w, y, v) + self.val(v, x, w)
        if i == 0:
            return shared + W4 * (x == self.truth[v]) + self.fA[v]
        return shared + W4 * (y == self.truthB[w]) + self.fB[w]

    def _potential(self, prof):
        v, x = self.decode(prof[0])
        w, y = self.decode(prof[1])
        W4 = 4 * self.W
        return (W4 * self.adj[v][w] + W4 * (x == self.truth[v]) + W4 * (y == self.truthB[w])
                + self.val(w, y, v) + self.val(v, x, w) + self.fA[v] + self.fB[w])

    def _best_response(self, i, prof):
        """Exact best reply: for each vertex the truthful report is optimal,
        since a misreport forfeits 4W and gains at most W."""
        best = None
        other = self.decode(prof[1 - i])
        for r in range(self.N):
            x = self.truth[r] if i == 0 else self.truthB[r]
            code = self.encode(r, x)
            p = (code, prof[1]) if i == 0 else (prof[0], code)
            u = self._utility(i, p)
            if best is None or u > best[0]:
                best = (u, code)
        return best

    def truthful_profile(self, v, w=None):
        r = self.rank[v]
        s = self.rank[w] if w is not None else r
        return (self.encode(r, self.truth[r]), self.encode(s, self.truthB[s]))

    # vectorised utilities for exhaustive scans -------------------------------

    def _arrays(self):
        W, N = self.W, self.N
        size = N * W ** 5
        codes = np.arange(size)
        r = codes // W ** 5
        xs = np.empty((size, 5), dtype=np.int64)
        rest = codes % W ** 5
        for t in range(4, -1, -1):
            xs[:, t] = rest % W + 1
            rest //= W
        adj = np.array(self.adj, dtype=np.int64)
        VX = np.zeros((size, N), dtype=np.int64)
        VX[codes, r] = xs[:, 0]
        nb = np.array([ns + [-1] * (4 - len(ns)) for ns in self.nbrs])
        for t in range(4):
            tgt = nb[r, t]
            ok = tgt >= 0
            VX[codes[ok], tgt[ok]] = xs[ok, t + 1]
        tA = np.all(xs == np.array(self.truth)[r], axis=1).astype(np.int64)
        tB = np.all(xs == np.array(self.truthB)[r], axis=1).astype(np.int64)
        return r, VX, tA, tB, adj

    def dense_block(self, lo, hi):
        """Utilities and potential for all rows and columns lo..hi-1 (int64)."""
        if getattr(self, "_dense", None) is None:
            self._dense = self._arrays()
        r, VX, tA, tB, adj = self._dense
        W4 = 4 * self.W
        fA = np.array(self.fA)[r]
        fB = np.array(self.fB)[r]
        cols = np.arange(lo, hi)
        shared = W4 * adj[r[:, None], r[None, cols]] + VX[cols][:, r].T + VX[:, r[cols]]
        ownA = (W4 * tA + fA)[:, None]
        ownB = (W4 * tB[cols] + fB[cols])[None, :]
        return shared + ownA, shared + ownB, shared + ownA + ownB

    def dense_scan(self, chunk=256):
        """Exhaustive scan of all profiles in column chunks.

        Returns ``(identity_ok, deviations, nash)`` where ``identity_ok``
        says u_i - phi is constant along every unilateral action line and
        ``nash`` is the set of pure Nash equilibria as code pairs.
        """
        size = self.actions[0]
        rowmax = np.full(size, np.iinfo(np.int64).min)
        rowlo = np.full(size, np.iinfo(np.int64).max)
        rowhi = np.full(size, np.iinfo(np.int64).min)
        colmax = np.empty(size, dtype=np.int64)
        ok = True
        for lo in range(0, size, chunk):
            hi = min(size, lo + chunk)
            UA, UB, PHI = self.dense_block(lo, hi)
            DA = UA - PHI
            if not (DA.min(axis=0) == DA.max(axis=0)).all():
                ok = False
            DB = UB - PHI
            rowlo = np.minimum(rowlo, DB.min(axis=1))
            rowhi = np.maximum(rowhi, DB.max(axis=1))
            colmax[lo:hi] = UA.max(axis=0)
            rowmax = np.maximum(rowmax, UB.max(axis=1))
        ok = ok and bool((rowlo == rowhi).all())
        nash = set()
        for lo in range(0, size, chunk):
            hi = min(size, lo + chunk)
            UA, UB, _ = self.dense_block(lo, hi)
            hit = (UA == colmax[None, lo:hi]) & (UB == rowmax[:, None])
            for a, b in np.argwhere(hit):
                nash.add((int(a), int(b) + lo))
        deviations = 2 * size * (size * (size - 1) // 2)
        return ok, deviations, nash


def build_game_2p(sumls: SumLSInstance, W: int | None = None, allow_lower_degree=False
                  ) -> TwoPlayerGame:
    return TwoPlayerGame(sumls, W, allow_lower_degree)


# ---------------------------------------------------------------- binary-action hard game


def priority_constants(n: int, W: int) -> tuple:
    """(k1, ..., k6) for report length m and b = ceil(log2 W) bits."""
    b = max(1, (W - 1).bit_length())
    return (8 * W * n ** 8 * b * b, 8 * W * n ** 5 * b * b, 8 * W * n ** 3 * b,
            2 * n ** 3 * b, 2 * n ** 2 * b, 1)


def priority_margins(n: int, W: int) -> list[int]:
    """Gain minus worst lower-level loss for each level's designated flip.

    Level 1 flips a bit of v toward w, level 2 a bit of the vertex list,
    level 3 a value bit, level 4 moves v to the better neighbour with exact
    radius-2 reports (the list then misses C(n-1, 2) vertices of the new
    ball, each at distance 1), level 5 a vertex-list bit, level 6 a value bit.
    """
    k1, k2, k3, k4, k5, k6 = priority_constants(n, W)
    b = max(1, (W - 1).bit_length())
    m = 1 + n + n * (n - 1) // 2
    vmax = (1 << b) - 1
    return [
        k1 - (k2 * (n + 1) + k3 * 2 * (n + 1) * b + k4 * 2 * vmax + k5 * m),
        k2 - (k3 * 2 * b + k4 * vmax + k5 + b),
        k3 - (k4 * vmax + 1),
        k4 - k5 * ((n - 1) * (n - 2) // 2),
        k5 - b,
        k6,
    ]


class BinaryGame(Game):
    """2(n + m(n+b)) binary players built from SumLS on Hypercube(n).

    Player layout (Alice then Bob): n vertex bits, m*n list bits (slot by
    slot), m*b value bits (slot by slot, least significant first).  Values
    of f_A, f_B lie in 0..W-1 so that b = ceil(log2 W) bits suffice.
    """

    def __init__(self, inst: SumLSInstance, W: int | None = None):
        if not isinstance(inst.graph, Hypercube):
            raise GraphError("binary game needs SumLS on a hypercube")
        n = inst.graph.n
        self.inst = inst
        self.n = n
        self.W = W if W is not None else inst.W
        self.b = max(1, (self.W - 1).bit_length())
        self.m = 1 + n + n * (n - 1) // 2
        self.k = priority_constants(n, self.W)
        N = 1 << n
        self.fA = [inst.f_A(v) for v in range(N)]
        self.fB = [inst.f_B(v) for v in range(N)]
        if min(self.fA + self.fB) < 0 or max(self.fA + self.fB) > self.W - 1:
            raise ValueError("binary game expects potentials in 0..W-1")
        self.side = n + self.m * (n + self.b)
        total = 2 * self.side
        super().__init__(total, (2,) * total, self._utility, self._potential, "gamenp")
        self.ball1 = [tuple(sorted([v] + [v ^ (1 << t) for t in range(n)])) for v in range(N)]
        self.ball2 = [tuple(sorted(set(self.ball1[v]) | {v ^ (1 << s) ^ (1 << t)
                                                          for s, t in combinations(range(n), 2)}))
                      for v in range(N)]
        self._dist_cache = {}
        self.decode_side = lru_cache(maxsize=1 << 16)(self._decode_side)
        self.own = lru_cache(maxsize=1 << 16)(self._own)

    # layout ---------------------------------------------------------------

    def group_of(self, player):
        """(side, part, slot, bit) of a player; side 0 = Alice."""
        side, p = divmod(player, self.side)
        n, m, b = self.n, self.m, self.b
        if p < n:
            return side, "v", 0, p
        p -= n
        if p < m * n:
            return side, "xv", p // n, p % n
        p -= m * n
        return side, "xf", p // b, p % b

    def player_index(self, side, part, slot, bit):
        n, m, b = self.n, self.m, self.b
        base = side * self.side
        if part == "v":
            return base + bit
        if part == "xv":
            return base + n + slot * n + bit
        return base + n + m * n + slot * b + bit

    def _decode_side(self, bits):
        n, m, b = self.n, self.m, self.b
        v = sum(bits[t] << t for t in range(n))
        xv = tuple(sum(bits[n + s * n + t] << t for t in range(n)) for s in range(m))
        off = n + m * n
        xf = tuple(sum(bits[off + s * b + t] << t for t in range(b)) for s in range(m))
        return v, xv, xf

    def encode_side(self, v, xv, xf):
        n, b = self.n, self.b
        out = [v >> t & 1 for t in range(n)]
        for x in xv:
            out += [x >> t & 1 for t in range(n)]
        for x in xf:
            out += [x >> t & 1 for t in range(b)]
        return out

    def decode(self, prof):
        s = self.side
        return self.decode_side(tuple(prof[:s])) + self.decode_side(tuple(prof[s:]))

    def encode(self, v, xv, xf, w, yw, yf):
        return tuple(self.encode_side(v, xv, xf) + self.encode_side(w, yw, yf))

    # terms ----------------------------------------------------------------

    def list_distance(self, v, xv, radius):
        """Hamming distance from the list xv to the lists covering B_1(v)
        (radius 1) or listing exactly B_2(v) (radius 2): a min-cost matching
        of ball vertices to list slots."""
        key = (v, xv, radius)
        d = self._dist_cache.get(key)
        if d is None:
            from scipy.optimize import linear_sum_assignment

            ball = self.ball1[v] if radius == 1 else self.ball2[v]
            cost = np.array([[(u ^ x).bit_count() for x in xv] for u in ball])
            rows, cols = linear_sum_assignment(cost)
            d = int(cost[rows, cols].sum())
            if len(self._dist_cache) > 2_000_000:
                self._dist_cache.clear()
            self._dist_cache[key] = d
        return d

    @staticmethod
    def first_slots(xv):
        seen = set()
        out = []
        for i, x in enumerate(xv):
            if x not in seen:
                seen.add(x)
                out.append(i)
        return out

    def value_error(self, xf_i, value):
        return (xf_i ^ value).bit_count()

    def core_errors(self, v, xv, xf, f):
        """Value errors at first appearances of B_1(v) members (level 3)."""
        ball = self.ball1[v]
        return sum(self.value_error(xf[i], f[xv[i]]) for i in self.first_slots(xv) if xv[i] in ball)

    def all_errors(self, xv, xf, f):
        """Value errors over every slot (level 6)."""
        return sum(self.value_error(xf[i], f[xv[i]]) for i in range(self.m))

    @staticmethod
    def val(xv, xf, w):
        for i, x in enumerate(xv):
            if x == w:
                return xf[i]
        return 0

    def far(self, v, w):
        d = (v ^ w).bit_count()
        return d if d >= 2 else 0

    def _own(self, bits, side):
        """Decoded side plus its private level terms (levels 2, 3, 5, 6)."""
        u, lst, vals = self.decode_side(bits)
        f = self.fA if side == 0 else self.fB
        return (u, lst, vals, self.list_distance(u, lst, 1), self.core_errors(u, lst, vals, f),
                self.list_distance(u, lst, 2), self.all_errors(lst, vals, f), f[u])

    def _split(self, prof):
        s = self.side
        return self.own(tuple(prof[:s]), 0), self.own(tuple(prof[s:]), 1)

    def _utility(self, i, prof):
        k1, k2, k3, k4, k5, k6 = self.k
        A, B = self._split(prof)
        v, xv, xf = A[:3]
        w, yw, yf = B[:3]
        shared = -k1 * self.far(v, w) + k4 * (self.val(yw, yf, v) + self.val(xv, xf, w))
        d1, core, d2, errs, fu = (A if i < self.side else B)[3:]
        return shared - k2 * d1 - k3 * core + k4 * fu - k5 * d2 - k6 * errs

    def _potential(self, prof):
        k1, k2, k3, k4, k5, k6 = self.k
        A, B = self._split(prof)
        v, xv, xf = A[:3]
        w, yw, yf = B[:3]
        return (-k1 * self.far(v, w)
                - k2 * (A[3] + B[3])
                - k3 * (A[4] + B[4])
                + k4 * (self.val(yw, yf, v) + self.val(xv, xf, w) + A[7] + B[7])
                - k5 * (A[5] + B[5])
                - k6 * (A[6] + B[6]))

    def levels(self, prof, side):
        """Own priority-term values (levels 1..6) of one side, for diagnostics."""
        v, xv, xf, w, yw, yf = self.decode(prof)
        if side == 0:
            own = (v, xv, xf, self.fA)
        else:
            own = (w, yw, yf, self.fB)
        u, lst, vals, f = own
        return (self.far(v, w), self.list_distance(u, lst, 1), self.core_errors(u, lst, vals, f),
                self.val(yw, yf, v) + self.val(xv, xf, w) + f[u],
                self.list_distance(u, lst, 2), self.all_errors(lst, vals, f))

    # profiles -------------------------------------------------------------

    def truthful_side(self, v, f):
        xv = self.ball2[v]
        return v, xv, tuple(f[x] for x in xv)

    def truthful_profile(self, v, w=None, order_seed=None):
        w = v if w is None else w
        a = list(self.truthful_side(v, self.fA))
        c = list(self.truthful_side(w, self.fB))
        if order_seed is not None:
            rng = random.Random(order_seed)
            for side in (a, c):
                perm = list(range(self.m))
                rng.shuffle(perm)
                side[1] = tuple(side[1][t] for t in perm)
                side[2] = tuple(side[2][t] for t in perm)
        return self.encode(*a, *c)

    def flip(self, prof, player):
        return prof[:player] + (1 - prof[player],) + prof[player + 1:]

    def designated_deviation(self, prof):
        """The improving flip named by the equilibrium argument, or None.

        Levels are examined in the argument's order 1, 2, 3, 5, 6, 4, each
        for Alice's side then Bob's.
        """
        v, xv, xf, w, yw, yf = self.decode(prof)
        n, b = self.n, self.b
        sides = ((0, v, xv, xf, self.fA), (1, w, yw, yf, self.fB))
        if (v ^ w).bit_count() >= 2:
            t = ((v ^ w) & -(v ^ w)).bit_length() - 1
            return self.player_index(0, "v", 0, t), 1
        for side, u, lst, _, _ in sides:
            d = self.list_distance(u, lst, 1)
            if d:
                for s in range(self.m):
                    for t in range(n):
                        q = lst[:s] + (lst[s] ^ (1 << t),) + lst[s + 1:]
                        if self.list_distance(u, q, 1) < d:
                            return self.player_index(side, "xv", s, t), 2
        for side, u, lst, vals, f in sides:
            ball = self.ball1[u]
            for s in self.first_slots(lst):
                if lst[s] in ball and vals[s] != f[lst[s]]:
                    t = ((vals[s] ^ f[lst[s]]) & -(vals[s] ^ f[lst[s]])).bit_length() - 1
                    return self.player_index(side, "xf", s, t), 3
        for side, u, lst, vals, f in sides:
            d = self.list_distance(u, lst, 2)
            if d:
                base = self.levels(prof, side)[:4]
                for s in range(self.m):
                    for t in range(n):
                        p = self.player_index(side, "xv", s, t)
                        q = self.flip(prof, p)
                        lv = self.levels(q, side)
                        if lv[:4] == base and lv[4] < d:
                            return p, 5
        for side, u, lst, vals, f in sides:
            for s in range(self.m):
                if vals[s] != f[lst[s]]:
                    t = ((vals[s] ^ f[lst[s]]) & -(vals[s] ^ f[lst[s]])).bit_length() - 1
                    return self.player_index(side, "xf", s, t), 6
        total = [self.fA[x] + self.fB[x] for x in range(1 << n)]
        if v != w:
            t = (v ^ w).bit_length() - 1
            if total[w] > total[v]:
                return self.player_index(0, "v", 0, t), 4
            if total[v] > total[w]:
                return self.player_index(1, "v", 0, t), 4
            return None
        best = max(range(n), key=lambda t: total[v ^ (1 << t)])
        if total[v ^ (1 << best)] > total[v]:
            return self.player_index(0, "v", 0, best), 4
        return None


def build_game_np(sumls: SumLSInstance, W: int | None = None) -> BinaryGame:
    return BinaryGame(sumls, W)


def random_profile(g: Game, rng) -> tuple:
    return tuple(rng.randrange(k) for k in g.actions)
