"""Two-party communication simulator with exact bit accounting.

Randomness is public-coin: every party sees the same ``random.Random(seed)``
stream, so shared choices cost no bits.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
from sympy import isprime

from .games import Game, _mixed
from .search import CapExceeded, DEFAULT_CAP, SumLSInstance, is_local_max

PRIME_LO, PRIME_HI = 1 << 31, 1 << 32
FINGERPRINT_BITS = 32


@dataclass
class Transcript:
    seed: int | None = None
    messages: list = field(default_factory=list)
    outcome: object = None

    def send(self, sender: str, value: int, width: int):
        """Append ``value`` as a ``width``-bit two's-complement payload."""
        if width <= 0:
            raise ValueError("payload width must be positive")
        lo, hi = -(1 << (width - 1)), 1 << (width - 1)
        if not lo <= value < hi:
            raise ValueError(f"{value} does not fit in {width} bits")
        payload = format(value & ((1 << width) - 1), f"0{width}b")
        self.messages.append((sender, payload))
        return value

    def send_unsigned(self, sender: str, value: int, width: int):
        if not 0 <= value < 1 << width:
            raise ValueError(f"{value} does not fit in {width} unsigned bits")
        self.messages.append((sender, format(value, f"0{width}b")))
        return value

    @property
    def bits(self) -> int:
        return sum(len(p) for _, p in self.messages)

    @property
    def rounds(self) -> int:
        r, last = 0, None
        for s, _ in self.messages:
            if s != last:
                r += 1
                last = s
        return r

    def as_record(self) -> dict:
        return {"bits": self.bits, "rounds": self.rounds, "seed": self.seed}


def ceil_log2(x: int) -> int:
    return max(1, (x - 1).bit_length())


def signed_width(values) -> int:
    """Bits for two's-complement payloads covering all ``values``."""
    top = max((abs(int(v)) for v in values), default=0)
    return top.bit_length() + 1


def random_prime(rng: random.Random) -> int:
    while True:
        p = rng.randrange(PRIME_LO, PRIME_HI)
        if isprime(p):
            return p


def _powers(r: int, p: int, c: int) -> np.ndarray:
    out = np.ones(c, dtype=np.uint64)
    if c > 1:
        out[1] = r % p
    L = 2
    while L < c:
        step = int(out[L - 1]) * r % p
        span = min(L, c - L)
        out[L:L + span] = (out[:span] * np.uint64(step)) % np.uint64(p)
        L += span
    return out


def fingerprint(vec, r: int, p: int, powers=None) -> int:
    """sum_j vec_j r^j mod p."""
    v = np.mod(np.asarray(vec, dtype=np.int64), p).astype(np.uint64)
    pw = _powers(r, p, len(v)) if powers is None else powers
    prod = (v * pw) % np.uint64(p)
    # fold in chunks so uint64 sums cannot overflow
    total = 0
    step = 1 << 30
    for lo in range(0, len(prod), step):
        total += int(prod[lo:lo + step].sum(dtype=np.uint64))
    return total % p


@dataclass
class FingerprintOutcome:
    zero: bool
    transcript: Transcript


def fingerprint_equal_sum(parties, k: int, seed) -> FingerprintOutcome:
    """Decide whether the party vectors sum to zero, one-sided error <= 2^-k.

    In each repetition the parties draw a shared prime p in [2^31, 2^32) and
    a point r; every party but the last sends its fingerprint (32 bits), the
    last adds its own and announces the verdict bit.
    """
    vecs = [np.asarray(v, dtype=np.int64).ravel() for v in parties]
    c = len(vecs[0])
    if any(len(v) != c for v in vecs):
        raise ValueError("party vectors must share a common length")
    rng = random.Random(seed)
    tr = Transcript(seed)
    zero = True
    names = [chr(ord("A") + t) for t in range(len(vecs))]
    for _ in range(k):
        p = random_prime(rng)
        r = rng.randrange(1, p)
        pw = _powers(r, p, c)
        acc = 0
        for name, v in zip(names[:-1], vecs[:-1]):
            h = fingerprint(v, r, p, pw)
            tr.send_unsigned(name, h, FINGERPRINT_BITS)
            acc += h
        acc += fingerprint(vecs[-1], r, p, pw)
        if acc % p:
            zero = False
            break
    tr.send_unsigned(names[-1], int(zero), 1)
    tr.outcome = "sum-is-zero" if zero else "differs"
    return FingerprintOutcome(zero, tr)


def cycle_vectors_2p(uA, uB):
    """Each party's share of the four-cycle sums over canonical 4-cycles.

    Cycle (a<a2, b<b2) visits (a,b) -> (a2,b) -> (a2,b2) -> (a,b2) -> (a,b).
    """
    uA = np.asarray(uA, dtype=np.int64)
    uB = np.asarray(uB, dtype=np.int64)
    N, K = uA.shape
    ia, ja = np.triu_indices(N, 1)
    ib, jb = np.triu_indices(K, 1)
    A = ((uA[ja][:, ib] - uA[ia][:, ib]) + (uA[ia][:, jb] - uA[ja][:, jb]))
    B = ((uB[ja][:, jb] - uB[ja][:, ib]) + (uB[ia][:, ib] - uB[ia][:, jb]))
    return A.ravel(), B.ravel()


@dataclass
class Verdict:
    exact: bool
    transcript: Transcript
    equations: int = 0

    def as_record(self) -> dict:
        return {"verdict": "exact" if self.exact else "not exact",
                "equations": self.equations, **self.transcript.as_record()}


def detect_exact_potential_2p(uA, uB, k: int = 20, seed=0) -> Verdict:
    a, b = cycle_vectors_2p(uA, uB)
    out = fingerprint_equal_sum([a, b], k, seed)
    out.transcript.outcome = "exact" if out.zero else "not exact"
    return Verdict(out.zero, out.transcript, len(a))


def cycle_vectors_np(g: Game, alice, cap=1 << 21):
    """Per-party contributions to every closed deviation path equation."""
    n = g.n_players
    size = math.prod(g.actions)
    perms = list(permutations(range(n)))
    c = size * size * len(perms) ** 2
    if c > cap:
        raise CapExceeded(f"{c} cycle equations exceed the cap {cap}")
    tabs = [g.table(i) for i in range(n)]
    alice = set(alice)
    profs = list(g.profiles())
    A = np.zeros(c, dtype=np.int64)
    B = np.zeros(c, dtype=np.int64)
    t = 0
    for a in profs:
        for b in profs:
            for up in perms:
                for down in perms:
                    sa = sb = 0
                    for src, dst, order in ((a, b, up), (b, a, down)):
                        S = set()
                        for i in order:
                            before = _mixed(src, dst, S)
                            S.add(i)
                            d = int(tabs[i][_mixed(src, dst, S)] - tabs[i][before])
                            if i in alice:
                                sa += d
                            else:
                                sb += d
                    A[t], B[t] = sa, sb
                    t += 1
    return A, B


def detect_exact_potential_np(g: Game, alice=None, k: int = 20, seed=0, cap=1 << 21) -> Verdict:
    """Alice holds the utilities of players in ``alice`` (default: first half)."""
    if alice is None:
        alice = range(g.n_players // 2)
    a, b = cycle_vectors_np(g, alice, cap)
    out = fingerprint_equal_sum([a, b], k, seed)
    out.transcript.outcome = "exact" if out.zero else "not exact"
    return Verdict(out.zero, out.transcript, len(a))


@dataclass
class WitnessOutcome:
    accepted: bool
    transcript: Transcript
    detail: object = None


def verify_sumls_witness(inst: SumLSInstance, v) -> WitnessOutcome:
    """Exchange both potentials on N[v]; accept iff v is a local max of the sum.

    Bits: 2 (deg(v) + 1) ceil(log2(2W + 1)).
    """
    g = inst.graph
    g.check(v)
    width = ceil_log2(2 * inst.W + 1)
    closed = [v] + sorted(g.neighbors(v))
    tr = Transcript()
    fa = [tr.send("A", inst.f_A(u), width) for u in closed]
    fb = [tr.send("B", inst.f_B(u), width) for u in closed]
    total = [x + y for x, y in zip(fa, fb)]
    better = [u for u, s in zip(closed[1:], total[1:]) if s > total[0]]
    ok = not better
    tr.outcome = "accepted" if ok else "rejected"
    return WitnessOutcome(ok, tr, None if ok else better[0])


def sumls_witness_bits(deg: int, W: int) -> int:
    return 2 * (deg + 1) * ceil_log2(2 * W + 1)


def verify_totexpot_witness(g: Game, witness, alice=None) -> WitnessOutcome:
    """Check a Nash profile or a violating cycle with a few exchanged values.

    ``witness`` is ``("profile", p)``, ``("cycle4", (a, a2, b, b2))`` for two
    players, or ``("cycle", (a, b, up, down))``.  For a profile each party
    sends one bit (no own player can improve); for a cycle Alice sends her
    players' utility values along it and Bob announces whether the sum is
    nonzero.  Malformed witnesses are rejected.
    """
    n = g.n_players
    alice = set(range(n // 2) if alice is None else alice)
    tr = Transcript()
    try:
        kind, body = witness
    except (TypeError, ValueError):
        tr.outcome = "rejected"
        return WitnessOutcome(False, tr, "malformed")
    if kind == "profile":
        p = tuple(body)
        if len(p) != n or any(not 0 <= x < k for x, k in zip(p, g.actions)):
            tr.outcome = "rejected"
            return WitnessOutcome(False, tr, "malformed")
        deviator = None
        for party, members in (("A", sorted(alice)), ("B", [i for i in range(n) if i not in alice])):
            good = True
            for i in members:
                ui = g.utility(i, p)
                if g.best_response is not None:
                    val, _ = g.best_response(i, p)
                    if val > ui:
                        good = False
                else:
                    for x in range(g.actions[i]):
                        if x != p[i] and g.utility(i, p[:i] + (x,) + p[i + 1:]) > ui:
                            good = False
                            break
                if not good:
                    deviator = deviator or (party, i)
                    break
            tr.send_unsigned(party, int(good), 1)
        ok = deviator is None
        tr.outcome = "accepted" if ok else "rejected"
        return WitnessOutcome(ok, tr, deviator)
    if kind == "cycle4":
        if n != 2:
            tr.outcome = "rejected"
            return WitnessOutcome(False, tr, "malformed")
        a, a2, b, b2 = body
        N, K = g.actions
        if not (0 <= a < a2 < N and 0 <= b < b2 < K):
            tr.outcome = "rejected"
            return WitnessOutcome(False, tr, "malformed")
        steps = [(0, (a, b), (a2, b)), (1, (a2, b), (a2, b2)),
                 (0, (a2, b2), (a, b2)), (1, (a, b2), (a, b))]
    elif kind == "cycle":
        a, b, up, down = body
        a, b = tuple(a), tuple(b)
        if (len(a) != n or len(b) != n or sorted(up) != list(range(n))
                or sorted(down) != list(range(n))):
            tr.outcome = "rejected"
            return WitnessOutcome(False, tr, "malformed")
        steps = []
        for src, dst, order in ((a, b, up), (b, a, down)):
            S = set()
            for i in order:
                before = _mixed(src, dst, S)
                S.add(i)
                steps.append((i, before, _mixed(src, dst, S)))
    else:
        tr.outcome = "rejected"
        return WitnessOutcome(False, tr, "malformed")
    alice_vals = [g.utility(i, q) - g.utility(i, p) for i, p, q in steps if i in alice]
    bob_vals = [g.utility(i, q) - g.utility(i, p) for i, p, q in steps if i not in alice]
    width = signed_width(alice_vals + bob_vals)
    for x in alice_vals:
        tr.send("A", x, width)
    s = sum(alice_vals) + sum(bob_vals)
    tr.send_unsigned("B", int(s != 0), 1)
    tr.outcome = "accepted" if s else "rejected"
    return WitnessOutcome(s != 0, tr, s)


@dataclass
class BaselineOutcome:
    solution: object
    transcript: Transcript


def baseline_full_exchange(inst, cap: int = DEFAULT_CAP, W: int | None = None) -> BaselineOutcome:
    """Alice ships her whole input; Bob answers locally.

    SumLS: f_A in [1, W] costs |V| ceil(log2 W) bits and Bob names a local
    max with ceil(log2 |V|) more.  Two-player game ``(uA, uB)``: Alice's
    table costs N^2 ceil(log2 W) bits (W = value range) and Bob knows the
    verdict, which is the outcome.
    """
    tr = Transcript()
    if isinstance(inst, SumLSInstance):
        g = inst.graph
        if g.num_vertices() > cap:
            raise CapExceeded(f"{g.num_vertices()} vertices exceed the cap {cap}")
        verts = list(g.vertices())
        width = ceil_log2(inst.W)
        for v in verts:
            x = inst.f_A(v)
            if not 1 <= x <= inst.W:
                raise ValueError("baseline expects f_A values in [1, W]")
            tr.send_unsigned("A", x - 1, width)
        pick = next(r for r, v in enumerate(verts) if is_local_max(inst, v))
        tr.send_unsigned("B", pick, ceil_log2(len(verts)))
        tr.outcome = verts[pick]
        return BaselineOutcome(verts[pick], tr)
    uA, uB = (np.asarray(t, dtype=np.int64) for t in inst)
    lo = int(uA.min())
    span = W if W is not None else int(uA.max()) - lo + 1
    width = ceil_log2(max(2, span))
    for x in uA.ravel():
        tr.send_unsigned("A", int(x) - lo, width)
    a, b = cycle_vectors_2p(uA, uB)
    exact = bool(((a + b) == 0).all())
    tr.outcome = "exact" if exact else "not exact"
    return BaselineOutcome(exact, tr)
