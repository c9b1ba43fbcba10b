"""Pebbling instances on the DAG D and their reduction to VetoLS."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .graphs import PebblingDag, ReplicationGraph
from .search import VetoLSInstance


class PromiseViolation(ValueError):
    def __init__(self, vertex, kind):
        super().__init__(f"promise violated at {kind} {vertex!r}")
        self.vertex = vertex
        self.kind = kind


@dataclass
class PebbInstance:
    """Alice holds ``alice_bits[(v, slot)]``; Bob holds ``bob_index[v]``."""

    M: int
    alice_bits: dict
    bob_index: dict

    def __post_init__(self):
        self.dag = PebblingDag(self.M)

    def b(self, v) -> int:
        """The gadget output b(v, I(v))."""
        return self.alice_bits[(v, self.bob_index[v])]

    def check_promise(self):
        last = self.dag.layers - 1
        for v in self.dag.vertices():
            if v[0] == 0 and self.b(v) != 1:
                raise PromiseViolation(v, "source")
            if v[0] == last and self.b(v) != 0:
                raise PromiseViolation(v, "sink")


def pebb_check(inst: PebbInstance, v) -> bool:
    """v is false and all of its predecessors are true."""
    inst.dag.check(v)
    return inst.b(v) == 0 and all(inst.b(u) == 1 for u in inst.dag.predecessors(v))


def pebb_solve_bruteforce(inst: PebbInstance) -> set:
    return {v for v in inst.dag.vertices() if pebb_check(inst, v)}


def from_truth(M: int, truth, rng) -> PebbInstance:
    """Instance whose gadget outputs equal ``truth(v)``; other slots random."""
    dag = PebblingDag(M)
    bits, index = {}, {}
    for v in dag.vertices():
        I = rng.randrange(3)
        index[v] = I
        for s in range(3):
            bits[(v, s)] = int(truth(v)) if s == I else rng.randrange(2)
    return PebbInstance(M, bits, index)


def random_pebb(M: int, seed, p_true: float = 0.5) -> PebbInstance:
    """Seeded promise-respecting instance."""
    rng = random.Random(seed)
    last = M ** 3 - 1
    truth = {}
    for v in PebblingDag(M).vertices():
        if v[0] == 0:
            truth[v] = 1
        elif v[0] == last:
            truth[v] = 0
        else:
            truth[v] = int(rng.random() < p_true)
    return from_truth(M, truth.__getitem__, rng)


def topological_number(v, M: int) -> int:
    """t((k1..k4), i) in 1..3M^6, strictly decreasing along every D edge.

    Vertices are ranked by (-k1, k2, k3, k4, i), so every predecessor
    outranks every successor.
    """
    k1, k2, k3, k4, i = v
    layer_size = 3 * M ** 3
    within = ((k2 * M + k3) * M + k4) * 3 + i
    return (M ** 3 - 1 - k1) * layer_size + within + 1


def pebb_to_vetols(inst: PebbInstance) -> VetoLSInstance:
    """f(v,i) = t(v,i) + 6N [b(v,i) = 0]; only (v, I(v)) is valid."""
    inst.check_promise()
    M = inst.M
    N = M ** 6
    bonus = 6 * N
    bits, index = inst.alice_bits, inst.bob_index

    def f(x):
        return topological_number(x, M) + (bonus if bits[(x[:4], x[4])] == 0 else 0)

    def valid(x):
        return index[x[:4]] == x[4]

    return VetoLSInstance(ReplicationGraph(M), f, valid, W=9 * N)


def format_pebb(inst: PebbInstance) -> str:
    lines = [f"pebb M={inst.M}"]
    for (v, s), bit in sorted(inst.alice_bits.items()):
        lines.append(f"b {':'.join(map(str, v))} {s} {bit}")
    for v, I in sorted(inst.bob_index.items()):
        lines.append(f"I {':'.join(map(str, v))} {I}")
    return "\n".join(lines) + "\n"


def parse_pebb(text: str) -> PebbInstance:
    M = None
    bits, index = {}, {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "pebb":
            M = int(parts[1].split("=")[1])
        elif parts[0] == "b":
            bits[(tuple(map(int, parts[1].split(":"))), int(parts[2]))] = int(parts[3])
        elif parts[0] == "I":
            index[tuple(map(int, parts[1].split(":")))] = int(parts[2])
        else:
            raise ValueError(f"bad pebb line: {raw!r}")
    if M is None:
        raise ValueError("missing 'pebb M=' header")
    return PebbInstance(M, bits, index)
