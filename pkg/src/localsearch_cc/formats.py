"""Plain-text formats for graphs, instances, embeddings and games.

Vertex codes are written with their components joined by ``:`` (``3`` for
an int, ``1:0:2`` for a tuple).  Graphs are either a builtin spec such as
``hypercube:6``, ``grid:4x4``, ``complete:5``, ``petersen`` or ``k4``, or
``inline``, in which case ``edge u v`` lines follow in the same file.
"""

from __future__ import annotations

import numpy as np

from .embeddings import explicit_embedding
from .games import Game
from .graphs import (
    Explicit,
    GraphError,
    GraphFamily,
    Grid,
    Hypercube,
    OddGraph,
    ReplicationGraph,
    complete_graph,
    cycle_graph,
    path_graph,
    random_regular,
)
from .search import QueryInstance, SumLSInstance, VetoLSInstance


class FormatError(ValueError):
    pass


def encode_code(v) -> str:
    if isinstance(v, tuple):
        return ":".join(encode_code(x) for x in v)
    return str(v)


def decode_code(s: str):
    parts = [int(p) if p.lstrip("-").isdigit() else p for p in s.split(":")]
    return parts[0] if len(parts) == 1 else tuple(parts)


def petersen() -> Explicit:
    import networkx as nx

    return Explicit.from_networkx(nx.petersen_graph(), "petersen")


def graph_from_spec(spec: str) -> GraphFamily:
    """Builtin graph from a short spec string."""
    name, _, arg = spec.partition(":")
    name = name.lower()
    try:
        if name == "hypercube":
            return Hypercube(int(arg))
        if name == "grid":
            return Grid([int(x) for x in arg.split("x")])
        if name in ("complete", "path", "cycle"):
            return {"complete": complete_graph, "path": path_graph, "cycle": cycle_graph}[name](int(arg))
        if name.startswith("k") and name[1:].isdigit() and not arg:
            return complete_graph(int(name[1:]))
        if name == "odd":
            return OddGraph(int(arg))
        if name == "replication":
            return ReplicationGraph(int(arg))
        if name == "petersen":
            return petersen()
        if name == "rr":
            d, n, seed = (int(x) for x in arg.split(":"))
            return random_regular(d, n, seed)
    except (ValueError, GraphError) as exc:
        raise FormatError(f"bad graph spec {spec!r}: {exc}") from exc
    raise FormatError(f"unknown graph spec {spec!r}")


def graph_spec(g: GraphFamily) -> str | None:
    if isinstance(g, Hypercube):
        return f"hypercube:{g.n}"
    if isinstance(g, Grid) and all(l == 0 for l in g.lo):
        return "grid:" + "x".join(map(str, g.dims))
    if isinstance(g, OddGraph):
        return f"odd:{g.k}"
    if isinstance(g, ReplicationGraph):
        return f"replication:{g.M}"
    return None


# ---------------------------------------------------------------- graphs


def format_graph(g: GraphFamily) -> str:
    edges = list(g.edges())
    verts = list(g.vertices())
    lines = [f"graph {g.name} {len(verts)} {len(edges)}"]
    touched = set()
    for u, v in edges:
        touched.update((u, v))
        lines.append(f"edge {encode_code(u)} {encode_code(v)}")
    lines += [f"vertex {encode_code(v)}" for v in verts if v not in touched]
    return "\n".join(lines) + "\n"


def _edge_lines(lines):
    verts, edges = [], []
    for parts in lines:
        if parts[0] == "edge":
            u, v = decode_code(parts[1]), decode_code(parts[2])
            edges.append((u, v))
            verts += [u, v]
        elif parts[0] == "vertex":
            verts.append(decode_code(parts[1]))
    return list(dict.fromkeys(verts)), edges


def _tokens(text):
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line.split())
    return out


def parse_graph(text: str) -> Explicit:
    toks = _tokens(text)
    if not toks or toks[0][0] != "graph":
        raise FormatError("missing 'graph <name> <n> <m>' header")
    head = toks[0]
    verts, edges = _edge_lines(toks[1:])
    g = Explicit.from_edges(verts, edges, head[1])
    if len(head) >= 4 and (int(head[2]) != g.num_vertices() or int(head[3]) != len(edges)):
        raise FormatError("vertex or edge count does not match the header")
    return g


# ---------------------------------------------------------------- instances


def _header(parts):
    kind = parts[0]
    opts = dict(p.split("=", 1) for p in parts[1:])
    return kind, opts


def _graph_of(opts, rest):
    spec = opts.get("graph", "inline")
    if spec == "inline":
        verts, edges = _edge_lines(rest)
        return Explicit.from_edges(verts, edges, "inline")
    return graph_from_spec(spec)


def _graph_header(g):
    spec = graph_spec(g)
    if spec is not None:
        return f"graph={spec}", []
    lines = [f"edge {encode_code(u)} {encode_code(v)}" for u, v in g.edges()]
    return "graph=inline", lines


def format_instance(inst) -> str:
    g = inst.graph
    gh, edge_lines = _graph_header(g)
    verts = list(g.vertices())
    if isinstance(inst, SumLSInstance):
        lines = [f"sumls W={inst.W} {gh}"]
        lines += [f"fA {encode_code(v)} {inst.f_A(v)}" for v in verts]
        lines += [f"fB {encode_code(v)} {inst.f_B(v)}" for v in verts]
    elif isinstance(inst, VetoLSInstance):
        lines = [f"vetols W={inst.W} {gh}"]
        lines += [f"f {encode_code(v)} {inst.f(v)}" for v in verts]
        lines += [f"valid {encode_code(v)}" for v in verts if inst.valid(v)]
    elif isinstance(inst, QueryInstance):
        lines = [f"query {gh}"]
        lines += [f"h {encode_code(v)} {inst.h(v)}" for v in verts]
    else:
        raise FormatError(f"cannot format {type(inst).__name__}")
    return "\n".join(lines + edge_lines) + "\n"


def parse_instance(text: str):
    toks = _tokens(text)
    if not toks:
        raise FormatError("empty instance file")
    kind, opts = _header(toks[0])
    rest = toks[1:]
    g = _graph_of(opts, rest)
    tables = {}
    for parts in rest:
        if parts[0] in ("fA", "fB", "f", "h"):
            tables.setdefault(parts[0], {})[decode_code(parts[1])] = int(parts[2])
        elif parts[0] == "valid":
            tables.setdefault("valid", set()).add(decode_code(parts[1]))
        elif parts[0] not in ("edge", "vertex"):
            raise FormatError(f"unexpected line {' '.join(parts)!r}")
    missing = lambda t: [v for v in g.vertices() if v not in tables.get(t, {})]
    if kind == "sumls":
        for t in ("fA", "fB"):
            if missing(t):
                raise FormatError(f"{t} missing for {missing(t)[0]!r}")
        return SumLSInstance(g, tables["fA"].__getitem__, tables["fB"].__getitem__, int(opts["W"]))
    if kind == "vetols":
        if missing("f"):
            raise FormatError(f"f missing for {missing('f')[0]!r}")
        valid = tables.get("valid", set())
        if not valid:
            raise FormatError("VetoLS needs a nonempty valid set")
        return VetoLSInstance(g, tables["f"].__getitem__, valid.__contains__, int(opts["W"]))
    if kind == "query":
        if missing("h"):
            raise FormatError(f"h missing for {missing('h')[0]!r}")
        return QueryInstance(g, tables["h"].__getitem__)
    raise FormatError(f"unknown instance kind {kind!r}")


# ---------------------------------------------------------------- embeddings


def format_embedding(emb, source_spec: str, target_spec: str) -> str:
    lines = [f"embedding source={source_spec} target={target_spec}"]
    for v in emb.vertices():
        lines.append(f"phi {encode_code(v)} -> {encode_code(emb.phi(v))}")
    for e in emb.edges():
        path = ",".join(encode_code(x) for x in emb.chi(e))
        lines.append(f"chi {encode_code(e[0])} {encode_code(e[1])} : {path}")
    return "\n".join(lines) + "\n"


def parse_embedding(text: str):
    toks = _tokens(text)
    if not toks or toks[0][0] != "embedding":
        raise FormatError("missing 'embedding source=... target=...' header")
    _, opts = _header(toks[0])
    source = graph_from_spec(opts["source"])
    target = graph_from_spec(opts["target"])
    phi, chi = {}, {}
    for parts in toks[1:]:
        if parts[0] == "phi" and len(parts) == 4 and parts[2] == "->":
            phi[decode_code(parts[1])] = decode_code(parts[3])
        elif parts[0] == "chi" and len(parts) == 5 and parts[3] == ":":
            e = (decode_code(parts[1]), decode_code(parts[2]))
            chi[e] = [decode_code(c) for c in parts[4].split(",")]
        else:
            raise FormatError(f"bad embedding line {' '.join(parts)!r}")
    return explicit_embedding(source, target, phi, chi, name="file")


# ---------------------------------------------------------------- games


def format_game(g: Game) -> str:
    lines = [f"game players={g.n_players} actions={','.join(map(str, g.actions))}"]
    for p in g.profiles():
        for i in range(g.n_players):
            lines.append(f"u {i} {encode_code(p) if len(p) > 1 else p[0]} {g.utility(i, p)}")
    return "\n".join(lines) + "\n"


def parse_game(text: str) -> Game:
    toks = _tokens(text)
    if not toks or toks[0][0] != "game":
        raise FormatError("missing 'game players=n actions=...' header")
    _, opts = _header(toks[0])
    n = int(opts["players"])
    actions = tuple(int(x) for x in opts["actions"].split(","))
    if len(actions) != n:
        raise FormatError("actions list does not match the player count")
    tabs = [np.zeros(actions, dtype=np.int64) for _ in range(n)]
    seen = [np.zeros(actions, dtype=bool) for _ in range(n)]
    for parts in toks[1:]:
        if parts[0] != "u" or len(parts) != 4:
            raise FormatError(f"bad game line {' '.join(parts)!r}")
        i = int(parts[1])
        p = decode_code(parts[2])
        p = p if isinstance(p, tuple) else (p,)
        tabs[i][p] = int(parts[3])
        seen[i][p] = True
    if not all(s.all() for s in seen):
        raise FormatError("some utilities are missing")
    return Game.from_tables(tabs, "file")



def builtin_game(name: str) -> Game:
    from .games import gadget_2x2, matching_pennies, prisoners_dilemma

    key, _, arg = name.partition(":")
    if key == "pd":
        return prisoners_dilemma()
    if key == "mp":
        return matching_pennies()
    if key == "gadget":
        x, y = (int(t) for t in arg.split(":"))
        return gadget_2x2(x, y)
    raise FormatError(f"unknown builtin game {name!r}")
