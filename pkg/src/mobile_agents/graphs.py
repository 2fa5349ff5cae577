"""Port-labeled graphs, quotient multigraphs and initial configurations.

Edges are quadruples ``(u, p, v, q)``: the edge joins ``u`` and ``v``, with
port ``p`` at ``u`` and port ``q`` at ``v``.  Node indices exist only on the
host side; agents never see them.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

Edge = tuple[int, int, int, int]


def canonical_edge(u: int, p: int, v: int, q: int) -> Edge:
    """Orient an edge so that ``(u, p) <= (v, q)``.

    For simple graphs this puts the smaller node first; for loops it puts the
    smaller port first.
    """
    if (u, p) <= (v, q):
        return (u, p, v, q)
    return (v, q, u, p)


@dataclass(frozen=True)
class Violation:
    invariant: str
    detail: str
    edge: Optional[Edge] = None

    def __str__(self) -> str:
        return f"{self.invariant}: {self.detail}"


@dataclass(frozen=True)
class PortLabeledGraph:
    """Undirected graph whose edge-ends carry local port numbers.

    Construction does not validate; call :func:`validate` (or use one of the
    generators / :func:`parse_graph`, which only produce valid graphs).
    """

    node_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "edges", tuple(sorted(canonical_edge(*map(int, e)) for e in self.edges))
        )

    @cached_property
    def adj(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """``adj[v][p - 1] == (u, q)``: port ``p`` of ``v`` leads to ``u``, arriving at port ``q``.

        Only meaningful for valid graphs.
        """
        table: list[dict[int, tuple[int, int]]] = [{} for _ in range(self.node_count)]
        for u, p, v, q in self.edges:
            table[u][p] = (v, q)
            table[v][q] = (u, p)
        return tuple(tuple(t[p] for p in sorted(t)) for t in table)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adj)

    def neighbor(self, v: int, port: int) -> tuple[int, int]:
        return self.adj[v][port - 1]

    def relabel(self, perm: Sequence[int]) -> "PortLabeledGraph":
        """Return the graph with node ``v`` renamed ``perm[v]`` (ports unchanged)."""
        return PortLabeledGraph(
            self.node_count, tuple((perm[u], p, perm[v], q) for u, p, v, q in self.edges)
        )

    def __str__(self) -> str:
        return serialize_graph(self)


@dataclass(frozen=True)
class QuotientGraph:
    """Port multigraph allowing loops and parallel edges.

    Loops are ``(u, p, u, q)`` with ``p <= q``; ``p == q`` is a half-loop (a
    single edge-end that leads back to itself).
    """

    node_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "edges", tuple(sorted(canonical_edge(*map(int, e)) for e in self.edges))
        )

    @cached_property
    def darts(self) -> dict[tuple[int, int], list[tuple[int, int]]]:
        out: dict[tuple[int, int], list[tuple[int, int]]] = {}
        for u, p, v, q in self.edges:
            out.setdefault((u, p), []).append((v, q))
            if (u, p) != (v, q):
                out.setdefault((v, q), []).append((u, p))
        return out

    @cached_property
    def port_degree(self) -> tuple[int, ...]:
        ports = [set() for _ in range(self.node_count)]
        for u, p in self.darts:
            ports[u].add(p)
        return tuple(len(s) for s in ports)

    def target(self, u: int, port: int) -> int:
        return self.darts[(u, port)][0][0]

    @classmethod
    def from_graph(cls, g: PortLabeledGraph) -> "QuotientGraph":
        return cls(g.node_count, g.edges)

    def __str__(self) -> str:
        return serialize_quotient(self)


# The two quotients that witness the cycle / sun separation.
O = QuotientGraph(1, ((0, 1, 0, 2),))
P = QuotientGraph(2, ((0, 1, 0, 2), (0, 3, 1, 1)))


@dataclass(frozen=True)
class InitialConfiguration:
    """``(G, S, Id, w)``: graph, start multiset, agent identities and inputs."""

    graph: PortLabeledGraph
    starts: tuple[int, ...]
    ids: tuple[int, ...]
    inputs: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "starts", tuple(self.starts))
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        k = len(self.starts)
        if k < 1 or len(self.ids) != k or len(self.inputs) != k:
            raise ValueError("starts, ids and inputs must be non-empty and aligned")
        if len(set(self.ids)) != k:
            raise ValueError(f"agent ids must be distinct, got {self.ids}")
        if any(i < 1 for i in self.ids):
            raise ValueError("agent ids must be positive integers")
        if any(not 0 <= s < self.graph.node_count for s in self.starts):
            raise ValueError("start node out of range")

    @property
    def team_size(self) -> int:
        return len(self.starts)

    @classmethod
    def uniform(cls, graph, starts, ids=None, w: str = "") -> "InitialConfiguration":
        starts = tuple(starts)
        ids = tuple(ids) if ids is not None else tuple(range(1, len(starts) + 1))
        return cls(graph, starts, ids, (w,) * len(starts))

    def with_inputs(self, w: str) -> "InitialConfiguration":
        return InitialConfiguration(self.graph, self.starts, self.ids, (w,) * len(self.starts))

    def transport(self, alpha: Sequence[int]) -> "InitialConfiguration":
        """Move every agent from ``s`` to ``alpha[s]``, keeping its id and input."""
        return InitialConfiguration(
            self.graph, tuple(alpha[s] for s in self.starts), self.ids, self.inputs
        )


class GraphFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


# --------------------------------------------------------------------------
# validation

def _connected(n: int, pairs: Iterable[tuple[int, int]]) -> bool:
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for u, v in pairs:
        nbrs[u].add(v)
        nbrs[v].add(u)
    seen = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for y in nbrs[x] - seen:
            seen.add(y)
            queue.append(y)
    return len(seen) == n


def _port_violation(n: int, ends: Iterable[tuple[int, int]]) -> Optional[Violation]:
    ports: list[list[int]] = [[] for _ in range(n)]
    for v, p in ends:
        ports[v].append(p)
    for v, ps in enumerate(ports):
        if sorted(ps) != list(range(1, len(ps) + 1)):
            dup = [p for p, c in Counter(ps).items() if c > 1]
            if dup:
                return Violation("ports", f"port {dup[0]} used twice at node {v}")
            return Violation("ports", f"ports at node {v} are {sorted(ps)}, expected 1..{len(ps)}")
    return None


def validate(g: PortLabeledGraph) -> Optional[Violation]:
    """Return the first violated invariant of ``g``, or ``None`` if ``g`` is valid."""
    n = g.node_count
    if n < 1:
        return Violation("size", "graph needs at least one node")
    seen_pairs: set[frozenset[int]] = set()
    for e in g.edges:
        u, p, v, q = e
        if not (0 <= u < n and 0 <= v < n):
            return Violation("range", f"edge {e} has an endpoint outside 0..{n - 1}", e)
        if p < 1 or q < 1:
            return Violation("ports", f"edge {e} has a non-positive port", e)
        if u == v:
            return Violation("simple", f"loop at node {u}", e)
        pair = frozenset((u, v))
        if pair in seen_pairs:
            return Violation("simple", f"second edge between {u} and {v}", e)
        seen_pairs.add(pair)
    bad = _port_violation(n, [(u, p) for u, p, _, _ in g.edges] + [(v, q) for _, _, v, q in g.edges])
    if bad:
        return bad
    if not _connected(n, ((u, v) for u, _, v, _ in g.edges)):
        return Violation("connected", "graph is not connected")
    return None


def validate_quotient(qg: QuotientGraph) -> Optional[Violation]:
    n = qg.node_count
    if n < 1:
        return Violation("size", "quotient needs at least one node")
    for e in qg.edges:
        u, p, v, q = e
        if not (0 <= u < n and 0 <= v < n):
            return Violation("range", f"edge {e} has an endpoint outside 0..{n - 1}", e)
        if p < 1 or q < 1:
            return Violation("ports", f"edge {e} has a non-positive port", e)
    for (u, p), ends in qg.darts.items():
        if len({v for v, _ in ends}) > 1:
            return Violation("functional", f"port {p} at node {u} leads to several nodes")
    for u in range(n):
        ports = sorted(p for (x, p) in qg.darts if x == u)
        if ports != list(range(1, len(ports) + 1)):
            return Violation("ports", f"ports at node {u} are {ports}, expected 1..{len(ports)}")
    if not _connected(n, ((u, v) for u, _, v, _ in qg.edges)):
        return Violation("connected", "quotient is not connected")
    return None


def check(g: PortLabeledGraph) -> PortLabeledGraph:
    bad = validate(g)
    if bad:
        raise ValueError(str(bad))
    return g


# --------------------------------------------------------------------------
# isomorphism

def _extend_from_anchor(g: PortLabeledGraph, h: PortLabeledGraph, anchor: int) -> Optional[tuple[int, ...]]:
    n = g.node_count
    f = [-1] * n
    used = [False] * n
    f[0] = anchor
    used[anchor] = True
    queue = deque([0])
    while queue:
        x = queue.popleft()
        fx = f[x]
        if g.degree(x) != h.degree(fx):
            return None
        for (y, q), (y2, q2) in zip(g.adj[x], h.adj[fx]):
            if q != q2:
                return None
            if f[y] == -1:
                if used[y2]:
                    return None
                f[y] = y2
                used[y2] = True
                queue.append(y)
            elif f[y] != y2:
                return None
    return tuple(f)


def isomorphic(g: PortLabeledGraph, h: PortLabeledGraph) -> Optional[tuple[int, ...]]:
    """Port-preserving isomorphism ``g -> h`` as a tuple ``f`` (``f[v]`` is the image of ``v``).

    Anchors node 0 of ``g`` to each node of ``h`` in turn; a port-preserving
    map of a connected graph is fixed by one anchor, so the first success is
    the lexicographically least bijection by anchor image.
    """
    if g.node_count != h.node_count or len(g.edges) != len(h.edges):
        return None
    for anchor in range(h.node_count):
        f = _extend_from_anchor(g, h, anchor)
        if f is not None:
            return f
    return None


def automorphisms(g: PortLabeledGraph) -> list[tuple[int, ...]]:
    """All port-preserving automorphisms, ordered by the image of node 0."""
    out = []
    for anchor in range(g.node_count):
        f = _extend_from_anchor(g, g, anchor)
        if f is not None:
            out.append(f)
    return out


def rooted_isomorphic(g: PortLabeledGraph, u: int, h: PortLabeledGraph, v: int) -> bool:
    """Is there a port-preserving isomorphism ``g -> h`` sending ``u`` to ``v``?"""
    if g.node_count != h.node_count or len(g.edges) != len(h.edges):
        return False
    return _extend_from_anchor(g.relabel(_swap(g.node_count, u)), h, v) is not None


def _swap(n: int, u: int) -> tuple[int, ...]:
    perm = list(range(n))
    perm[0], perm[u] = u, 0
    return tuple(perm)


def quotient_isomorphic(a: QuotientGraph, b: QuotientGraph) -> bool:
    """True iff some node bijection maps the edge multiset of ``a`` onto that of ``b``."""
    return quotient_isomorphism(a, b) is not None


def quotient_isomorphism(a: QuotientGraph, b: QuotientGraph) -> Optional[tuple[int, ...]]:
    """A node bijection ``a -> b`` preserving edges and ports, or ``None``."""
    if a.node_count != b.node_count or len(a.edges) != len(b.edges):
        return None
    if sorted(a.port_degree) != sorted(b.port_degree):
        return None
    target = Counter(b.edges)
    n = a.node_count
    for anchor in range(n):
        f = [-1] * n
        used = [False] * n
        f[0] = anchor
        used[anchor] = True
        queue = deque([0])
        ok = True
        while queue and ok:
            x = queue.popleft()
            fx = f[x]
            if a.port_degree[x] != b.port_degree[fx]:
                ok = False
                break
            for p in range(1, a.port_degree[x] + 1):
                y, y2 = a.target(x, p), b.target(fx, p)
                if f[y] == -1:
                    if used[y2]:
                        ok = False
                        break
                    f[y] = y2
                    used[y2] = True
                    queue.append(y)
                elif f[y] != y2:
                    ok = False
                    break
        if not ok or -1 in f:
            continue
        mapped = Counter(canonical_edge(f[u], p, f[v], q) for u, p, v, q in a.edges)
        if mapped == target:
            return tuple(f)
    return None


def canonical_quotient(qg: QuotientGraph) -> QuotientGraph:
    """Isomorphism-invariant representative of a connected quotient graph.

    Breadth-first relabeling in port order from every anchor; the smallest
    sorted edge tuple wins.
    """
    best = None
    n = qg.node_count
    for anchor in range(n):
        order = [-1] * n
        order[anchor] = 0
        nxt = 1
        queue = deque([anchor])
        while queue:
            x = queue.popleft()
            for p in range(1, qg.port_degree[x] + 1):
                y = qg.target(x, p)
                if order[y] == -1:
                    order[y] = nxt
                    nxt += 1
                    queue.append(y)
        if -1 in order:
            continue
        cand = QuotientGraph(n, tuple(canonical_edge(order[u], p, order[v], q) for u, p, v, q in qg.edges))
        if best is None or cand.edges < best.edges:
            best = cand
    return best if best is not None else qg


# --------------------------------------------------------------------------
# text formats

def serialize_graph(g: PortLabeledGraph) -> str:
    lines = [f"graph {g.node_count}"]
    lines += [f"edge {u} {p} {v} {q}" for u, p, v, q in g.edges]
    return "\n".join(lines) + "\n"


def serialize_quotient(qg: QuotientGraph) -> str:
    lines = [f"quotient {qg.node_count}"]
    lines += [f"edge {u} {p} {v} {q}" for u, p, v, q in qg.edges]
    return "\n".join(lines) + "\n"


def _content_lines(text: str, start: int = 1):
    for i, raw in enumerate(text.splitlines(), start):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line.split()


def _parse_block(lines, header: str):
    try:
        first_no, first = next(lines)
    except StopIteration:
        raise GraphFormatError(1, "empty input") from None
    if len(first) != 2 or first[0] != header or not first[1].isdigit():
        raise GraphFormatError(first_no, f"expected '{header} <n>'")
    n = int(first[1])
    edges: list[tuple[Edge, int]] = []
    where: dict[Edge, int] = {}
    for no, tok in lines:
        if tok[0] != "edge" or len(tok) != 5:
            raise GraphFormatError(no, f"expected 'edge <u> <p> <v> <q>', got {' '.join(tok)!r}")
        try:
            e = tuple(int(t) for t in tok[1:])
        except ValueError:
            raise GraphFormatError(no, "edge fields must be integers") from None
        ce = canonical_edge(*e)
        edges.append((ce, no))
        where.setdefault(ce, no)
    return first_no, n, edges, where


def parse_graph(text: str) -> PortLabeledGraph:
    """Parse the ``graph <n>`` / ``edge u p v q`` format; raises :class:`GraphFormatError`."""
    header_no, n, edges, where = _parse_block(_content_lines(text), "graph")
    seen: set[Edge] = set()
    for e, no in edges:
        if e in seen:
            raise GraphFormatError(no, f"duplicate edge {e}")
        seen.add(e)
    g = PortLabeledGraph(n, tuple(e for e, _ in edges))
    bad = validate(g)
    if bad:
        raise GraphFormatError(where.get(bad.edge, header_no), str(bad))
    return g


def parse_quotient(text: str) -> QuotientGraph:
    header_no, n, edges, where = _parse_block(_content_lines(text), "quotient")
    qg = QuotientGraph(n, tuple(e for e, _ in edges))
    bad = validate_quotient(qg)
    if bad:
        raise GraphFormatError(where.get(bad.edge, header_no), str(bad))
    return qg


def parse_config(text: str, base_dir=None) -> InitialConfiguration:
    """Parse a ``config`` file: a ``use <file>`` line or an inline graph block, then agent lines.

    Agent lines are ``agent <node> <id> <input>``; the input is written ``-``
    when empty and is otherwise percent-encoded (plain bit strings need no
    escaping).
    """
    from pathlib import Path
    from urllib.parse import unquote

    rows = list(_content_lines(text))
    if not rows or rows[0][1] != ["config"]:
        raise GraphFormatError(rows[0][0] if rows else 1, "expected 'config' header")
    graph = None
    graph_rows = []
    agents = []
    for no, tok in rows[1:]:
        if tok[0] == "use":
            if len(tok) != 2:
                raise GraphFormatError(no, "expected 'use <graph-file>'")
            path = Path(tok[1])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            graph = parse_graph(path.read_text())
        elif tok[0] in ("graph", "edge"):
            graph_rows.append((no, tok))
        elif tok[0] == "agent":
            if len(tok) != 4:
                raise GraphFormatError(no, "expected 'agent <node> <id> <input>'")
            try:
                node, ident = int(tok[1]), int(tok[2])
            except ValueError:
                raise GraphFormatError(no, "agent node and id must be integers") from None
            agents.append((no, node, ident, "" if tok[3] == "-" else unquote(tok[3])))
        else:
            raise GraphFormatError(no, f"unknown directive {tok[0]!r}")
    if graph_rows:
        if graph is not None:
            raise GraphFormatError(graph_rows[0][0], "both 'use' and an inline graph given")
        text_block = "\n".join(" ".join(t) for _, t in graph_rows)
        try:
            graph = parse_graph(text_block)
        except GraphFormatError as err:
            raise GraphFormatError(graph_rows[err.line - 1][0], str(err).split(": ", 1)[1]) from None
    if graph is None:
        raise GraphFormatError(1, "no graph given")
    if not agents:
        raise GraphFormatError(rows[-1][0], "no agents given")
    for no, node, ident, _ in agents:
        if not 0 <= node < graph.node_count:
            raise GraphFormatError(no, f"node {node} out of range")
    try:
        return InitialConfiguration(
            graph, tuple(a[1] for a in agents), tuple(a[2] for a in agents), tuple(a[3] for a in agents)
        )
    except ValueError as err:
        raise GraphFormatError(agents[0][0], str(err)) from None


def serialize_config(config: InitialConfiguration) -> str:
    from urllib.parse import quote

    out = ["config", serialize_graph(config.graph).rstrip("\n")]
    for s, i, w in zip(config.starts, config.ids, config.inputs):
        out.append(f"agent {s} {i} {quote(w, safe='') if w else '-'}")
    return "\n".join(out) + "\n"
