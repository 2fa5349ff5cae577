"""Named graph families, exhaustive enumeration and seeded random graphs."""
from __future__ import annotations

import itertools
from collections import deque
from functools import lru_cache

import numpy as np

from .graphs import PortLabeledGraph, QuotientGraph, check, validate

DEFAULT_SEED = 0xC0FFEE
MAX_EXHAUSTIVE_N = 4


def consistent_cycle(n: int) -> PortLabeledGraph:
    """Cycle with port 1 pointing clockwise and port 2 counterclockwise at every node."""
    if n < 3:
        raise ValueError("a simple cycle needs n >= 3")
    return PortLabeledGraph(n, tuple((v, 1, (v + 1) % n, 2) for v in range(n)))


def path(n: int) -> PortLabeledGraph:
    """Consistently labeled path: port 1 rightward, 2 leftward at internal nodes.

    Each endpoint has only port 1.
    """
    if n < 1:
        raise ValueError("a path needs n >= 1")
    edges = []
    for v in range(n - 1):
        p = 1
        q = 1 if v + 1 == n - 1 else 2
        edges.append((v, p, v + 1, q))
    return PortLabeledGraph(n, tuple(edges))


def star(n: int) -> PortLabeledGraph:
    """Center 0 joined to leaves ``1..n-1``; port ``i`` at the center leads to leaf ``i``."""
    if n < 2:
        raise ValueError("a star needs n >= 2")
    return PortLabeledGraph(n, tuple((0, i, i, 1) for i in range(1, n)))


def sun(m: int) -> PortLabeledGraph:
    """Consistent ``m``-cycle with a pendant leaf on every cycle node.

    Cycle nodes are ``0..m-1``; the leaf of ``v`` is ``m + v``, attached by
    port 3 at ``v`` and port 1 at the leaf.
    """
    if m < 3:
        raise ValueError("a sun needs m >= 3")
    cyc = [(v, 1, (v + 1) % m, 2) for v in range(m)]
    rays = [(v, 3, m + v, 1) for v in range(m)]
    return PortLabeledGraph(2 * m, tuple(cyc + rays))


def _bfs_relabel(g: PortLabeledGraph, anchor: int) -> tuple[int, ...]:
    order = [-1] * g.node_count
    order[anchor] = 0
    nxt = 1
    queue = deque([anchor])
    while queue:
        x = queue.popleft()
        for y, _ in g.adj[x]:
            if order[y] == -1:
                order[y] = nxt
                nxt += 1
                queue.append(y)
    return tuple(order)


def canonical_form(g: PortLabeledGraph) -> PortLabeledGraph:
    """Isomorphism-invariant representative of a valid graph.

    BFS from every anchor, numbering nodes in port order, and keep the
    relabeling with the smallest edge tuple.
    """
    best = None
    for anchor in range(g.node_count):
        h = g.relabel(_bfs_relabel(g, anchor))
        if best is None or h.edges < best.edges:
            best = h
    return best


def _labeled_connected_edge_sets(n: int):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        chosen = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        if len(chosen) < n - 1:
            continue
        seen = {0}
        frontier = [0]
        while frontier:
            x = frontier.pop()
            for u, v in chosen:
                for a, b in ((u, v), (v, u)):
                    if a == x and b not in seen:
                        seen.add(b)
                        frontier.append(b)
        if len(seen) == n:
            yield chosen


def port_assignments(n: int, pairs):
    """Every port labeling of the simple graph on ``n`` nodes with edge set ``pairs``."""
    incident = [[j for j, (u, v) in enumerate(pairs) if x in (u, v)] for x in range(n)]
    for perms in itertools.product(*(itertools.permutations(inc) for inc in incident)):
        port_of = {}
        for x, perm in enumerate(perms):
            for port, j in enumerate(perm, 1):
                port_of[(x, j)] = port
        yield PortLabeledGraph(
            n, tuple((u, port_of[(u, j)], v, port_of[(v, j)]) for j, (u, v) in enumerate(pairs))
        )


@lru_cache(maxsize=None)
def enumerate_connected(n: int) -> tuple[PortLabeledGraph, ...]:
    """Every connected port-labeled graph on ``n`` nodes, one per isomorphism class.

    Graphs come out in canonical form, sorted by edge count and then by edge
    tuple.  Exhaustive over all labeled graphs and port assignments, so only
    ``n <= 4`` is allowed.
    """
    if not 1 <= n <= MAX_EXHAUSTIVE_N:
        raise ValueError(f"exhaustive enumeration supports 1 <= n <= {MAX_EXHAUSTIVE_N}")
    if n == 1:
        return (PortLabeledGraph(1, ()),)
    forms = {}
    for pairs in _labeled_connected_edge_sets(n):
        for g in port_assignments(n, pairs):
            c = canonical_form(g)
            forms[c.edges] = c
    return tuple(sorted(forms.values(), key=lambda g: (len(g.edges), g.edges)))


def random_graph(n: int, density: float = 0.3, seed=DEFAULT_SEED) -> PortLabeledGraph:
    """Random connected graph: a random spanning tree plus each other pair with prob. ``density``.

    Ports are shuffled independently at every node.  ``seed`` may be an int or
    a ``numpy.random.Generator``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    order = rng.permutation(n)
    pairs = set()
    for i in range(1, n):
        j = int(rng.integers(i))
        pairs.add(tuple(sorted((int(order[i]), int(order[j])))))
    for u, v in itertools.combinations(range(n), 2):
        if (u, v) not in pairs and rng.random() < density:
            pairs.add((u, v))
    pairs = sorted(pairs)
    incident = [[j for j, (u, v) in enumerate(pairs) if x in (u, v)] for x in range(n)]
    port_of = {}
    for x, inc in enumerate(incident):
        for port, j in enumerate(rng.permutation(len(inc)), 1):
            port_of[(x, inc[j])] = port
    return check(
        PortLabeledGraph(n, tuple((u, port_of[(u, j)], v, port_of[(v, j)]) for j, (u, v) in enumerate(pairs)))
    )


def random_relabel(g: PortLabeledGraph, seed=DEFAULT_SEED) -> tuple[PortLabeledGraph, tuple[int, ...]]:
    """Apply a random node permutation; returns the new graph and the permutation."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    perm = tuple(int(x) for x in rng.permutation(g.node_count))
    return g.relabel(perm), perm


def _matchings(items):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for j, other in enumerate(rest):
        for m in _matchings(rest[:j] + rest[j + 1:]):
            yield ((first, other),) + m


def lifts(q: QuotientGraph, m: int):
    """Every ``m``-fold lift of ``q`` that is a simple connected graph.

    Copy ``i`` of quotient node ``u`` becomes node ``u * m + i``.  A loop or
    edge is lifted by a permutation of the copies, a half-loop by a perfect
    matching.  Lifts come out in a fixed order; isomorphic repeats are not
    removed.
    """
    choices = []
    for u, p, v, q2 in q.edges:
        if (u, p) == (v, q2):
            if m % 2:
                return
            choices.append([tuple(x for pair in mt for x in (pair, pair[::-1]))
                            for mt in _matchings(list(range(m)))])
        else:
            choices.append([tuple(enumerate(perm)) for perm in itertools.permutations(range(m))])
    for pick in itertools.product(*choices):
        edges = set()
        for (u, p, v, q2), pairs in zip(q.edges, pick):
            half = (u, p) == (v, q2)
            for i, j in pairs:
                if half and i > j:
                    continue
                edges.add((u * m + i, p, v * m + j, q2))
        g = PortLabeledGraph(q.node_count * m, tuple(edges))
        if validate(g) is None:
            yield g
