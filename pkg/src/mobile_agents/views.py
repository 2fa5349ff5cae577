"""Truncated views, view-equivalence partitions and quotient graphs.

View trees are hash-consed: structurally equal trees are the same Python
object, so equality is identity and a depth-``t`` view of an ``n``-node graph
costs ``O(n * t)`` tree nodes instead of ``deg ** t``.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .graphs import PortLabeledGraph, QuotientGraph, canonical_edge


class ViewTree:
    """Rooted tree of port-labeled walks, cut at a fixed depth.

    ``children[p - 1] == (q, subtree)``: leaving the root by port ``p``
    arrives by port ``q`` at the root of ``subtree``.  A depth-0 tree is a
    single node that only records the degree.
    """

    __slots__ = ("degree", "depth", "children", "_hash", "_trunc", "_size", "__weakref__")
    _interned: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()

    def __new__(cls, degree: int, children: tuple = ()):
        depth = children[0][1].depth + 1 if children else 0
        if children and len(children) != degree:
            raise ValueError("an inner view node needs one child per port")
        key = (degree, depth, children)
        node = cls._interned.get(key)
        if node is None:
            node = super().__new__(cls)
            node.degree = degree
            node.depth = depth
            node.children = children
            node._hash = hash(key)
            node._trunc = {}
            node._size = None
            cls._interned[key] = node
        return node

    @classmethod
    def leaf(cls, degree: int) -> "ViewTree":
        return cls(degree, ())

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other

    def __reduce__(self):
        return (ViewTree, (self.degree, self.children))

    def truncate(self, depth: int) -> "ViewTree":
        """The top ``depth`` levels of this tree."""
        if depth >= self.depth:
            return self
        if depth == 0:
            return ViewTree.leaf(self.degree)
        hit = self._trunc.get(depth)
        if hit is None:
            hit = ViewTree(self.degree, tuple((q, c.truncate(depth - 1)) for q, c in self.children))
            self._trunc[depth] = hit
        return hit

    def node_count(self) -> int:
        """Number of nodes of the (unshared) tree."""
        if self._size is None:
            self._size = 1 + sum(c.node_count() for _, c in self.children)
        return self._size

    def __repr__(self):
        if not self.children:
            return f"({self.degree})"
        inner = " ".join(f"[{p}:{q} {c!r}]" for p, (q, c) in enumerate(self.children, 1))
        return f"({self.degree} {inner})"


def _view_levels(g: PortLabeledGraph, t: int) -> list[ViewTree]:
    level = [ViewTree.leaf(d) for d in g.degrees]
    for _ in range(t):
        level = [
            ViewTree(len(nbrs), tuple((q, level[u]) for u, q in nbrs)) if nbrs else ViewTree.leaf(0)
            for nbrs in g.adj
        ]
    return level


def truncated_view(g: PortLabeledGraph, v: int, t: int) -> ViewTree:
    if t < 0:
        raise ValueError("depth must be non-negative")
    return _view_levels(g, t)[v]


def views_equal(g: PortLabeledGraph, u: int, v: int, t: int) -> bool:
    level = _view_levels(g, t)
    return level[u] is level[v]


def partition_by_views(g: PortLabeledGraph, t: int) -> tuple[tuple[int, ...], ...]:
    """Blocks of nodes with equal depth-``t`` views (the tree-comparison oracle)."""
    groups: dict[ViewTree, list[int]] = {}
    for v, tree in enumerate(_view_levels(g, t)):
        groups.setdefault(tree, []).append(v)
    return tuple(sorted(tuple(b) for b in groups.values()))


@dataclass(frozen=True)
class ViewPartition:
    """Fixpoint of view refinement; block ``i`` becomes quotient node ``i``."""

    graph: PortLabeledGraph
    blocks: tuple[tuple[int, ...], ...]
    stabilization_depth: int

    @property
    def class_of(self) -> tuple[int, ...]:
        out = [0] * self.graph.node_count
        for b, block in enumerate(self.blocks):
            for v in block:
                out[v] = b
        return tuple(out)


def _refine_step(g: PortLabeledGraph, labels: np.ndarray) -> np.ndarray:
    n = g.node_count
    width = max(g.degrees, default=0)
    sig = np.full((n, 2 + 2 * width), -1, dtype=np.int64)
    sig[:, 0] = labels
    sig[:, 1] = g.degrees
    for v, nbrs in enumerate(g.adj):
        for i, (u, q) in enumerate(nbrs):
            sig[v, 2 + 2 * i] = labels[u]
            sig[v, 3 + 2 * i] = q
    _, inverse = np.unique(sig, axis=0, return_inverse=True)
    return inverse.reshape(-1)


def _blocks(labels: np.ndarray) -> tuple[tuple[int, ...], ...]:
    groups: dict[int, list[int]] = {}
    for v, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(v)
    return tuple(sorted(tuple(b) for b in groups.values()))


@lru_cache(maxsize=4096)
def view_partition(g: PortLabeledGraph) -> ViewPartition:
    """Partition refinement started from degrees, iterated to a fixpoint."""
    labels = np.unique(np.asarray(g.degrees, dtype=np.int64), return_inverse=True)[1].reshape(-1)
    depth = 0
    while True:
        refined = _refine_step(g, labels)
        if refined.max(initial=0) == labels.max(initial=0):
            break
        labels = refined
        depth += 1
    return ViewPartition(g, _blocks(labels), depth)


@lru_cache(maxsize=4096)
def quotient_with_classes(g: PortLabeledGraph) -> tuple[QuotientGraph, tuple[int, ...]]:
    part = view_partition(g)
    cls = part.class_of
    edges = set()
    for b, block in enumerate(part.blocks):
        rep = block[0]
        for p, (v, q) in enumerate(g.adj[rep], 1):
            edges.add(canonical_edge(b, p, cls[v], q))
    return QuotientGraph(len(part.blocks), tuple(edges)), cls


def quotient(g: PortLabeledGraph) -> QuotientGraph:
    return quotient_with_classes(g)[0]


def quotient_from_view(vt: ViewTree, depth: Optional[int] = None) -> tuple[QuotientGraph, int]:
    """Rebuild a quotient from one truncated view, as an agent would.

    Every tree node within half the view depth is identified by its own
    half-depth subtree; nodes with equal subtrees are merged.  Returns the
    quotient and the class of the root (always 0).
    """
    d = vt.depth if depth is None else depth
    h = d // 2
    # breadth-first over the shared tree, recording the shallowest occurrence of each class
    classes: dict[ViewTree, int] = {}
    reps: list[tuple[ViewTree, int]] = []
    frontier = [vt]
    for level in range(h + 1):
        nxt: dict[ViewTree, None] = {}
        for node in frontier:
            key = node.truncate(h)
            if key not in classes:
                classes[key] = len(classes)
                reps.append((node, level))
            if level < h:
                for _, c in node.children:
                    nxt.setdefault(c, None)
        frontier = list(nxt)

    def class_of_child(child: ViewTree, level: int) -> int:
        if level + 1 <= h:
            return classes[child.truncate(h)]
        # too shallow to see the child's full half-depth view; fall back to a prefix match
        if h == 0:
            return 0
        want = child.truncate(h - 1)
        for key, c in classes.items():
            if key.truncate(h - 1) is want:
                return c
        return classes[next(iter(classes))]

    edges = set()
    for c, (node, level) in enumerate(reps):
        for p, (q, child) in enumerate(node.children, 1):
            edges.add(canonical_edge(c, p, class_of_child(child, level), q))
    return QuotientGraph(len(classes), tuple(edges)), 0

