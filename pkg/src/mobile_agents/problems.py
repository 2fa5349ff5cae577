"""Decision problems over initial configurations, with exact ground truth.

A problem is a set of configurations ``(G, S, Id, w)``.  Ground truth is
computed with full access to the configuration and is the reference the
protocols are checked against.  Inputs are strings; problems that take a
number expect it in decimal, problems that take a graph expect the text
format of :mod:`mobile_agents.graphs`.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

from .graphs import (
    O,
    P,
    GraphFormatError,
    InitialConfiguration,
    PortLabeledGraph,
    QuotientGraph,
    automorphisms,
    canonical_quotient,
    isomorphic,
    parse_graph,
    parse_quotient,
    quotient_isomorphic,
    serialize_graph,
    serialize_quotient,
)
from .views import quotient

_NUMBER = re.compile(r"(0|[1-9][0-9]*)\Z")


class Undecodable(ValueError):
    pass


def decode_number(w: str) -> int:
    if not _NUMBER.match(w):
        raise Undecodable(f"not a decimal number: {w!r}")
    return int(w)


def decode_quotient(w: str) -> QuotientGraph:
    try:
        return parse_quotient(w)
    except (GraphFormatError, ValueError) as exc:
        raise Undecodable(str(exc)) from exc


def decode_graph(w: str) -> PortLabeledGraph:
    try:
        return parse_graph(w)
    except (GraphFormatError, ValueError) as exc:
        raise Undecodable(str(exc)) from exc


def decode_empty(w: str) -> None:
    if w != "":
        raise Undecodable("this problem takes no input")
    return None


@dataclass(frozen=True)
class ProblemDescriptor:
    """A decision problem.

    For ``uniform`` problems every agent holds the same input, decoded once
    by ``decode`` and handed to ``truth(config, value)``.  Non-uniform
    problems see the raw per-agent inputs through the configuration.
    ``tags`` are informal class labels for reports only.
    """

    name: str
    uniform: bool
    decode: Callable[[str], Any]
    truth: Callable[[InitialConfiguration, Any], bool]
    sample_inputs: Callable[[PortLabeledGraph, int], Sequence[Sequence[str]]] = field(repr=False)
    tags: tuple[str, ...] = ()
    doc: str = ""

    def ground_truth(self, config: InitialConfiguration) -> bool:
        """Exact membership; undecodable or inconsistent inputs mean no."""
        if self.uniform:
            if len(set(config.inputs)) != 1:
                return False
            try:
                value = self.decode(config.inputs[0])
            except Undecodable:
                return False
            return bool(self.truth(config, value))
        try:
            values = [self.decode(w) for w in config.inputs]
        except Undecodable:
            return False
        return bool(self.truth(config, values))

    __call__ = ground_truth


# --------------------------------------------------------------------------
# graph predicates

def is_tree(g: PortLabeledGraph) -> bool:
    return len(g.edges) == g.node_count - 1


def is_path(g: PortLabeledGraph) -> bool:
    return is_tree(g) and max(g.degrees, default=0) <= 2


def is_consistent_cycle(g: PortLabeledGraph) -> bool:
    """Cycle with every edge carrying ports 1 and 2 at its two ends."""
    return (
        g.node_count >= 3
        and all(d == 2 for d in g.degrees)
        and all({p, q} == {1, 2} for _, p, _, q in g.edges)
    )


def is_consistent_sun(g: PortLabeledGraph) -> bool:
    """Consistent cycle whose every node carries one pendant leaf on port 3."""
    n = g.node_count
    if n < 6 or n % 2:
        return False
    core = [v for v in range(n) if g.degree(v) == 3]
    if len(core) != n // 2 or sum(1 for d in g.degrees if d == 1) != n // 2:
        return False
    for v in core:
        leaf, q = g.neighbor(v, 3)
        if g.degree(leaf) != 1 or q != 1:
            return False
        for p in (1, 2):
            u, q = g.neighbor(v, p)
            if g.degree(u) != 3 or q != 3 - p:
                return False
    return True


# --------------------------------------------------------------------------
# the named problems

def _numbers(lo: int, hi: int):
    return lambda g, k: [[str(i)] * k for i in range(lo, hi + 1)]


def _nothing(g, k):
    return [[""] * k]


def _leader_inputs(g, k):
    return [list(bits) for bits in itertools.product("01", repeat=k)]


def _quotient_inputs(g, k):
    qs = [O, P, quotient(g)]
    return [[serialize_quotient(q)] * k for q in qs]


def _map_inputs(g, k):
    other = PortLabeledGraph(g.node_count, g.edges[:-1]) if g.edges else g
    return [[serialize_graph(g)] * k, [serialize_graph(other)] * k]


def _input_free(name, pred, tags, doc):
    return ProblemDescriptor(name, True, decode_empty, lambda c, _: pred(c), _nothing, tags, doc)


TEAMSIZE = ProblemDescriptor(
    "teamsize", True, decode_number, lambda c, k: c.team_size > k, _numbers(0, 4),
    ("MAV", "co-MAV"), "more than k agents",
)
NODES = ProblemDescriptor(
    "#nodes", True, decode_number, lambda c, n: c.graph.node_count == n, _numbers(1, 5),
    ("MAV",), "the graph has n nodes",
)
TREE = _input_free("tree", lambda c: is_tree(c.graph), ("MAV",), "the graph is a tree")
TREESIZE = ProblemDescriptor(
    "treesize", True, decode_number,
    lambda c, n: is_tree(c.graph) and c.graph.node_count == n, _numbers(1, 5),
    ("MAD",), "a tree with n nodes",
)


def decode_bit(w: str) -> str:
    if w not in ("0", "1"):
        raise Undecodable("one bit expected")
    return w


LEADER = ProblemDescriptor(
    "leader", False, decode_bit,
    lambda c, bits: bits.count("1") == 1, _leader_inputs,
    ("MAD",), "exactly one agent holds input 1",
)
ODD = _input_free(
    "odd",
    lambda c: all(c.graph.degree(s) % 2 == 1 for s in c.starts)
    and all(any(v != s and c.graph.degree(v) % 2 for v in range(c.graph.node_count)) for s in c.starts),
    ("MAD",), "every start has odd degree and some other node has odd degree",
)
PATH = _input_free("path", lambda c: is_path(c.graph), ("MAV",), "the graph is a path")
LEAF = _input_free("leaf", lambda c: 1 in c.graph.degrees, ("MAV",), "some node has degree 1")
CYCLE = _input_free("cycle", lambda c: is_consistent_cycle(c.graph), ("MAD1^quotient",),
                    "a consistently labeled cycle")
SUN = _input_free("sun", lambda c: is_consistent_sun(c.graph), ("co-MAD1^quotient",),
                  "a consistently labeled sun")
QUOTIENT = ProblemDescriptor(
    "quotient", True, decode_quotient,
    lambda c, h: not quotient_isomorphic(quotient(c.graph), h), _quotient_inputs,
    ("MAV",), "the quotient of the graph differs from H",
)
MAP = ProblemDescriptor(
    "map", True, decode_graph, lambda c, h: isomorphic(c.graph, h) is not None, _map_inputs,
    ("oracle",), "the graph is H",
)


def degree_k(k: int) -> ProblemDescriptor:
    return _input_free(
        f"degree_{k}", lambda c: k in c.graph.degrees, ("MAV",), f"some node has degree {k}"
    )


# --------------------------------------------------------------------------
# constructions

def product(*problems: ProblemDescriptor, name: Optional[str] = None) -> ProblemDescriptor:
    """Inputs ``i`` followed by the component input select problem ``i`` (1-based)."""
    if not problems:
        raise ValueError("a product needs at least one factor")
    if len(problems) > 9:
        raise ValueError("branch index must fit one decimal digit")

    def split(w: str):
        if not w or not w[0].isdigit():
            raise Undecodable("missing branch digit")
        return int(w[0]), w[1:]

    def truth(c: InitialConfiguration, parts):
        branches = {i for i, _ in parts}
        if len(branches) != 1:
            return False
        i = branches.pop()
        if not 1 <= i <= len(problems):
            return False
        inner = InitialConfiguration(c.graph, c.starts, c.ids, tuple(w for _, w in parts))
        return problems[i - 1].ground_truth(inner)

    def samples(g, k):
        out = []
        for i, p in enumerate(problems, 1):
            out += [[f"{i}{w}" for w in ws] for ws in p.sample_inputs(g, k)]
        out.append([f"{len(problems) + 1}"] * k)
        return out

    return ProblemDescriptor(
        name or " x ".join(p.name for p in problems),
        False, split, truth, samples, ("product",),
        "branch i of the input selects factor i",
    )


def complement(problem: ProblemDescriptor) -> ProblemDescriptor:
    return ProblemDescriptor(
        problem.name[4:] if problem.name.startswith("not ") else f"not {problem.name}",
        False, lambda w: w, lambda c, _: not problem.ground_truth(c),
        problem.sample_inputs, ("complement",), f"complement of {problem.name}",
    )


_OMEGA_PRODUCT = product(TEAMSIZE, QUOTIENT)
OMEGA = ProblemDescriptor(
    "omega", True, _OMEGA_PRODUCT.decode,
    lambda c, part: _OMEGA_PRODUCT.truth(c, [part] * c.team_size),
    _OMEGA_PRODUCT.sample_inputs, ("MAV-complete",), "teamsize x quotient, a uniform product",
)

REGISTRY: dict[str, ProblemDescriptor] = {
    p.name: p
    for p in [TEAMSIZE, NODES, TREE, TREESIZE, LEADER, ODD, PATH, LEAF, CYCLE, SUN, QUOTIENT, MAP, OMEGA]
    + [degree_k(k) for k in range(1, 5)]
}


def get_problem(name: str) -> ProblemDescriptor:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; known: {', '.join(sorted(REGISTRY))}") from None


def oracle_env(problem: ProblemDescriptor, config: InitialConfiguration) -> Callable[[str], bool]:
    """Black box answering ``w`` with the membership of ``config`` carrying ``w`` at every agent."""
    if not problem.uniform:
        raise ValueError(f"{problem.name} is not uniform and cannot serve as an oracle")

    def ask(w: str) -> bool:
        return problem.ground_truth(config.with_inputs(w))

    return ask


# --------------------------------------------------------------------------
# closure under automorphisms

def configurations(g: PortLabeledGraph, problem: ProblemDescriptor, max_agents: int = 2):
    """Small configurations on ``g``: every start multiset up to ``max_agents``, sampled inputs."""
    n = g.node_count
    for k in range(1, max_agents + 1):
        ids = tuple(range(1, k + 1))
        for starts in itertools.product(range(n), repeat=k):
            for inputs in problem.sample_inputs(g, k):
                yield InitialConfiguration(g, starts, ids, tuple(inputs))


def closure_check(problem: ProblemDescriptor, g: PortLabeledGraph, max_agents: int = 2):
    """``None`` if ground truth is invariant under every automorphism, else ``(alpha, config)``."""
    autos = automorphisms(g)
    for config in configurations(g, problem, max_agents):
        base = problem.ground_truth(config)
        for alpha in autos:
            if problem.ground_truth(config.transport(alpha)) != base:
                return alpha, config
    return None


# --------------------------------------------------------------------------
# the same-size, same-quotient, non-isomorphic witness

def quotient_key(g: PortLabeledGraph) -> tuple:
    return canonical_quotient(quotient(g)).edges


def witness_same_quotient_nonisomorphic(
    max_n: int, graphs: Optional[Iterable[PortLabeledGraph]] = None
) -> Optional[tuple[PortLabeledGraph, PortLabeledGraph]]:
    """First pair (in corpus order) with equal size and quotient but no isomorphism.

    The default search space is every graph with at most four nodes followed
    by lifts of their quotients up to ``max_n`` nodes (see
    :func:`mobile_agents.corpus.witness_search_space`).  Returns ``None`` when nothing is found.
    """
    if max_n < 4:
        raise ValueError("max_n must be at least 4")
    if graphs is None:
        from .corpus import witness_search_space

        graphs = witness_search_space(max_n)
    seen: dict[tuple, list[PortLabeledGraph]] = {}
    for g in graphs:
        if g.node_count > max_n:
            continue
        key = (g.node_count, quotient_key(g))
        for h in seen.get(key, ()):
            if isomorphic(h, g) is None:
                return h, g
        seen.setdefault(key, []).append(g)
    return None
