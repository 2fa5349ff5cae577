"""The verifier for Omega = teamsize x quotient, and deciding with an Omega oracle.

Omega inputs are a branch digit followed by the branch input: ``"1" + k``
asks whether more than ``k`` agents are present, ``"2" + H`` (``H`` in the
quotient text format) whether the quotient of the graph differs from ``H``.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Callable

from ..generators import lifts
from ..graphs import (
    InitialConfiguration,
    O,
    P,
    PortLabeledGraph,
    QuotientGraph,
    canonical_quotient,
    quotient_isomorphic,
    quotient_isomorphism,
    serialize_quotient,
    validate_quotient,
)
from ..problems import OMEGA, ProblemDescriptor, Undecodable, decode_number, decode_quotient
from ..sim import Agent, Decide, ExploreView, OracleCall
from ..views import quotient_from_view, quotient_with_classes
from .deciders import decode_size
from .mapping import map_team
from .rendezvous import gather_phases, team_size_check


def omega_teamsize(k: int) -> str:
    return f"1{k}"


def omega_quotient(h: QuotientGraph) -> str:
    return "2" + serialize_quotient(h)


def verify_omega():
    """Verifier for Omega; the certificate is the claimed number of nodes ``x``."""

    def protocol(agent: Agent):
        try:
            x = decode_size(agent.certificate)
            branch, rest = OMEGA.decode(agent.input)
            if branch == 1:
                k = decode_number(rest)
            elif branch == 2:
                h = decode_quotient(rest)
            else:
                raise Undecodable("no such branch")
        except Undecodable:
            yield Decide(False)
            return
        if branch == 1:
            yield from team_size_check(agent, x, k)
            return
        view = yield ExploreView(2 * max(x, h.node_count))
        q, _ = quotient_from_view(view)
        agent.result = serialize_quotient(q)
        yield Decide(not quotient_isomorphic(q, h))

    return protocol


# --------------------------------------------------------------------------
# learning the quotient from a quotient-style oracle

@lru_cache(maxsize=None)
def candidate_quotients() -> tuple[QuotientGraph, ...]:
    """Quotients of all small graphs, by node count and then canonical edges."""
    from ..corpus import small_graphs

    seen = {}
    for g in small_graphs():
        q = canonical_quotient(quotient_with_classes(g)[0])
        seen.setdefault(q.edges, q)
    return tuple(sorted(seen.values(), key=lambda q: (q.node_count, q.edges)))


def learn_quotient(agent: Agent, encode: Callable[[QuotientGraph], str], strategy: str = "view"):
    """Find the quotient of the graph, rooted at the agent's class.

    ``encode(H)`` is the oracle query meaning "is the quotient not H?".
    With ``strategy="view"`` the candidates are the quotients read off
    views of depth 0, 2, 4, ...; with ``"enumerate"`` they are the fixed
    list :func:`candidate_quotients`, falling back to views once it runs
    out.  Either way the first no answer
    identifies the quotient; a view deep enough to rebuild it then fixes
    the agent's own class.  Returns ``(quotient, root)`` or ``None``.
    """
    if strategy not in ("view", "enumerate"):
        raise ValueError(f"unknown strategy {strategy!r}")
    fixed = iter(candidate_quotients()) if strategy == "enumerate" else None
    t = 0
    while True:
        if fixed is None:
            view = yield ExploreView(2 * t)
            h = quotient_from_view(view)[0]
            t += 1
            if validate_quotient(h) is not None:
                # a too-shallow view can give clashing ports; no oracle needed
                continue
        else:
            h = next(fixed, None)
            if h is None:
                # the list is finite; carry on with views
                fixed = None
                continue
        differs = yield OracleCall(encode(h))
        if not differs:
            break
    view = yield ExploreView(2 * h.node_count)
    q, root = quotient_from_view(view)
    f = quotient_isomorphism(q, h)
    if f is None:
        return None
    return h, f[root]


def realize(qhat: QuotientGraph, root: int) -> tuple[PortLabeledGraph, int]:
    """A simple graph with quotient ``qhat`` and a node in class ``root``.

    Lifts of ``qhat`` are tried by increasing fold; the graph itself is one
    of them, so the search ends.
    """
    m = 1
    while True:
        for g in lifts(qhat, m):
            q, cls = quotient_with_classes(g)
            f = quotient_isomorphism(q, qhat)
            if f is None:
                continue
            for v in range(g.node_count):
                if f[cls[v]] == root:
                    return g, v
        m += 1


# --------------------------------------------------------------------------
# deciding any verifiable problem with an Omega oracle

def team_size(agent: Agent):
    """Smallest ``k`` with "more than k agents" answered no, i.e. the team size."""
    k = 1
    while (yield OracleCall(omega_teamsize(k))):
        k += 1
    return k


def reduce_to_omega(problem: ProblemDescriptor, strategy: str = "view"):
    """Decide ``problem`` using only local moves and an Omega oracle.

    A team gathers, maps the graph with the leader exploring and the rest
    acting as its token, and evaluates the problem on the rebuilt
    configuration.  A lone agent learns the quotient and its own class,
    builds some graph with that quotient and evaluates the problem there;
    that is exact only for problems that cannot tell a graph from another
    with the same quotient.
    """

    def protocol(agent: Agent):
        k = yield from team_size(agent)
        if k > 1:
            group = yield from gather_phases(agent, k, mode="reduce")
            g, starts, ids, inputs = yield from map_team(agent, group.members)
            config = InitialConfiguration(g, starts, ids, inputs)
        else:
            learned = yield from learn_quotient(agent, omega_quotient, strategy)
            if learned is None:
                return
            g, t = realize(*learned)
            config = InitialConfiguration(g, (t,), (agent.id,), (agent.input,))
        agent.result = {"team": k, "graph": g.node_count}
        yield Decide(problem.ground_truth(config))

    return protocol


# --------------------------------------------------------------------------
# cycle and the complement of sun with a quotient oracle

def decide_cycle_and_cosun(which: str = "product", strategy: str = "view"):
    """Single-agent decider using the oracle for "the quotient is not H".

    ``which`` is ``"cycle"``, ``"cosun"`` or ``"product"``; the product
    reads branch ``1`` (cycle) or ``2`` (not a sun) from the input.
    """
    if which not in ("cycle", "cosun", "product"):
        raise ValueError(f"unknown variant {which!r}")

    def protocol(agent: Agent):
        part = which
        if which == "product":
            part = {"1": "cycle", "2": "cosun"}.get(agent.input)
            if part is None:
                yield Decide(False)
                return
        learned = yield from learn_quotient(agent, serialize_quotient, strategy)
        if learned is None:
            return
        qhat, _ = learned
        agent.result = serialize_quotient(qhat)
        if part == "cycle":
            yield Decide(quotient_isomorphic(qhat, O))
        else:
            yield Decide(not quotient_isomorphic(qhat, P))

    return protocol
