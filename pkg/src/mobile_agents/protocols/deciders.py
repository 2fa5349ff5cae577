"""Deciders and verifiers for the named problems, and certificate dovetailing.

Certificates that stand for a size are decimal numerals, like inputs.  Path
certificates are comma-separated ports (``"1,3,2"``; the empty string is the
empty path).
"""
from __future__ import annotations

import itertools
import re
from typing import Callable, Iterator, Optional

from ..problems import Undecodable, decode_number
from ..sim import Agent, Decide, Stay, Walk, fixed_ports
from .walks import TreeWalkState, tree_walk_rule

_PORTS = re.compile(r"([1-9][0-9]*(,[1-9][0-9]*)*)?\Z")
_BINARY = re.compile(r"(0|1[01]*)\Z")


def decode_size(x: str) -> int:
    n = decode_number(x)
    if n < 1:
        raise Undecodable("a size must be positive")
    return n


def decode_ports(x: str) -> list[int]:
    if not _PORTS.match(x):
        raise Undecodable(f"not a port list: {x!r}")
    return [int(p) for p in x.split(",")] if x else []


def tree_walk(agent: Agent, budget: int):
    """Walk as if on a tree for ``budget`` steps, then home; returns what was seen."""
    state = TreeWalkState()
    yield Walk(tree_walk_rule(budget, agent.obs.degree, state))
    return state


def _claims_tree(state: TreeWalkState, n: int) -> bool:
    return state.complete and state.nodes == n


# --------------------------------------------------------------------------
# deciders

def decide_treesize():
    """Decide 'a tree with n nodes' from the common input ``n``.

    A tree with ``n`` nodes is walked completely in ``2(n-1)`` steps; on a
    graph with a cycle the tree-shaped walk never runs out of ports.
    """

    def protocol(agent: Agent):
        try:
            n = decode_size(agent.input)
        except Undecodable:
            yield Decide(False)
            return
        state = yield from tree_walk(agent, 2 * (n - 1))
        agent.result = {"nodes": state.nodes, "complete": state.complete}
        yield Decide(_claims_tree(state, n))

    return protocol


def decide_odd():
    """Yes iff the start has odd degree; by the handshake lemma another odd node then exists."""

    def protocol(agent: Agent):
        yield Decide(agent.obs.degree % 2 == 1)

    return protocol


# --------------------------------------------------------------------------
# verifiers

def _size_verifier(accept: Callable[[TreeWalkState, int], bool], decode=decode_size):
    def protocol(agent: Agent):
        try:
            x = decode(agent.certificate)
        except Undecodable:
            yield Decide(False)
            return
        state = yield from tree_walk(agent, 2 * (x - 1))
        agent.result = {"nodes": state.nodes, "complete": state.complete}
        yield Decide(accept(state, x))

    return protocol


def verify_tree():
    """Certificate: the number of nodes."""
    return _size_verifier(_claims_tree)


def verify_path():
    """Certificate: the number of nodes; a tree whose degrees never exceed two."""
    return _size_verifier(lambda s, x: _claims_tree(s, x) and max(s.degrees) <= 2)


def _follow_checked(ports: list[int], degree: int, out: dict):
    """Walk rule taking ``ports`` while they exist; records the final degree."""
    out["ok"] = True
    for p in ports:
        if not 1 <= p <= degree:
            out["ok"] = False
            break
        degree, _ = yield p
    out["degree"] = degree


def _endpoint_verifier(target: int):
    def protocol(agent: Agent):
        try:
            ports = decode_ports(agent.certificate)
        except Undecodable:
            yield Decide(False)
            return
        out: dict = {}
        yield Walk(_follow_checked(ports, agent.obs.degree, out))
        yield Decide(out["ok"] and out["degree"] == target)

    return protocol


def verify_leaf():
    """Certificate: ports of a path from the start to a leaf."""
    return _endpoint_verifier(1)


def verify_degree_k(k: int):
    """Certificate: ports of a path from the start to a node of degree ``k``."""
    return _endpoint_verifier(k)


# --------------------------------------------------------------------------
# dovetailing a verifier for a problem against one for its complement

def length_lex(alphabet: str = "01") -> Iterator[str]:
    """Every string over ``alphabet``, shortest first, then lexicographically."""
    for size in itertools.count():
        for letters in itertools.product(alphabet, repeat=size):
            yield "".join(letters)


def way_back(trail) -> list[int]:
    """Ports leading back to where ``trail`` started.

    Leaving by the port one entered returns to the previous node, so such
    back-and-forth steps cancel before retracing.
    """
    stack: list[tuple[int, int]] = []
    for exit_port, entry in trail:
        if stack and exit_port == stack[-1][1]:
            stack.pop()
        else:
            stack.append((exit_port, entry))
    return [entry for _, entry in reversed(stack)]


def _verdict(agent: Agent, verifier, certificate: str):
    """Run ``verifier`` with ``certificate`` as a subroutine, then walk home.

    Returns the verifier's decision (``None`` if it stopped without one).
    """
    saved = agent.certificate, agent.exposed.get("certificate")
    agent.certificate = agent.exposed["certificate"] = certificate
    mark = len(agent.trail)
    gen = verifier(agent)
    verdict: Optional[bool] = None
    value = None
    try:
        action = next(gen)
        while True:
            if isinstance(action, Decide):
                verdict = bool(action.value)
                gen.close()
                break
            value = yield action
            action = gen.send(value)
    except StopIteration:
        pass
    agent.certificate, agent.exposed["certificate"] = saved
    back = way_back(agent.trail[mark:])
    if back:
        yield Walk(fixed_ports(back))
    return verdict


def dovetail_decide(verifier_yes, verifier_no, certificates: Callable[[], Iterator[str]] = length_lex):
    """Single-agent decider from a verifier for a problem and one for its complement.

    Certificates are tried in ``certificates()`` order.  Each try costs at
    least one round, so a pair that never accepts runs into the round budget
    instead of spinning.
    """

    def protocol(agent: Agent):
        for x in certificates():
            if (yield from _verdict(agent, verifier_yes, x)):
                agent.result = {"certificate": x, "side": "yes"}
                yield Decide(True)
                return
            if (yield from _verdict(agent, verifier_no, x)):
                agent.result = {"certificate": x, "side": "no"}
                yield Decide(False)
                return
            yield Stay(1)

    return protocol


def decode_binary_size(x: str) -> int:
    if not _BINARY.match(x) or x == "0":
        raise Undecodable(f"not a positive binary numeral: {x!r}")
    return int(x, 2)


def treesize_yes_verifier():
    """Verifies 'a tree with n nodes' (input ``n``) from a binary certificate equal to ``n``."""

    def accept(state, x):
        return _claims_tree(state, x)

    inner = _size_verifier(accept, decode_binary_size)

    def protocol(agent: Agent):
        try:
            n = decode_size(agent.input)
            x = decode_binary_size(agent.certificate)
        except Undecodable:
            yield Decide(False)
            return
        if x != n:
            yield Decide(False)
            return
        yield from inner(agent)

    return protocol


def treesize_no_verifier():
    """Verifies the complement of treesize; the certificate is ignored."""
    decide = decide_treesize()

    def protocol(agent: Agent):
        gen = decide(agent)
        action = next(gen)
        while not isinstance(action, Decide):
            action = gen.send((yield action))
        gen.close()
        yield Decide(not action.value)

    return protocol


def treesize_dovetail():
    return dovetail_decide(treesize_yes_verifier(), treesize_no_verifier())


def never_accepts():
    """A verifier that rejects every certificate (a negative control)."""

    def protocol(agent: Agent):
        yield Decide(False)

    return protocol
