"""Protocols by stable name.

Each entry builds a protocol from an optional argument string and the
configuration it will run on (defaults such as the graph size for ``rdv``
come from there; the agents themselves never see it otherwise).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ..graphs import InitialConfiguration
from ..problems import get_problem
from ..sim import Protocol
from . import deciders, omega
from .mapping import token_map
from .rendezvous import gather, rdv


@dataclass(frozen=True)
class ProtocolEntry:
    name: str
    build: Callable[[Optional[str], InitialConfiguration], Protocol]
    oracle: Optional[str] = None
    token: bool = False
    arg: str = ""
    doc: str = ""


def _int(arg: Optional[str], default: int) -> int:
    return default if arg is None else int(arg)


def _required(arg: Optional[str], what: str) -> str:
    if arg is None:
        raise ValueError(f"this protocol needs an argument: {what}")
    return arg


_ENTRIES = [
    ProtocolEntry("rdv", lambda a, c: rdv(_int(a, c.graph.node_count)), arg="n (default: graph size)",
                  doc="two-agent rendezvous"),
    ProtocolEntry("gather", lambda a, c: gather(_int(a, c.team_size)), arg="k (default: team size)",
                  doc="gathering without knowing n"),
    ProtocolEntry("token-map", lambda a, c: token_map(), token=True,
                  doc="one agent maps the graph with a token placed at its start"),
    ProtocolEntry("treesize", lambda a, c: deciders.decide_treesize(), doc="decider, input n"),
    ProtocolEntry("odd", lambda a, c: deciders.decide_odd(), doc="decider"),
    ProtocolEntry("verify-tree", lambda a, c: deciders.verify_tree(), doc="verifier, certificate n"),
    ProtocolEntry("verify-path", lambda a, c: deciders.verify_path(), doc="verifier, certificate n"),
    ProtocolEntry("verify-leaf", lambda a, c: deciders.verify_leaf(), doc="verifier, certificate: ports"),
    ProtocolEntry("verify-degree", lambda a, c: deciders.verify_degree_k(int(_required(a, "k"))), arg="k",
                  doc="verifier, certificate: ports"),
    ProtocolEntry("dovetail-treesize", lambda a, c: deciders.treesize_dovetail(),
                  doc="single-agent decider from the treesize verifier pair, input n"),
    ProtocolEntry("omega-verify", lambda a, c: omega.verify_omega(), doc="verifier, certificate n"),
    ProtocolEntry("reduce", lambda a, c: omega.reduce_to_omega(get_problem(_required(a, "problem"))),
                  oracle="omega", arg="problem name", doc="decides a problem with the omega oracle"),
    ProtocolEntry("cycle-cosun", lambda a, c: omega.decide_cycle_and_cosun(a or "product"),
                  oracle="quotient", arg="cycle | cosun | product (default)",
                  doc="single agent with the quotient oracle"),
]

REGISTRY: dict[str, ProtocolEntry] = {e.name: e for e in _ENTRIES}


def get_protocol(spec: str) -> tuple[ProtocolEntry, Optional[str]]:
    """Look up ``name`` or ``name:arg``."""
    name, _, arg = spec.partition(":")
    try:
        return REGISTRY[name], (arg or None)
    except KeyError:
        raise KeyError(f"unknown protocol {name!r}; known: {', '.join(sorted(REGISTRY))}") from None
