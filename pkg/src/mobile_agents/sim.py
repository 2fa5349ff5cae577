"""Synchronous simulator for deterministic mobile agents.

A protocol is a generator function taking an :class:`Agent` handle.  It
yields actions and is sent back what the action produces:

* ``Move``, ``Walk``, ``Continue``, ``Stay``, ``Follow`` consume rounds and
  return the next :class:`Observation`;
* ``OracleCall`` returns the oracle's boolean answer within the same round;
* ``PlaceToken`` / ``PickToken`` act on the current node within the same
  round and return a fresh observation;
* ``ExploreView`` walks the whole depth-``d`` port-sequence tree and returns
  the :class:`~mobile_agents.views.ViewTree`, charging the walk's exact
  round count;
* ``Decide`` ends the agent.

A ``Walk`` carries a local rule: a generator that yields ports and is sent
``(degree, entry_port)`` after every step, so it sees exactly what the agent
would see.  The simulator unrolls the rule when the walk starts and then
skips ahead to the next round where something can happen.  Observations
never contain node indices.  Meetings are end-of-round co-location.
"""
from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Generator, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .graphs import InitialConfiguration
from .views import ViewTree, truncated_view


@dataclass(frozen=True)
class Move:
    port: int


@dataclass(frozen=True)
class Walk:
    """Follow a local rule for several rounds.

    With ``interruptible`` the agent is resumed early (mid-walk) whenever the
    set of agents sharing its node changes; it may then yield ``Continue()``.
    Otherwise it only resumes when the rule is exhausted.  Walks given a
    ``key`` promise that the rule depends on nothing but the key and what it
    sees, so their unrolling is shared between runs.
    """

    rule: Generator
    interruptible: bool = False
    key: Optional[tuple] = None


@dataclass(frozen=True)
class Continue:
    """Resume the walk that was just interrupted."""


@dataclass(frozen=True)
class Stay:
    """Stay put for up to ``rounds`` rounds.

    The wait ends early when the set of co-located agents changes.
    """

    rounds: int = 1


@dataclass(frozen=True)
class Follow:
    """Repeat the moves of a co-located leader, every round until resumed.

    The follower is resumed whenever its leader is, or its company changes.
    """

    leader: int


@dataclass(frozen=True)
class Decide:
    value: bool


@dataclass(frozen=True)
class OracleCall:
    query: str


@dataclass(frozen=True)
class PlaceToken:
    pass


@dataclass(frozen=True)
class PickToken:
    pass


@dataclass(frozen=True)
class ExploreView:
    depth: int


Action = Union[Move, Walk, Continue, Stay, Follow, Decide, OracleCall, PlaceToken, PickToken, ExploreView]


def fixed_ports(ports: Iterable[int]) -> Generator:
    """Walk rule that takes the given ports regardless of what it sees."""
    for p in ports:
        yield p


@dataclass(frozen=True)
class Observation:
    round: int
    degree: int
    entry_port: Optional[int]
    exit_port: Optional[int]
    others: tuple[tuple[int, Mapping[str, Any]], ...]
    token: bool

    @property
    def other_ids(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.others)

    def memory_of(self, agent_id: int) -> Optional[Mapping[str, Any]]:
        for i, mem in self.others:
            if i == agent_id:
                return mem
        return None


class Agent:
    """What a protocol instance can see and touch.

    ``exposed`` is the agent's shared memory: co-located agents receive a
    shallow snapshot of it, so values stored there should be immutable.
    ``trail`` lists ``(exit_port, entry_port)`` for every move the agent made,
    including moves made while following.  ``met`` collects every id seen so
    far, walks included.  After a walk, ``walked`` is the number of steps
    taken and ``interrupted`` tells whether the walk was cut short.
    """

    def __init__(self, ident: int, inp: str, certificate: str):
        self.id = ident
        self.input = inp
        self.certificate = certificate
        self.exposed: dict[str, Any] = {"id": ident, "input": inp, "certificate": certificate}
        self.obs: Optional[Observation] = None
        self.trail: list[tuple[int, int]] = []
        self.met: set[int] = set()
        self.walked = 0
        self.interrupted = False
        self.result: Any = None
        self.holding_token = False


Protocol = Callable[[Agent], Generator[Action, Any, None]]


class SimulationFault(RuntimeError):
    def __init__(self, agent: int, round_: int, message: str):
        super().__init__(f"agent {agent}, round {round_}: {message}")
        self.agent = agent
        self.round = round_


@dataclass
class RunOutcome:
    decisions: dict[int, Optional[bool]]
    decided_at: dict[int, Optional[int]]
    rounds_used: int
    exhausted: bool
    oracle_log: list[tuple[int, int, str, bool]]
    outputs: dict[int, Any]
    actions: dict[int, list[tuple[int, Action]]]
    paths: dict[int, list[tuple[int, int]]]
    trace: Optional[list[dict]] = None

    @property
    def undecided(self) -> list[int]:
        return [i for i, d in self.decisions.items() if d is None]

    @property
    def all_decided(self) -> bool:
        return not self.undecided

    @property
    def unanimous(self) -> bool:
        return len(set(self.decisions.values())) == 1

    def decision_vector(self) -> tuple[Optional[bool], ...]:
        return tuple(self.decisions[i] for i in sorted(self.decisions))

    def position(self, agent_id: int, round_: int) -> int:
        path = self.paths[agent_id]
        i = bisect.bisect_right(path, (round_, float("inf"))) - 1
        return path[i][1]

    def first_meeting(self, a: int, b: int) -> Optional[int]:
        """First round at which agents ``a`` and ``b`` share a node."""
        rounds = sorted({r for r, _ in self.paths[a]} | {r for r, _ in self.paths[b]})
        for r in rounds:
            if self.position(a, r) == self.position(b, r):
                return r
        return None

    def gathered(self, round_: Optional[int] = None) -> bool:
        r = self.rounds_used if round_ is None else round_
        return len({self.position(i, r) for i in self.paths}) == 1

    def to_jsonl(self) -> str:
        if self.trace is None:
            raise ValueError("run was not traced; pass record_trace=True")
        return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in self.trace)


def tour_length(view: ViewTree) -> int:
    """Rounds needed to walk the whole port-sequence tree and come back."""
    return 2 * (view.node_count() - 1)


class _Slot:
    __slots__ = ("agent", "gen", "node", "kind", "until", "leader", "decided", "halted",
                 "company", "entry", "exit", "resume_value", "started",
                 "w_nodes", "w_exits", "w_entries", "w_idx", "w_intr", "saved")

    def __init__(self, agent, gen, node):
        self.agent = agent
        self.gen = gen
        self.node = node
        self.kind: Optional[str] = None  # walk | stay | follow | explore
        self.until = 0
        self.leader = 0
        self.decided: Optional[bool] = None
        self.halted = False
        self.company: frozenset = frozenset()
        self.entry: Optional[int] = None
        self.exit: Optional[int] = None
        self.resume_value: Any = None
        self.started = False
        self.w_nodes: list[int] = []
        self.w_exits: list[int] = []
        self.w_entries: list[int] = []
        self.w_idx = 0
        self.w_intr = False
        self.saved = None

    @property
    def live(self):
        return self.decided is None and not self.halted

    @property
    def absent(self):
        return self.kind == "explore"

    def walk_left(self):
        return len(self.w_exits) - self.w_idx


_WALK_CACHE: dict = {}
_WALK_CACHE_LIMIT = 50_000


def _unroll(g, node, rule, agent_id, r, key=None) -> tuple[list[int], list[int], list[int]]:
    if key is not None:
        hit = _WALK_CACHE.get((g, node, key))
        if hit is not None:
            return hit
    nodes, exits, entries = [node], [], []
    try:
        port = next(rule)
        while True:
            deg = g.degree(node)
            if not 1 <= port <= deg:
                raise SimulationFault(
                    agent_id, r + len(exits), f"port {port} does not exist (degree {deg})"
                )
            node, q = g.neighbor(node, port)
            nodes.append(node)
            exits.append(port)
            entries.append(q)
            port = rule.send((g.degree(node), q))
    except StopIteration:
        pass
    if key is not None:
        if len(_WALK_CACHE) >= _WALK_CACHE_LIMIT:
            _WALK_CACHE.clear()
        _WALK_CACHE[(g, node, key)] = (nodes, exits, entries)
    return nodes, exits, entries


def run(
    config: InitialConfiguration,
    protocol: Protocol,
    oracle: Optional[Callable[[str], bool]] = None,
    max_rounds: Optional[int] = None,
    certificates: Union[None, str, Sequence[str]] = None,
    token_at: Optional[int] = None,
    record_trace: bool = False,
) -> RunOutcome:
    """Run ``protocol`` for every agent of ``config`` in lock-step.

    ``certificates`` is one string shared by all agents or one per agent.
    ``max_rounds=None`` means no budget; otherwise agents still undecided at
    that round are reported as undecided.  ``token_at`` places the single
    token on a node before round 0.  Identical arguments always give
    identical outcomes.
    """
    g = config.graph
    k = config.team_size
    if certificates is None:
        certs = [""] * k
    elif isinstance(certificates, str):
        certs = [certificates] * k
    else:
        certs = list(certificates)
        if len(certs) != k:
            raise ValueError("one certificate per agent expected")
    if max_rounds is not None and max_rounds < 0:
        raise ValueError("max_rounds must be non-negative")

    order = sorted(range(k), key=lambda j: config.ids[j])
    ids = [config.ids[j] for j in order]
    index = {i: a for a, i in enumerate(ids)}
    slots: list[_Slot] = []
    for j in order:
        agent = Agent(config.ids[j], config.inputs[j], certs[j])
        slots.append(_Slot(agent, protocol(agent), config.starts[j]))
    token_node = token_at
    oracle_log: list[tuple[int, int, str, bool]] = []
    actions: dict[int, list] = {i: [] for i in ids}
    paths: dict[int, list] = {s.agent.id: [(0, s.node)] for s in slots}
    decided_at: dict[int, Optional[int]] = {i: None for i in ids}
    trace: Optional[list[dict]] = [] if record_trace else None
    eye = np.eye(k, dtype=bool)

    r = 0
    exhausted = False
    last_active = 0
    while True:
        at: dict[int, list[int]] = {}
        for a, s in enumerate(slots):
            if not s.absent:
                at.setdefault(s.node, []).append(a)
        comp = [
            frozenset() if s.absent else frozenset(slots[b].agent.id for b in at[s.node] if b != a)
            for a, s in enumerate(slots)
        ]
        for a, s in enumerate(slots):
            s.agent.met |= comp[a]

        due = set()
        followers = []
        for a, s in enumerate(slots):
            if not s.live:
                continue
            kind = s.kind
            if kind is None:
                due.add(a)
            elif kind == "walk":
                if s.walk_left() == 0 or (s.w_intr and comp[a] != s.company):
                    due.add(a)
            elif kind == "stay":
                if r >= s.until or comp[a] != s.company:
                    due.add(a)
            elif kind == "explore":
                if r >= s.until:
                    due.add(a)
            else:
                followers.append(a)
        changed = True
        while changed:
            changed = False
            for a in followers:
                if a in due:
                    continue
                s = slots[a]
                lead = index[s.leader]
                if lead in due or comp[a] != s.company or not slots[lead].live:
                    due.add(a)
                    changed = True

        if due:
            last_active = r
            snap = {}
            for a in due:
                for x in comp[a]:
                    if x not in snap:
                        snap[x] = MappingProxyType(dict(slots[index[x]].agent.exposed))
            for a in sorted(due):
                s = slots[a]
                i = s.agent.id
                obs = Observation(
                    round=r,
                    degree=g.degree(s.node),
                    entry_port=s.entry,
                    exit_port=s.exit,
                    others=tuple((x, snap[x]) for x in sorted(comp[a])),
                    token=token_node == s.node,
                )
                s.company = comp[a]
                s.agent.obs = obs
                if s.kind == "walk":
                    s.agent.walked = s.w_idx
                    s.agent.interrupted = s.walk_left() > 0
                    s.saved = (s.w_nodes[s.w_idx:], s.w_exits[s.w_idx:], s.w_entries[s.w_idx:]) \
                        if s.agent.interrupted else None
                else:
                    s.saved = None
                value = s.resume_value if s.kind == "explore" else obs
                s.resume_value = None
                s.kind = None
                while True:
                    try:
                        action = s.gen.send(value) if s.started else next(s.gen)
                    except StopIteration:
                        s.halted = True
                        break
                    s.started = True
                    actions[i].append((r, action))
                    if isinstance(action, Decide):
                        s.decided = bool(action.value)
                        s.agent.exposed["decision"] = s.decided
                        decided_at[i] = r
                        s.gen.close()
                        break
                    if isinstance(action, OracleCall):
                        if oracle is None:
                            raise SimulationFault(i, r, "oracle call without an oracle")
                        ans = bool(oracle(action.query))
                        oracle_log.append((i, r, action.query, ans))
                        value = ans
                        continue
                    if isinstance(action, PlaceToken):
                        if not s.agent.holding_token:
                            raise SimulationFault(i, r, "placing a token it does not hold")
                        s.agent.holding_token = False
                        token_node = s.node
                        value = obs = _with_token(obs, True)
                        s.agent.obs = obs
                        continue
                    if isinstance(action, PickToken):
                        if token_node != s.node:
                            raise SimulationFault(i, r, "no token to pick at this node")
                        token_node = None
                        s.agent.holding_token = True
                        value = obs = _with_token(obs, False)
                        s.agent.obs = obs
                        continue
                    if isinstance(action, (Move, Walk, Continue)):
                        if isinstance(action, Continue):
                            if s.saved is None:
                                raise SimulationFault(i, r, "no interrupted walk to continue")
                            s.w_nodes, s.w_exits, s.w_entries = s.saved
                            intr = True
                        else:
                            if isinstance(action, Move):
                                unrolled = _unroll(g, s.node, fixed_ports((action.port,)), i, r)
                            else:
                                unrolled = _unroll(g, s.node, action.rule, i, r, action.key)
                            s.w_nodes, s.w_exits, s.w_entries = unrolled
                            intr = isinstance(action, Walk) and action.interruptible
                        s.saved = None
                        s.w_idx = 0
                        s.w_intr = intr
                        s.kind = "walk"
                        if not s.w_exits:
                            # an empty walk costs nothing
                            s.agent.walked, s.agent.interrupted = 0, False
                            s.kind = None
                            value = obs
                            continue
                    elif isinstance(action, Stay):
                        if action.rounds < 1:
                            raise SimulationFault(i, r, "stay needs at least one round")
                        s.kind = "stay"
                        s.until = r + action.rounds
                    elif isinstance(action, Follow):
                        if action.leader not in comp[a]:
                            raise SimulationFault(i, r, f"leader {action.leader} is not here")
                        s.kind = "follow"
                        s.leader = action.leader
                    elif isinstance(action, ExploreView):
                        view = truncated_view(g, s.node, action.depth)
                        s.kind = "explore"
                        s.until = r + max(1, tour_length(view))
                        s.resume_value = view
                    else:
                        raise SimulationFault(i, r, f"unknown action {action!r}")
                    break

        live = [a for a, s in enumerate(slots) if s.live]
        if not live:
            break
        if max_rounds is not None and r >= max_rounds:
            exhausted = True
            break

        # ultimate leader of every follower, and how far the schedule is fixed
        driver = {}
        horizon = []
        for a in live:
            seen = []
            b = a
            while slots[b].kind == "follow":
                seen.append(b)
                b = index[slots[b].leader]
                if b in seen:
                    raise SimulationFault(slots[a].agent.id, r, "follow chain has no leader")
                if not slots[b].live:
                    # the leader stopped this round; wait one round and resume
                    b = a
                    horizon.append(1)
                    break
            driver[a] = b
        for a in live:
            s = slots[a]
            if s.kind == "walk":
                horizon.append(s.walk_left())
            elif s.kind in ("stay", "explore"):
                horizon.append(s.until - r)
        if not horizon:
            raise SimulationFault(slots[live[0]].agent.id, r, "no agent can make progress")
        span = min(horizon)
        if max_rounds is not None:
            span = min(span, max_rounds - r)
        span = max(span, 1)

        # with nobody walking, positions are frozen and one column suffices
        walking = any(slots[driver[a]].kind == "walk" for a in live)
        cols = span if walking else 1
        pos = np.empty((k, cols + 1), dtype=np.int64)
        for a, s in enumerate(slots):
            d = slots[driver[a]] if a in driver else s
            if d.kind == "walk":
                pos[a] = d.w_nodes[d.w_idx:d.w_idx + cols + 1]
            else:
                pos[a] = s.node
        present = np.array([not s.absent for s in slots])
        same = (pos[:, None, :] == pos[None, :, :]) & present[:, None, None] & present[None, :, None]
        same &= ~eye[:, :, None]
        sensitive = [a for a in live if slots[a].kind in ("stay", "follow")
                     or (slots[a].kind == "walk" and slots[a].w_intr)]
        step = span
        if sensitive:
            base = np.zeros((len(sensitive), k), dtype=bool)
            for row, a in enumerate(sensitive):
                for x in slots[a].company:
                    base[row, index[x]] = True
            diff = (same[sensitive, :, 1:] != base[:, :, None]).any(axis=(0, 1))
            hits = np.flatnonzero(diff)
            if hits.size:
                step = int(hits[0]) + 1
        met = same[:, :, 1:min(step, cols) + 1].any(axis=2)
        for a, s in enumerate(slots):
            if met[a].any():
                s.agent.met |= {ids[b] for b in np.flatnonzero(met[a])}

        if trace is not None:
            for t in range(step):
                recs = []
                for a, s in enumerate(slots):
                    d = slots[driver[a]] if a in driver else s
                    if not s.live:
                        act = "decided" if s.decided is not None else "halted"
                    elif d.kind == "walk":
                        act = f"move {d.w_exits[d.w_idx + t]}"
                    elif s.kind == "explore":
                        act = "explore"
                    else:
                        act = "stay"
                    recs.append({"id": s.agent.id, "node": int(pos[a, min(t, cols)]), "action": act})
                trace.append({"round": r + t, "agents": recs, "token_node": token_node})

        # apply the moves of the next `step` rounds
        for a in live:
            s = slots[a]
            d = slots[driver[a]]
            if d.kind != "walk":
                s.entry = s.exit = None
                continue
            lo, hi = d.w_idx, d.w_idx + step
            ex, en, nd = d.w_exits[lo:hi], d.w_entries[lo:hi], d.w_nodes[lo + 1:hi + 1]
            s.agent.trail.extend(zip(ex, en))
            paths[s.agent.id].extend(zip(range(r + 1, r + step + 1), nd))
            s.node = nd[-1]
            s.exit, s.entry = ex[-1], en[-1]
        for a in live:
            if slots[a].kind == "walk":
                slots[a].w_idx += step
        r += step

    return RunOutcome(
        decisions={s.agent.id: s.decided for s in slots},
        decided_at=decided_at,
        rounds_used=r if exhausted else last_active,
        exhausted=exhausted,
        oracle_log=oracle_log,
        outputs={s.agent.id: s.agent.result for s in slots},
        actions=actions,
        paths=paths,
        trace=trace,
    )


def _with_token(obs: Observation, present: bool) -> Observation:
    return Observation(obs.round, obs.degree, obs.entry_port, obs.exit_port, obs.others, present)


# --------------------------------------------------------------------------
# merging agents into groups

@dataclass
class Group:
    """Membership bookkeeping for agents that merge on meeting.

    The leader of a group is its largest id; smaller ids follow it.  Only
    agents advertising the same ``mode`` (and not yet decided) merge.
    """

    me: int
    mode: str
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.members:
            self.members = frozenset((self.me,))

    @property
    def leader(self) -> int:
        return max(self.members)

    @property
    def leading(self) -> bool:
        return self.leader == self.me

    def publish(self, agent: Agent) -> None:
        agent.exposed["mode"] = self.mode
        agent.exposed["group"] = self.members

    def absorb(self, obs: Observation) -> bool:
        """Merge with co-located groups; returns True if the membership grew."""
        merged = set(self.members)
        for _, mem in obs.others:
            if mem.get("mode") == self.mode and "decision" not in mem and "group" in mem:
                merged |= mem["group"]
        if len(merged) == len(self.members):
            return False
        self.members = frozenset(merged)
        return True
