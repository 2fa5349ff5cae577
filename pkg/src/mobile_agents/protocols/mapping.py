"""Drawing a map of the graph with a movable token.

The explorer grows a ball around its start.  To tell which pending edge
ends at which new node it parks the token on one new node at a time and
walks every other pending edge, looking for the token.  The token is either
a physical one or the other agents of a gathered team.
"""
from __future__ import annotations

from collections import deque

from ..graphs import PortLabeledGraph
from ..sim import Agent, Follow, PickToken, PlaceToken, Stay, Walk, fixed_ports

FOREVER = 10 ** 12


class MapSketch:
    """The explorer's partial map: known degrees and known edge ends."""

    def __init__(self, degree: int):
        self.degrees = [degree]
        self.adj: dict[tuple[int, int], tuple[int, int]] = {}

    def add_node(self, degree: int) -> int:
        self.degrees.append(degree)
        return len(self.degrees) - 1

    def link(self, u: int, p: int, v: int, q: int) -> None:
        self.adj[(u, p)] = (v, q)
        self.adj[(v, q)] = (u, p)

    def route(self, src: int, dst: int) -> list[int]:
        """Ports of a shortest known route."""
        prev = {src: None}
        queue = deque([src])
        while queue:
            x = queue.popleft()
            if x == dst:
                break
            for p in range(1, self.degrees[x] + 1):
                hit = self.adj.get((x, p))
                if hit is not None and hit[0] not in prev:
                    prev[hit[0]] = (x, p)
                    queue.append(hit[0])
        ports = []
        x = dst
        while prev[x] is not None:
            x, p = prev[x]
            ports.append(p)
        return ports[::-1]

    def graph(self) -> PortLabeledGraph:
        edges = {tuple(sorted(((u, p), v))) for (u, p), v in self.adj.items()}
        return PortLabeledGraph(len(self.degrees), tuple((a[0], a[1], b[0], b[1]) for a, b in edges))


class PhysicalToken:
    def __init__(self, agent: Agent):
        self.agent = agent

    def carry(self, ports):
        return (yield Walk(fixed_ports(ports)))

    def go(self, ports):
        return (yield Walk(fixed_ports(ports)))

    def drop(self):
        return (yield PlaceToken())

    def lift(self, ports):
        if ports:
            yield Walk(fixed_ports(ports))
        return (yield PickToken())

    def here(self, obs) -> bool:
        return obs.token


class TeamToken:
    """The explorer's side of using its gathered team as the token.

    Its ``token`` field tells the others whether to follow (``carried``) or
    to stay where they are (``dropped``).
    """

    def __init__(self, agent: Agent, team: frozenset):
        self.agent = agent
        self.team = team - {agent.id}
        agent.exposed["token"] = "carried"

    def carry(self, ports):
        return (yield Walk(fixed_ports(ports)))

    def go(self, ports):
        return (yield Walk(fixed_ports(ports)))

    def drop(self):
        self.agent.exposed["token"] = "dropped"
        return (yield Stay(1))

    def lift(self, ports):
        self.agent.exposed["token"] = "carried"
        if ports:
            return (yield Walk(fixed_ports(ports)))
        return (yield Stay(1))

    def here(self, obs) -> bool:
        return any(i in self.team for i in obs.other_ids)


def explore_with_token(agent: Agent, token) -> tuple[MapSketch, int]:
    """Build the map; the token is carried at the start and at the end.

    Returns the map and the explorer's node on it.  Node 0 is where the
    exploration started.
    """
    sketch = MapSketch(agent.obs.degree)
    pos = 0
    layer = [0]
    while True:
        pending = [(v, p) for v in layer for p in range(1, sketch.degrees[v] + 1) if (v, p) not in sketch.adj]
        if not pending:
            break
        # probes[d]: edges from the far end of dart d to already created new nodes
        probes: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
        fresh = []
        while pending:
            v, p = pending.pop(0)
            obs = yield from token.carry(sketch.route(pos, v) + [p])
            w = sketch.add_node(obs.degree)
            sketch.link(v, p, w, obs.entry_port)
            for p3, u, q3 in probes.get((v, p), ()):
                sketch.link(w, p3, u, q3)
            pos = w
            yield from token.drop()
            rest = []
            for v2, p2 in pending:
                obs = yield from token.go(sketch.route(pos, v2) + [p2])
                q2 = obs.entry_port
                if token.here(obs):
                    sketch.link(v2, p2, w, q2)
                    pos = w
                    continue
                # some other new node: look for edges from it to w
                for p3 in range(1, obs.degree + 1):
                    if p3 == q2:
                        continue
                    o3 = yield from token.go([p3])
                    if token.here(o3):
                        probes.setdefault((v2, p2), []).append((p3, w, o3.entry_port))
                    yield from token.go([o3.entry_port])
                yield from token.go([q2])
                pos = v2
                rest.append((v2, p2))
            pending = rest
            yield from token.lift(sketch.route(pos, w))
            pos = w
            fresh.append(w)
        layer = fresh
    return sketch, pos


def token_map():
    """Single explorer with a token lying on its start node.

    The result is ``(map, start)`` with the start being map node 0.
    """

    def protocol(agent: Agent):
        yield PickToken()
        sketch, pos = yield from explore_with_token(agent, PhysicalToken(agent))
        yield from PhysicalToken(agent).go(sketch.route(pos, 0))
        yield PlaceToken()
        agent.result = (sketch.graph(), 0)

    return protocol


def retrace_start(g: PortLabeledGraph, here: int, trail) -> int:
    """Walk an agent's own moves backwards on the map to find where it started."""
    node = here
    for _, entry in reversed(trail):
        node = g.neighbor(node, entry)[0]
    return node


def map_team(agent: Agent, team: frozenset):
    """Collaborative mapping by a gathered team; every member gets the configuration.

    Returns ``(map, starts, ids, inputs)`` with starts, ids and inputs aligned.
    """
    leader = max(team)
    obs = agent.obs
    if agent.id == leader:
        token = TeamToken(agent, team)
        agent.exposed["stage"] = "map"
        # one round for the others to switch to token duty
        yield Stay(1)
        sketch, pos = yield from explore_with_token(agent, token)
        g = sketch.graph()
        agent.exposed["map"] = (g, pos)
        yield Stay(1)
    else:
        while True:
            lead = obs.memory_of(leader)
            if lead is None:
                obs = yield Stay(FOREVER)
            elif "map" in lead:
                g, pos = lead["map"]
                break
            elif lead.get("stage") == "map" and lead.get("token") == "dropped":
                obs = yield Stay(1)
            else:
                obs = yield Follow(leader)
    start = retrace_start(g, pos, agent.trail)
    agent.exposed["start"] = start
    obs = yield Stay(1)
    known = {agent.id: (start, agent.input)}
    for i, mem in obs.others:
        if i in team and "start" in mem:
            known[i] = (mem["start"], mem["input"])
    if set(known) != set(team):
        raise RuntimeError("team members missing after mapping")
    ids = tuple(sorted(known))
    return g, tuple(known[i][0] for i in ids), ids, tuple(known[i][1] for i in ids)
