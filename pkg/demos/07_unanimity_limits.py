"""Why the odd-degree decider cannot be unanimous with several agents.

The problem asks that every start node have odd degree and that some other
node have odd degree too.  One agent decides by looking at its own degree:
by the handshake lemma another odd node must exist.  With two agents, one
on an odd node and one on an even node, the answer is no, but the agent on
the odd node has no way to find out in bounded time.  Place the other agent
far enough away and any fixed decision round passes before they could meet.
"""
from mobile_agents.generators import path, star
from mobile_agents.graphs import InitialConfiguration
from mobile_agents.problems import ODD
from mobile_agents.protocols.deciders import decide_odd
from mobile_agents.sim import run

for label, g, starts in [("one agent on a leaf", star(4), (1,)),
                         ("two leaves", star(4), (1, 2)),
                         ("leaf and middle of a path", path(3), (0, 1))]:
    c = InitialConfiguration(g, starts, tuple(range(1, len(starts) + 1)), ("",) * len(starts))
    out = run(c, decide_odd())
    print(f"{label:<28} truth {ODD.ground_truth(c)!s:<5} decisions {out.decision_vector()}")
