"""Deciding other problems with nothing but an Omega oracle.

The agents first ask the oracle how many of them there are.  A team then
gathers and maps the graph together, the followers acting as the leader's
token.  A single agent instead learns the quotient and its own class in it
and answers for some graph with that quotient.
"""
from mobile_agents.generators import consistent_cycle, path, star
from mobile_agents.graphs import InitialConfiguration
from mobile_agents.problems import OMEGA, PATH, TEAMSIZE, TREE, oracle_env
from mobile_agents.protocols.omega import reduce_to_omega
from mobile_agents.sim import run

cases = [
    (TREE, InitialConfiguration(star(4), (1, 3), (1, 2), ("", ""))),
    (TREE, InitialConfiguration(consistent_cycle(4), (0,), (1,), ("",))),
    (PATH, InitialConfiguration(path(4), (0, 0, 3), (4, 1, 9), ("",) * 3)),
    (TEAMSIZE, InitialConfiguration(path(3), (0, 1), (1, 2), ("1", "1"))),
]
for problem, c in cases:
    out = run(c, reduce_to_omega(problem), oracle=oracle_env(OMEGA, c))
    print(f"{problem.name:<9} n={c.graph.node_count} k={c.team_size}: "
          f"decisions {out.decision_vector()}, truth {problem.ground_truth(c)}, "
          f"{len(out.oracle_log)} oracle calls, {out.rounds_used} rounds")
