"""Where the classes part ways.

A single agent with a quotient oracle tells cycles apart from everything
else, and suns from everything else, yet it can never learn the size of a
cycle: C4 and C6 have the same quotient.  Worse, two graphs of the same
size can share a quotient without being isomorphic.
"""
from mobile_agents.generators import consistent_cycle, path, sun
from mobile_agents.graphs import InitialConfiguration, isomorphic, quotient_isomorphic, serialize_graph
from mobile_agents.problems import QUOTIENT, oracle_env, witness_same_quotient_nonisomorphic
from mobile_agents.protocols.omega import decide_cycle_and_cosun
from mobile_agents.sim import run
from mobile_agents.suites import indistinguishable_path_cycle
from mobile_agents.views import quotient

for name, g in [("cycle:5", consistent_cycle(5)), ("sun:3", sun(3)), ("path:4", path(4))]:
    answers = []
    for w in ("1", "2"):
        c = InitialConfiguration(g, (0,), (1,), (w,))
        out = run(c, decide_cycle_and_cosun(), oracle=oracle_env(QUOTIENT, c))
        answers.append(out.decisions[1])
    print(f"{name}: is a cycle {answers[0]}, is not a sun {answers[1]}")

print("C4 and C6 share a quotient:", quotient_isomorphic(quotient(consistent_cycle(4)), quotient(consistent_cycle(6))))

g, h = witness_same_quotient_nonisomorphic(8)
print(f"\nsame size ({g.node_count}), same quotient, not isomorphic ({isomorphic(g, h) is None}):")
print(serialize_graph(g))
print(serialize_graph(h))

# a short walk cannot tell the middle of a long path from a cycle
for t in range(1, 6):
    print(f"path on {2 * t + 3} nodes vs cycle, depth {t}: indistinguishable {indistinguishable_path_cycle(t)}")
