"""Two agents meet; then a team gathers without knowing the graph size."""
from mobile_agents.generators import consistent_cycle, star
from mobile_agents.graphs import InitialConfiguration
from mobile_agents.protocols.rendezvous import gather, rdv
from mobile_agents.protocols.walks import tau
from mobile_agents.sim import run

c4 = consistent_cycle(4)
config = InitialConfiguration(c4, (0, 2), (2, 5), ("", ""))
out = run(config, rdv(4))
print(f"agents 2 and 5 on C4 first meet at round {out.first_meeting(2, 5)}, "
      f"guaranteed by round {tau(4, 2)}")
print("both back home when they decide:",
      out.position(2, tau(4, 2)) == 0, out.position(5, tau(4, 5)) == 2)

# gathering: the leader of a merged group is its largest identity
team = InitialConfiguration(star(5), (1, 2, 3), (7, 3, 11), ("",) * 3)
out = run(team, gather(3))
print(f"three agents on a star gathered after {out.rounds_used} rounds:", out.gathered())
for i, r in sorted(out.outputs.items()):
    print(f"  agent {i}: group {r['group']}, last phase (n, b) = {r['phase']}")
