"""Views, the partition they induce, and the quotient graph.

Nodes of an anonymous graph are told apart only by what an agent standing
there could ever observe.  On a consistently labeled cycle every node looks
the same, so the cycle collapses to a single node with a loop.
"""
from mobile_agents.generators import consistent_cycle, path, sun
from mobile_agents.graphs import serialize_quotient
from mobile_agents.views import quotient, truncated_view, view_partition

c6 = consistent_cycle(6)
print("depth-2 view from any node of C6:")
print(" ", truncated_view(c6, 0, 2))
print("quotient of C6:")
print(serialize_quotient(quotient(c6)))

# the sun has two kinds of nodes: cycle nodes and their pendant leaves
s = sun(4)
part = view_partition(s)
print(f"sun(4) classes {part.blocks}, stable after depth {part.stabilization_depth}")
print(serialize_quotient(quotient(s)))

# on a path every node is its own class, even the two middle ones,
# which share a degree and only differ once ports come into view
p = path(4)
print("path(4) classes:", view_partition(p).blocks)
for t in range(4):
    print(f"  depth {t}: middle nodes look alike: {truncated_view(p, 1, t) is truncated_view(p, 2, t)}")
