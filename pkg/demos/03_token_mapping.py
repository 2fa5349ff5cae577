"""A lone agent with a token draws an exact map of the graph."""
from mobile_agents.generators import sun
from mobile_agents.graphs import InitialConfiguration, isomorphic, rooted_isomorphic, serialize_graph
from mobile_agents.sim import run
from mobile_agents.protocols.mapping import token_map
from mobile_agents.views import quotient

g = sun(3)
start = 4  # a leaf
out = run(InitialConfiguration(g, (start,), (1,), ("",)), token_map(), token_at=start)
m, s = out.outputs[1]
print(f"mapped in {out.rounds_used} rounds:")
print(serialize_graph(m))
print("isomorphic to the real graph:", isomorphic(m, g) is not None)
print("start marked correctly:", rooted_isomorphic(m, s, g, start))

# without the token the agent could only ever learn the quotient
print("what views alone reveal has", quotient(g).node_count, "nodes, the graph has", g.node_count)
