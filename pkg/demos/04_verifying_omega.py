"""Verifying Omega: the certificate is a claimed number of nodes.

Branch 1 of the input asks whether more than k agents are present; branch 2
asks whether the quotient differs from a given one.  Honest certificates
make every agent accept yes-instances; no certificate gets a no-instance
accepted by everybody.
"""
from mobile_agents.generators import path, sun
from mobile_agents.graphs import O, P, InitialConfiguration
from mobile_agents.problems import OMEGA
from mobile_agents.protocols.omega import omega_quotient, omega_teamsize, verify_omega
from mobile_agents.sim import run


def show(config, certs):
    truth = OMEGA.ground_truth(config)
    print(f"  truth: {'yes' if truth else 'no'}")
    for x in certs:
        out = run(config, verify_omega(), certificates=str(x))
        print(f"    x={x}: decisions {out.decision_vector()} after {out.rounds_used} rounds")


print("two agents on a 3-node path, input 'more than 1 agent':")
show(InitialConfiguration(path(3), (0, 2), (1, 2), (omega_teamsize(1),) * 2), [3])
print("same team, input 'more than 2 agents', every x up to 2n:")
show(InitialConfiguration(path(3), (0, 2), (1, 2), (omega_teamsize(2),) * 2), range(1, 7))
print("a sun, input 'the quotient is not the one-loop graph':")
show(InitialConfiguration(sun(3), (0,), (1,), (omega_quotient(O),)), [6])
print("a sun, input 'the quotient is not its own':")
show(InitialConfiguration(sun(3), (0,), (1,), (omega_quotient(P),)), range(1, 13))
