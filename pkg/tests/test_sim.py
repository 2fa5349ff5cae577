import dataclasses
import json

import pytest
from hypothesis import given, strategies as st

from mobile_agents.generators import consistent_cycle, lifts, path, star, sun
from mobile_agents.graphs import O, P, InitialConfiguration, PortLabeledGraph, automorphisms, quotient_isomorphism, serialize_quotient
from mobile_agents.problems import LEADER, NODES, QUOTIENT, TEAMSIZE, oracle_env
from mobile_agents.protocols.rendezvous import gather
from mobile_agents.sim import (
    Decide,
    Follow,
    Group,
    Move,
    Observation,
    OracleCall,
    PickToken,
    PlaceToken,
    SimulationFault,
    Stay,
    Walk,
    fixed_ports,
    run,
)
from mobile_agents.views import quotient_with_classes

from .conftest import graphs

K2 = PortLabeledGraph(2, ((0, 1, 1, 1),))


def cfg(g, starts, ids=None, inputs=None):
    k = len(starts)
    return InitialConfiguration(g, tuple(starts), tuple(ids or range(1, k + 1)), tuple(inputs or [""] * k))


def decide_yes(agent):
    yield Decide(True)


def sees_someone(agent):
    yield Decide(bool(agent.obs.other_ids))


def wander(rounds):
    """Local rule: leave by (entry + degree) mod degree, count odd degrees, decide on parity."""

    def protocol(agent):
        odd = 0
        obs = agent.obs
        for _ in range(rounds):
            if obs.degree == 0:
                break
            port = (obs.entry_port or 0) % obs.degree + 1
            obs = yield Move(port)
            odd += obs.degree % 2
        yield Decide(odd % 2 == 0)

    return protocol


def test_immediate_decision_takes_no_rounds():
    out = run(cfg(star(4), [1]), decide_yes)
    assert out.decisions == {1: True} and out.rounds_used == 0


def test_colocated_agents_see_each_other_in_round_zero():
    out = run(cfg(K2, [0, 0]), sees_someone)
    assert out.decision_vector() == (True, True)
    apart = run(cfg(K2, [0, 1]), sees_someone)
    assert apart.decision_vector() == (False, False)


def test_four_moves_around_c4_return_home():
    def proto(agent):
        for _ in range(4):
            yield Move(1)
        yield Decide(True)

    out = run(cfg(consistent_cycle(4), [2]), proto, record_trace=True)
    assert out.decisions[1] is True and out.rounds_used == 4
    assert [out.position(1, r) for r in range(5)] == [2, 3, 0, 1, 2]
    assert out.trace[-1]["agents"][0]["node"] == 1


def test_observation_never_contains_node_indices():
    fields = {f.name for f in dataclasses.fields(Observation)}
    assert fields == {"round", "degree", "entry_port", "exit_port", "others", "token"}


def test_illegal_port_is_a_fault_naming_agent_and_round():
    def proto(agent):
        yield Move(1)
        yield Move(3)

    with pytest.raises(SimulationFault) as err:
        run(cfg(path(3), [0], ids=[9]), proto)
    assert err.value.agent == 9 and err.value.round == 1


def test_budget_exhaustion_leaves_agents_undecided():
    def forever(agent):
        while True:
            yield Stay(5)

    out = run(cfg(K2, [0, 1]), forever, max_rounds=12)
    assert out.exhausted and out.undecided == [1, 2] and out.rounds_used == 12


def test_decided_agents_do_nothing_more():
    def proto(agent):
        yield Decide(True)
        yield Move(1)

    out = run(cfg(K2, [0]), proto)
    assert [type(a) for _, a in out.actions[1]] == [Decide]


def test_simultaneous_swap_is_not_a_meeting():
    def proto(agent):
        obs = yield Move(1)
        yield Decide(bool(obs.other_ids) or bool(agent.met))

    out = run(cfg(K2, [0, 1]), proto)
    assert out.decision_vector() == (False, False)
    assert out.first_meeting(1, 2) is None


def test_follow_replays_the_leader():
    def proto(agent):
        if agent.id == 2:
            yield Walk(fixed_ports([1, 1, 1]))
            yield Decide(True)
        else:
            yield Follow(2)
            yield Decide(True)

    out = run(cfg(consistent_cycle(5), [0, 0]), proto)
    assert [out.position(1, r) for r in range(4)] == [out.position(2, r) for r in range(4)] == [0, 1, 2, 3]


def test_interruptible_walk_stops_on_meeting():
    def proto(agent):
        if agent.id == 1:
            yield Stay(100)
            yield Decide(True)
        else:
            obs = yield Walk(fixed_ports([1] * 10), interruptible=True)
            agent.result = (obs.round, agent.interrupted)
            yield Decide(True)

    out = run(cfg(consistent_cycle(6), [3, 0]), proto)
    assert out.outputs[2] == (3, True)


def test_oracle_calls_cost_nothing():
    c = cfg(path(5), [0])

    def proto(agent):
        five = yield OracleCall("5")
        four = yield OracleCall("4")
        yield Decide(five and not four)

    out = run(c, proto, oracle=oracle_env(NODES, c))
    assert out.decisions[1] is True and out.rounds_used == 0
    assert [(q, a) for _, _, q, a in out.oracle_log] == [("5", True), ("4", False)]


def test_oracle_env_examples():
    three = cfg(star(4), [0, 1, 2])
    ask = oracle_env(TEAMSIZE, three)
    assert ask("2") and not ask("3")
    assert not oracle_env(QUOTIENT, cfg(consistent_cycle(6), [0]))(serialize_quotient(O))


def test_oracle_env_rejects_non_uniform_problems():
    with pytest.raises(ValueError):
        oracle_env(LEADER, cfg(K2, [0]))


def test_oracle_call_without_oracle_faults():
    def proto(agent):
        yield OracleCall("1")

    with pytest.raises(SimulationFault):
        run(cfg(K2, [0]), proto)


def test_token_faults():
    def pick(agent):
        yield PickToken()

    def place(agent):
        yield PlaceToken()

    with pytest.raises(SimulationFault):
        run(cfg(K2, [0]), pick, token_at=1)
    with pytest.raises(SimulationFault):
        run(cfg(K2, [0]), place)


def test_token_is_seen_and_carried():
    def proto(agent):
        seen = [agent.obs.token]
        yield PickToken()
        obs = yield Move(1)
        seen.append(obs.token)
        obs = yield PlaceToken()
        seen.append(obs.token)
        agent.result = seen
        yield Decide(True)

    out = run(cfg(K2, [0]), proto, token_at=0)
    assert out.outputs[1] == [True, False, True]


def test_group_leader_is_max_id():
    g = Group(3, "m")
    obs = Observation(0, 2, None, None, ((7, {"mode": "m", "group": frozenset({7})}),), False)
    assert g.absorb(obs) and g.leader == 7 and not g.leading
    g2 = Group(5, "m")
    obs = Observation(0, 2, None, None, ((3, {"mode": "m", "group": frozenset({3, 7})}),), False)
    g2.absorb(obs)
    assert g2.members == {3, 5, 7} and g2.leader == 7
    alone = Group(4, "m")
    assert alone.leading and alone.members == {4}


def test_trace_json_lines():
    out = run(cfg(K2, [0, 1]), wander(3), record_trace=True)
    rows = [json.loads(line) for line in out.to_jsonl().splitlines()]
    assert [r["round"] for r in rows] == [0, 1, 2]
    assert set(rows[0]) == {"round", "agents", "token_node"}
    assert set(rows[0]["agents"][0]) == {"id", "node", "action"}
    with pytest.raises(ValueError):
        run(cfg(K2, [0]), decide_yes).to_jsonl()


def _summary(out):
    return out.decisions, out.decided_at, out.rounds_used, out.paths, out.outputs


@given(graphs(max_n=5), st.data())
def test_runs_are_deterministic(g, data):
    starts = data.draw(st.lists(st.integers(0, g.node_count - 1), min_size=2, max_size=2))
    c = cfg(g, starts)
    assert _summary(run(c, gather(2))) == _summary(run(c, gather(2)))
    assert _summary(run(c, wander(7))) == _summary(run(c, wander(7)))


@given(graphs(max_n=5), st.data())
def test_anonymity_under_automorphisms(g, data):
    starts = data.draw(st.lists(st.integers(0, g.node_count - 1), min_size=1, max_size=3))
    c = cfg(g, starts)
    base = run(c, wander(9)).decision_vector()
    gathered = run(c, gather(len(starts))) if len(starts) > 1 else None
    for alpha in automorphisms(g):
        moved = c.transport(alpha)
        assert run(moved, wander(9)).decision_vector() == base
        if gathered is not None:
            other = run(moved, gather(len(starts)))
            assert other.rounds_used == gathered.rounds_used
            assert [alpha[gathered.position(1, gathered.rounds_used)]] == [other.position(1, other.rounds_used)]


def _observed(out):
    return [(r, type(a).__name__) for r, a in out.actions[1]], out.decisions, out.decided_at


def _same_quotient_pairs():
    yield consistent_cycle(4), consistent_cycle(7)
    yield sun(3), sun(5)
    for m in (2, 3):
        for g in list(lifts(P, m))[:3]:
            yield sun(3), g


@pytest.mark.parametrize("g, h", list(_same_quotient_pairs()))
def test_same_quotient_means_same_execution(g, h):
    qg, cg = quotient_with_classes(g)
    qh, ch = quotient_with_classes(h)
    f = quotient_isomorphism(qg, qh)
    assert f is not None
    for s in range(g.node_count):
        for t in range(h.node_count):
            if f[cg[s]] != ch[t]:
                continue
            for proto in (wander(11), gather(2)):
                a = run(cfg(g, [s]), proto, max_rounds=500)
                b = run(cfg(h, [t]), proto, max_rounds=500)
                assert _observed(a) == _observed(b)
                assert [(r, f[cg[x]]) for r, x in a.paths[1]] == [(r, ch[y]) for r, y in b.paths[1]]


def test_certificates_per_agent():
    def proto(agent):
        agent.result = agent.certificate
        yield Decide(True)

    out = run(cfg(K2, [0, 1]), proto, certificates=["a", "b"])
    assert out.outputs == {1: "a", 2: "b"}
    with pytest.raises(ValueError):
        run(cfg(K2, [0, 1]), proto, certificates=["a"])
