import pytest
from hypothesis import given, settings, strategies as st

from mobile_agents.generators import consistent_cycle, path, star, sun
from mobile_agents.graphs import (
    O,
    P,
    InitialConfiguration,
    PortLabeledGraph,
    automorphisms,
    isomorphic,
    quotient_isomorphic,
    quotient_isomorphism,
    rooted_isomorphic,
)
from mobile_agents.problems import OMEGA, PATH, QUOTIENT, TEAMSIZE, TREE, TREESIZE, oracle_env
from mobile_agents.protocols import REGISTRY, get_protocol
from mobile_agents.protocols.deciders import (
    decide_odd,
    decide_treesize,
    dovetail_decide,
    length_lex,
    never_accepts,
    treesize_dovetail,
    treesize_no_verifier,
    treesize_yes_verifier,
    verify_degree_k,
    verify_leaf,
    verify_path,
    verify_tree,
    way_back,
)
from mobile_agents.protocols.mapping import map_team, token_map
from mobile_agents.protocols.omega import (
    candidate_quotients,
    decide_cycle_and_cosun,
    omega_quotient,
    omega_teamsize,
    realize,
    reduce_to_omega,
    verify_omega,
)
from mobile_agents.protocols.rendezvous import gather, gather_phases, rdv
from mobile_agents.protocols.walks import diagonal_pairs, dfs_tour, tau, tau_max
from mobile_agents.sim import Decide, run
from mobile_agents.views import quotient_with_classes

from .conftest import graphs

K2 = PortLabeledGraph(2, ((0, 1, 1, 1),))


def cfg(g, starts, ids=None, inputs=None):
    k = len(starts)
    return InitialConfiguration(g, tuple(starts), tuple(ids or range(1, k + 1)), tuple(inputs or [""] * k))


def one_tour(n):
    def protocol(agent):
        obs = yield from dfs_tour(agent, n)
        agent.result = obs.round
        yield Decide(True)

    return protocol


# --------------------------------------------------------------------------
# budgets and tours

def test_budget_values():
    assert tau(4, 2) == 1536 and tau(1, 0) == 2
    assert tau_max(4, 3) == 4096
    assert tau_max(3, 2) == max(tau(3, i) for i in range(4)) == 216


def test_diagonal_order():
    assert [p for p, _ in zip(diagonal_pairs(), range(6))] == [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)]


def test_tour_on_k2_takes_eight_rounds():
    out = run(cfg(K2, [0]), one_tour(2))
    assert out.outputs[1] == 8
    assert out.position(1, 8) == 0
    assert {out.position(1, r) for r in range(9)} == {0, 1}


def test_tour_on_c3_visits_everything_in_54_rounds():
    out = run(cfg(consistent_cycle(3), [1]), one_tour(3))
    assert out.outputs[1] == 54 and out.position(1, 54) == 1
    assert {out.position(1, r) for r in range(55)} == {0, 1, 2}


def test_tour_of_depth_one_is_padded():
    out = run(cfg(star(4), [0]), one_tour(1))
    assert out.outputs[1] == 2 and out.position(1, 2) == 0


@given(graphs(max_n=4))
def test_tour_visits_all_and_returns(g):
    n = g.node_count
    for v in range(n):
        out = run(cfg(g, [v]), one_tour(n))
        assert out.outputs[1] == 2 * n ** n
        assert out.position(1, out.outputs[1]) == v
        assert {out.position(1, r) for r in range(out.outputs[1] + 1)} == set(range(n))


# --------------------------------------------------------------------------
# rendezvous and gathering

def test_rdv_on_c4():
    out = run(cfg(consistent_cycle(4), [0, 2], ids=[2, 5]), rdv(4))
    met = out.first_meeting(2, 5)
    assert met is not None and met <= tau(4, 2)
    assert out.decisions == {2: True, 5: True}
    assert out.decided_at == {2: tau(4, 2), 5: tau(4, 5)}
    assert out.position(2, tau(4, 2)) == 0 and out.position(5, tau(4, 5)) == 2


def test_rdv_alone_says_no():
    out = run(cfg(path(3), [1], ids=[1]), rdv(3))
    assert out.decisions == {1: False}


def test_gather_three_on_a_star():
    out = run(cfg(star(4), [1, 2, 3], ids=[4, 9, 2]), gather(3))
    assert out.gathered() and not out.exhausted
    assert all(r["group"] == [2, 4, 9] for r in out.outputs.values())


def test_gather_two_on_k2():
    out = run(cfg(K2, [0, 1]), gather(2))
    assert out.gathered()
    assert out.outputs[1]["phase"] == out.outputs[2]["phase"]


def test_gather_already_together():
    out = run(cfg(sun(3), [4, 4, 4]), gather(3))
    assert out.gathered() and out.rounds_used <= 3


# --------------------------------------------------------------------------
# mapping

@pytest.mark.parametrize("g, v", [(sun(3), 4), (sun(3), 0), (star(4), 2), (consistent_cycle(5), 3), (K2, 1)])
def test_token_map_examples(g, v):
    out = run(cfg(g, [v]), token_map(), token_at=v)
    h, s = out.outputs[1]
    assert isomorphic(g, h) is not None and rooted_isomorphic(g, v, h, s)
    assert out.position(1, out.rounds_used) == v


@settings(max_examples=25)
@given(graphs(max_n=5), st.data())
def test_token_map_is_exact(g, data):
    v = data.draw(st.integers(0, g.node_count - 1))
    h, s = run(cfg(g, [v]), token_map(), token_at=v).outputs[1]
    assert rooted_isomorphic(g, v, h, s)


def team_mapper(k):
    def protocol(agent):
        group = yield from gather_phases(agent, k, mode="reduce")
        agent.result = yield from map_team(agent, group.members)
        yield Decide(True)

    return protocol


def _check_team_map(c, out):
    for g, starts, ids, inputs in out.outputs.values():
        assert ids == tuple(sorted(c.ids))
        assert isomorphic(c.graph, g) is not None
        order = sorted(range(len(c.ids)), key=lambda i: c.ids[i])
        rebuilt = InitialConfiguration(g, starts, ids, inputs)
        mine = InitialConfiguration(c.graph, tuple(c.starts[i] for i in order), ids,
                                    tuple(c.inputs[i] for i in order))
        assert any(tuple(f[s] for s in mine.starts) == rebuilt.starts
                   for f in _isos(c.graph, g))
        assert inputs == mine.inputs


def _isos(g, h):
    f = isomorphic(g, h)
    return [tuple(f[a[v]] for v in range(g.node_count)) for a in automorphisms(g)]


@pytest.mark.parametrize("c", [
    cfg(K2, [0, 1], inputs=["a", "b"]),
    cfg(star(4), [0, 1, 3], ids=[3, 1, 8]),
    cfg(sun(3), [2, 2], ids=[5, 6]),
    cfg(consistent_cycle(4), [0, 0, 2], ids=[1, 2, 3], inputs=["x", "x", "y"]),
])
def test_team_map_examples(c):
    out = run(c, team_mapper(c.team_size))
    assert out.all_decided
    _check_team_map(c, out)


# --------------------------------------------------------------------------
# deciders and verifiers

@pytest.mark.parametrize("g, w, want", [
    (path(4), "4", True), (path(4), "3", False), (path(4), "5", False),
    (star(4), "4", True), (consistent_cycle(4), "4", False), (K2, "2", True),
    (path(1), "1", True), (path(3), "x", False), (path(3), "0", False),
])
def test_treesize_examples(g, w, want):
    for starts in ([0], [0, g.node_count - 1]):
        out = run(cfg(g, starts, inputs=[w] * len(starts)), decide_treesize())
        assert set(out.decisions.values()) == {want}


def test_odd_decider_is_local():
    assert run(cfg(star(4), [1]), decide_odd()).decisions == {1: True}
    assert run(cfg(path(3), [1]), decide_odd()).decisions == {1: False}


@pytest.mark.parametrize("proto, g, cert, want", [
    (verify_tree, path(4), "4", True),
    (verify_tree, path(4), "3", False),
    (verify_tree, consistent_cycle(4), "4", False),
    (verify_path, path(4), "4", True),
    (verify_path, star(4), "4", False),
    (verify_tree, star(4), "", False),
])
def test_size_verifiers(proto, g, cert, want):
    assert run(cfg(g, [0]), proto(), certificates=[cert]).decisions == {1: want}


def test_leaf_and_degree_verifiers():
    c = cfg(path(4), [1])
    assert run(c, verify_leaf(), certificates=["2"]).decisions == {1: True}
    assert run(c, verify_leaf(), certificates=["1,1"]).decisions == {1: True}
    assert run(c, verify_leaf(), certificates=["1"]).decisions == {1: False}
    assert run(c, verify_leaf(), certificates=[""]).decisions == {1: False}
    assert run(c, verify_leaf(), certificates=["3"]).decisions == {1: False}
    assert run(c, verify_leaf(), certificates=["1,"]).decisions == {1: False}
    s = cfg(sun(3), [4])
    assert run(s, verify_degree_k(3), certificates=["1"]).decisions == {1: True}
    assert run(s, verify_degree_k(3), certificates=["1,3"]).decisions == {1: False}
    assert run(cfg(consistent_cycle(5), [0]), verify_leaf(), certificates=["1,1,2"]).decisions == {1: False}


def test_length_lex_and_way_back():
    assert [x for x, _ in zip(length_lex(), range(7))] == ["", "0", "1", "00", "01", "10", "11"]
    assert way_back([(1, 2), (2, 1)]) == []
    assert way_back([(1, 2), (3, 1)]) == [1, 2]


@pytest.mark.parametrize("g, w, want", [
    (path(3), "3", True), (path(3), "2", False), (star(4), "4", True),
    (consistent_cycle(3), "3", False), (K2, "1", False),
])
def test_treesize_dovetail(g, w, want):
    out = run(cfg(g, [0], inputs=[w]), treesize_dovetail(), max_rounds=10 ** 6)
    assert out.decisions == {1: want}
    assert out.position(1, out.rounds_used) == 0


def test_dovetail_pair_sides():
    c = cfg(path(3), [0], inputs=["3"])
    assert run(c, treesize_yes_verifier(), certificates=["11"]).decisions == {1: True}
    assert run(c, treesize_yes_verifier(), certificates=["10"]).decisions == {1: False}
    assert run(c, treesize_no_verifier(), certificates=[""]).decisions == {1: False}


def test_dovetail_with_rejecting_pair_runs_forever():
    out = run(cfg(K2, [0], inputs=["2"]), dovetail_decide(never_accepts(), never_accepts()), max_rounds=300)
    assert out.exhausted and out.undecided == [1]


# --------------------------------------------------------------------------
# omega

def test_omega_codecs():
    assert omega_teamsize(3) == "13"
    assert OMEGA.decode(omega_teamsize(3)) == (1, "3")
    assert OMEGA.decode(omega_quotient(O))[0] == 2


def test_omega_verifier_team_size_branch():
    c = cfg(path(3), [0, 2], inputs=["11"] * 2)
    assert OMEGA.ground_truth(c)
    out = run(c, verify_omega(), certificates=["3", "3"])
    assert out.decision_vector() == (True, True)
    no = cfg(path(3), [0, 2], inputs=["12"] * 2)
    for x in ("1", "3", "6"):
        assert run(no, verify_omega(), certificates=[x, x]).decision_vector() == (False, False)


def test_omega_verifier_quotient_branch():
    c = cfg(sun(3), [0], inputs=[omega_quotient(O)])
    assert run(c, verify_omega(), certificates=["6"]).decisions == {1: True}
    same = cfg(sun(3), [0], inputs=[omega_quotient(P)])
    for x in ("1", "2", "6", "12"):
        assert run(same, verify_omega(), certificates=[x]).decisions == {1: False}
    garbage = cfg(sun(3), [0], inputs=["3"])
    assert run(garbage, verify_omega(), certificates=["6"]).decisions == {1: False}


def test_candidate_quotients_are_distinct_and_ordered():
    qs = candidate_quotients()
    sizes = [q.node_count for q in qs]
    assert sizes == sorted(sizes) and sizes[0] == 1
    assert any(quotient_isomorphic(q, O) for q in qs)


@pytest.mark.parametrize("h", [O, P, quotient_with_classes(star(4))[0]])
def test_realize_returns_graph_with_the_quotient(h):
    for root in range(h.node_count):
        g, t = realize(h, root)
        q, cls = quotient_with_classes(g)
        assert quotient_isomorphism(q, h)[cls[t]] == root


@pytest.mark.parametrize("problem, c", [
    (TREE, cfg(path(3), [0])),
    (TREE, cfg(consistent_cycle(4), [0])),
    (PATH, cfg(star(4), [1, 2])),
    (PATH, cfg(path(4), [0, 3], ids=[4, 2])),
    (TEAMSIZE, cfg(K2, [0, 1], inputs=["1", "1"])),
    (TEAMSIZE, cfg(K2, [0], inputs=["1"])),
    (TREESIZE, cfg(path(3), [1], inputs=["3"])),
])
@pytest.mark.parametrize("strategy", ["view", "enumerate"])
def test_reduction_agrees_with_ground_truth(problem, c, strategy):
    out = run(c, reduce_to_omega(problem, strategy), oracle=oracle_env(OMEGA, c))
    assert out.all_decided
    assert set(out.decisions.values()) == {problem.ground_truth(c)}


@pytest.mark.parametrize("g, w, want", [
    (consistent_cycle(5), "1", True), (sun(3), "1", False), (path(3), "1", False),
    (sun(4), "2", False), (path(3), "2", True), (consistent_cycle(4), "2", True),
    (consistent_cycle(4), "3", False),
])
@pytest.mark.parametrize("strategy", ["view", "enumerate"])
def test_cycle_and_cosun(g, w, want, strategy):
    c = cfg(g, [0], inputs=[w])
    out = run(c, decide_cycle_and_cosun("product", strategy), oracle=oracle_env(QUOTIENT, c))
    assert out.decisions == {1: want}


def test_cycle_cosun_rejects_unknown_variant():
    with pytest.raises(ValueError):
        decide_cycle_and_cosun("both")


# --------------------------------------------------------------------------
# registry

def test_registry_builds_every_protocol():
    c = cfg(path(3), [0])
    for name, entry in REGISTRY.items():
        arg = {"verify-degree": "2", "reduce": "tree"}.get(name)
        assert callable(entry.build(arg, c)), name


def test_get_protocol_parses_arguments():
    entry, arg = get_protocol("verify-degree:3")
    assert entry.name == "verify-degree" and arg == "3"
    assert get_protocol("rdv") == (REGISTRY["rdv"], None)
    with pytest.raises(KeyError):
        get_protocol("teleport")
    with pytest.raises(ValueError):
        REGISTRY["reduce"].build(None, cfg(K2, [0]))
