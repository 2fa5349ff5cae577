import pytest
from hypothesis import given

from mobile_agents.generators import consistent_cycle, path, star, sun
from mobile_agents.graphs import O, P, InitialConfiguration, PortLabeledGraph, serialize_graph, serialize_quotient
from mobile_agents.problems import (
    CYCLE,
    LEADER,
    LEAF,
    MAP,
    NODES,
    ODD,
    OMEGA,
    PATH,
    QUOTIENT,
    REGISTRY,
    SUN,
    TEAMSIZE,
    TREE,
    TREESIZE,
    closure_check,
    complement,
    configurations,
    degree_k,
    get_problem,
    is_consistent_sun,
    product,
    witness_same_quotient_nonisomorphic,
)
from mobile_agents.suites import BROKEN

from .conftest import graphs

K2 = PortLabeledGraph(2, ((0, 1, 1, 1),))


def cfg(g, starts, inputs=None):
    k = len(starts)
    return InitialConfiguration(g, tuple(starts), tuple(range(1, k + 1)), tuple(inputs or [""] * k))


@pytest.mark.parametrize("problem, c, want", [
    (NODES, cfg(path(5), [0], ["5"]), True),
    (NODES, cfg(path(5), [0], ["4"]), False),
    (NODES, cfg(path(5), [0, 1], ["5", "4"]), False),
    (NODES, cfg(path(5), [0], ["05"]), False),
    (TEAMSIZE, cfg(star(4), [0, 1, 2], ["2"] * 3), True),
    (TEAMSIZE, cfg(star(4), [0, 1, 2], ["3"] * 3), False),
    (TREE, cfg(star(4), [0]), True),
    (TREE, cfg(consistent_cycle(3), [0]), False),
    (TREE, cfg(star(4), [0], ["x"]), False),
    (TREESIZE, cfg(path(3), [0], ["3"]), True),
    (PATH, cfg(star(4), [0]), False),
    (LEAF, cfg(sun(3), [0]), True),
    (LEAF, cfg(consistent_cycle(5), [0]), False),
    (CYCLE, cfg(consistent_cycle(5), [0]), True),
    (SUN, cfg(sun(3), [0]), True),
    (SUN, cfg(consistent_cycle(6), [0]), False),
    (ODD, cfg(star(4), [1, 2]), True),
    (ODD, cfg(star(4), [1, 0]), True),
    (ODD, cfg(path(4), [0, 1]), False),
    (ODD, cfg(K2, [0]), True),
    (LEADER, cfg(K2, [0, 1], ["0", "1"]), True),
    (LEADER, cfg(K2, [0, 1], ["1", "1"]), False),
    (LEADER, cfg(K2, [0, 1], ["1", "2"]), False),
    (degree_k(3), cfg(sun(3), [3]), True),
    (degree_k(4), cfg(sun(3), [3]), False),
])
def test_ground_truth_examples(problem, c, want):
    assert problem.ground_truth(c) is want


def test_quotient_and_map_examples():
    assert not QUOTIENT.ground_truth(cfg(consistent_cycle(6), [0], [serialize_quotient(O)]))
    assert QUOTIENT.ground_truth(cfg(consistent_cycle(6), [0], [serialize_quotient(P)]))
    assert MAP.ground_truth(cfg(path(3), [0], [serialize_graph(path(3))]))
    assert not MAP.ground_truth(cfg(path(3), [0], [serialize_graph(star(4))]))
    assert not MAP.ground_truth(cfg(path(3), [0], ["nonsense"]))


def test_sun_recognition_needs_the_port_convention():
    s = sun(3)
    assert is_consistent_sun(s)
    flip = {1: 3, 3: 1, 2: 2}
    swapped = PortLabeledGraph(6, tuple(
        (u, flip[p] if u == 0 else p, v, flip[q] if v == 0 else q) for u, p, v, q in s.edges
    ))
    assert not is_consistent_sun(swapped)
    assert not is_consistent_sun(consistent_cycle(6))
    assert not is_consistent_sun(star(4))


def test_omega_is_the_uniform_product():
    two = cfg(K2, [0, 1], ["11"] * 2)
    assert OMEGA.ground_truth(two)
    assert not OMEGA.ground_truth(cfg(K2, [0], ["11"]))
    assert OMEGA.ground_truth(cfg(sun(3), [0], ["2" + serialize_quotient(O)]))
    assert not OMEGA.ground_truth(cfg(sun(3), [0], ["2" + serialize_quotient(P)]))
    assert not OMEGA.ground_truth(cfg(K2, [0], ["3"]))


def test_product_and_complement():
    prod = product(TREE, LEAF)
    assert prod.ground_truth(cfg(path(3), [0], ["1"]))
    assert prod.ground_truth(cfg(sun(3), [0], ["2"]))
    assert not prod.ground_truth(cfg(sun(3), [0], ["1"]))
    assert not prod.ground_truth(cfg(path(3), [0, 1], ["1", "2"]))
    assert not prod.ground_truth(cfg(path(3), [0], ["3"]))
    assert not prod.ground_truth(cfg(path(3), [0], [""]))
    assert complement(prod).name == "not tree x leaf"
    assert complement(complement(prod)).name == "tree x leaf"
    with pytest.raises(ValueError):
        product()


@given(graphs(max_n=4))
def test_complement_is_pointwise_and_an_involution(g):
    prod = product(TREE, CYCLE)
    neg = complement(prod)
    for c in _configs(g, prod):
        assert neg.ground_truth(c) is not prod.ground_truth(c)
        assert complement(neg).ground_truth(c) is prod.ground_truth(c)


def _configs(g, problem):
    return configurations(g, problem, 2)


def test_registry_names():
    assert {"treesize", "omega", "odd", "quotient", "degree_3"} <= set(REGISTRY)
    assert get_problem("tree") is TREE
    with pytest.raises(KeyError):
        get_problem("planar")


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_registered_problems_are_closed_on_small_graphs(name):
    for g in (K2, path(3), consistent_cycle(4), star(4), sun(3)):
        assert closure_check(REGISTRY[name], g) is None


def test_closure_catches_a_node_index_problem():
    alpha, c = closure_check(BROKEN, consistent_cycle(4), 1)
    assert BROKEN.ground_truth(c) != BROKEN.ground_truth(c.transport(alpha))


def test_witness_negatives():
    c4 = consistent_cycle(4)
    assert witness_same_quotient_nonisomorphic(4, [c4, c4]) is None
    assert witness_same_quotient_nonisomorphic(8, [c4, consistent_cycle(6)]) is None
    with pytest.raises(ValueError):
        witness_same_quotient_nonisomorphic(3)


def test_no_witness_among_four_node_graphs():
    assert witness_same_quotient_nonisomorphic(4) is None
