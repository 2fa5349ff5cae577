import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from mobile_agents.corpus import small_graphs
from mobile_agents.generators import random_graph

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def graphs(draw, min_n=1, max_n=6):
    """A small graph: either from the exhaustive list or a seeded random one."""
    if draw(st.booleans()):
        pool = [g for g in small_graphs() if min_n <= g.node_count <= max_n]
        return draw(st.sampled_from(pool))
    n = draw(st.integers(max(min_n, 2), max_n))
    density = draw(st.floats(0.0, 1.0))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_graph(n, density, seed)


@st.composite
def permutations(draw, n):
    return tuple(draw(st.permutations(range(n))))


def brute_automorphisms(g):
    """Every node permutation preserving the edge set, by trying them all."""
    edges = set(g.edges)
    out = []
    for perm in itertools.permutations(range(g.node_count)):
        if set(g.relabel(perm).edges) == edges:
            out.append(perm)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
