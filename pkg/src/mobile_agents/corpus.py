"""The standard graph corpus used by the suites, plus the witness search space.

The exhaustive part (every graph with at most four nodes) ships as a text
file so runs do not depend on re-enumeration; :func:`regenerate_small` rebuilds
it and the tests check the two agree.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterator

import numpy as np

from .generators import (
    DEFAULT_SEED,
    MAX_EXHAUSTIVE_N,
    consistent_cycle,
    enumerate_connected,
    lifts,
    path,
    random_graph,
    star,
    sun,
)
from .graphs import PortLabeledGraph, parse_graph, serialize_graph
from .problems import quotient_key
from .views import quotient

SMALL_GRAPHS_FILE = "small_graphs.txt"
RANDOM_SIZES = (5, 6)
RANDOM_COUNT = 64


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    graph: PortLabeledGraph

    @property
    def n(self) -> int:
        return self.graph.node_count


def regenerate_small() -> tuple[PortLabeledGraph, ...]:
    return tuple(g for n in range(1, MAX_EXHAUSTIVE_N + 1) for g in enumerate_connected(n))


def dump_graphs(graphs) -> str:
    return "\n".join(serialize_graph(g) for g in graphs)


def load_graphs(text: str) -> tuple[PortLabeledGraph, ...]:
    blocks: list[list[str]] = []
    for line in text.splitlines():
        if line.startswith("graph "):
            blocks.append([])
        if line.strip() and blocks:
            blocks[-1].append(line)
    return tuple(parse_graph("\n".join(b)) for b in blocks)


@lru_cache(maxsize=None)
def small_graphs() -> tuple[PortLabeledGraph, ...]:
    """Every connected port-labeled graph on 1..4 nodes, read from the cached file."""
    text = resources.files("mobile_agents.data").joinpath(SMALL_GRAPHS_FILE).read_text()
    return load_graphs(text)


def named_graphs() -> list[CorpusEntry]:
    out = []
    for n in range(5, 9):
        out.append(CorpusEntry(f"cycle:{n}", consistent_cycle(n)))
        out.append(CorpusEntry(f"path:{n}", path(n)))
        out.append(CorpusEntry(f"star:{n}", star(n)))
    out.append(CorpusEntry("sun:3", sun(3)))
    out.append(CorpusEntry("sun:4", sun(4)))
    return out


@lru_cache(maxsize=None)
def random_entries(seed: int = DEFAULT_SEED, count: int = RANDOM_COUNT) -> tuple[CorpusEntry, ...]:
    """``count`` seeded random graphs, alternating over the sizes in ``RANDOM_SIZES``."""
    children = np.random.SeedSequence(seed).spawn(count)
    out = []
    for i, child in enumerate(children):
        n = RANDOM_SIZES[i % len(RANDOM_SIZES)]
        rng = np.random.default_rng(child)
        density = float(rng.uniform(0.1, 0.6))
        out.append(CorpusEntry(f"random:{n}:{i}", random_graph(n, density, rng)))
    return tuple(out)


def small_entries(max_n: int = MAX_EXHAUSTIVE_N) -> list[CorpusEntry]:
    counts: dict[int, int] = {}
    out = []
    for g in small_graphs():
        if g.node_count > max_n:
            continue
        i = counts.get(g.node_count, 0)
        counts[g.node_count] = i + 1
        out.append(CorpusEntry(f"small:{g.node_count}:{i}", g))
    return out


def norris_corpus(seed: int = DEFAULT_SEED) -> list[CorpusEntry]:
    """All graphs with n <= 4 and the seeded sample at n in {5, 6}."""
    return small_entries() + list(random_entries(seed))


def standard_corpus(seed: int = DEFAULT_SEED) -> list[CorpusEntry]:
    return small_entries() + named_graphs() + list(random_entries(seed))


def witness_search_space(max_n: int) -> Iterator[PortLabeledGraph]:
    """Small graphs, then for each larger size the lifts of every small quotient that fits.

    Two graphs share a quotient only if both cover it, so lifting each
    distinct quotient seen among small graphs reaches every candidate pair
    whose quotient has at most four nodes.
    """
    yield from small_graphs()
    quotients = {}
    for g in small_graphs():
        quotients.setdefault(quotient_key(g), quotient(g))
    ordered = sorted(quotients.items(), key=lambda kv: (kv[1].node_count, kv[0]))
    for n in range(MAX_EXHAUSTIVE_N + 1, max_n + 1):
        for _, q in ordered:
            if n % q.node_count == 0:
                yield from lifts(q, n // q.node_count)
