"""Round budgets and the local walking rules agents use.

A rule is a generator in the sense of :class:`~mobile_agents.sim.Walk`: it
yields ports and is sent ``(degree, entry_port)`` after each step.
"""
from __future__ import annotations

import itertools
from typing import Generator, Iterator, Optional

from ..sim import Agent, Stay, Walk


def tau(n: int, i: int) -> int:
    """Rounds after which rendezvous agent ``i`` is home and has met its partner."""
    return 2 * (i + 1) * n ** n


def tau_max(n: int, b: int) -> int:
    """Largest ``tau(n, i)`` over identities written on ``b`` bits."""
    return 2 * 2 ** b * n ** n


def tour_period(n: int) -> int:
    return 2 * n ** n


def diagonal_pairs(start_n: int = 1, start_b: int = 1) -> Iterator[tuple[int, int]]:
    """Pairs ``(n, b)`` by ``n + b`` ascending, then ``n`` ascending."""
    for total in itertools.count(start_n + start_b):
        for n in range(start_n, total - start_b + 1):
            yield n, total - n


def tour_rule(n: int, budget: int, degree: int) -> Generator[int, tuple, None]:
    """Euler tour of the tree of all port sequences of length at most ``n``.

    Ports are tried in increasing order at every step, the entry port
    included, and the agent backtracks through the port it entered by.  A
    branch is only entered if the walk can still get home within ``budget``
    moves, so the walk always ends at its start.
    """
    moves = 0
    # each frame: degree of the node, next port to try, port leading back
    frames: list[list] = [[degree, 1, None]]
    while frames:
        frame = frames[-1]
        depth = len(frames) - 1
        deg, p, back = frame
        if depth < n and p <= deg and moves + 2 + depth <= budget:
            frame[1] = p + 1
            d2, q = yield p
            moves += 1
            frames.append([d2, 1, q])
            continue
        frames.pop()
        if back is not None:
            yield back
            moves += 1


def tour_walk(n: int, degree: int, interruptible: bool = False, budget: Optional[int] = None) -> Walk:
    """The walk of one depth-``n`` tour from a node of the given degree."""
    b = tour_period(n) if budget is None else budget
    return Walk(tour_rule(n, b, degree), interruptible, key=("tour", n, b))


def dfs_tour(agent: Agent, n: int):
    """One tour, padded with waiting to exactly ``2 n^n`` rounds."""
    start = agent.obs.round
    end = start + tour_period(n)
    obs = yield tour_walk(n, agent.obs.degree)
    while obs.round < end:
        obs = yield Stay(end - obs.round)
    return obs


class TreeWalkState:
    """What a tree-shaped exploration learned, filled in while it runs."""

    def __init__(self):
        self.complete = False
        self.nodes = 1
        self.degrees: list[int] = []
        self.steps = 0


def tree_walk_rule(budget: int, degree: int, state: TreeWalkState) -> Generator[int, tuple, None]:
    """Depth-first walk that assumes the graph is a tree.

    Every arrival is recorded as a new node, and the port leading back is
    never taken forward.  The walk stops after ``budget`` forward-or-back
    steps or when it has exhausted every port; in both cases it then returns
    to its start.  ``state.complete`` tells whether the exhaustive case
    happened within the budget.
    """
    state.degrees = [degree]
    frames: list[list] = [[degree, 1, None]]
    steps = 0
    while frames and steps < budget:
        frame = frames[-1]
        deg, p, back = frame
        if p == back:
            p += 1
        if p <= deg:
            frame[1] = p + 1
            d2, q = yield p
            steps += 1
            state.nodes += 1
            state.degrees.append(d2)
            frames.append([d2, 1, q])
            continue
        frames.pop()
        if back is not None:
            yield back
            steps += 1
    state.steps = steps
    # finished iff only the (fully explored) root frame could remain
    if not frames:
        state.complete = True
    elif len(frames) == 1:
        deg, p, _ = frames[0]
        state.complete = p > deg
    # head home the way we came
    for frame in reversed(frames[1:]):
        yield frame[2]
