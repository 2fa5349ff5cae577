"""Rendezvous of two agents and gathering of a team by merging groups."""
from __future__ import annotations

from typing import Callable

from ..sim import Agent, Continue, Decide, Follow, Group, Observation, Stay
from .walks import diagonal_pairs, dfs_tour, tau, tau_max, tour_period, tour_walk


def rdv(n: int):
    """Two-agent rendezvous for graphs known to have ``n`` nodes.

    Agent ``i`` performs ``i`` padded tours, then waits at its start until
    round ``tau(n, i)`` and decides whether it has met anybody.
    """

    def protocol(agent: Agent):
        for _ in range(agent.id):
            yield from dfs_tour(agent, n)
        end = tau(n, agent.id)
        obs = agent.obs
        while obs.round < end:
            obs = yield Stay(end - obs.round)
        agent.result = sorted(agent.met)
        yield Decide(bool(agent.met))

    return protocol


class Demoted(Exception):
    """Raised inside a leader's schedule once it has merged into a bigger group."""


class Finished(Exception):
    """Raised when the stop condition of a merged schedule holds."""


class MergedSchedule:
    """Leader-side bookkeeping shared by gathering and the team-size check.

    ``stop`` is evaluated on the group after every merge.
    """

    def __init__(self, agent: Agent, group: Group, stop: Callable[[Group], bool]):
        self.agent = agent
        self.group = group
        self.stop = stop

    def on_resume(self, obs: Observation) -> None:
        if self.group.absorb(obs):
            self.group.publish(self.agent)
        if self.stop(self.group):
            raise Finished
        if not self.group.leading:
            raise Demoted

    def wait_until(self, end: int):
        obs = self.agent.obs
        while obs.round < end:
            obs = yield Stay(end - obs.round)
            self.on_resume(obs)
        return obs

    def tour(self, n: int):
        """One padded tour that merges with whatever it meets on the way."""
        start = self.agent.obs.round
        obs = yield tour_walk(n, self.agent.obs.degree, interruptible=True)
        self.on_resume(obs)
        while self.agent.interrupted:
            obs = yield Continue()
            self.on_resume(obs)
        yield from self.wait_until(start + tour_period(n))

    def rdv_phase(self, n: int, phase_start: int, phase_end: int):
        """The leader's rdv schedule for size ``n``, cut off at ``phase_end``."""
        period = tour_period(n)
        for j in range(self.agent.id):
            if phase_start + (j + 1) * period > phase_end:
                break
            yield from self.tour(n)
        yield from self.wait_until(phase_end)


def follow_leader(agent: Agent, group: Group, done: Callable[[Observation], bool]):
    """Follow the group's leader until ``done(obs)`` holds after a resume."""
    while True:
        obs = yield Follow(group.leader)
        if group.absorb(obs):
            group.publish(agent)
        if done(obs):
            return obs
        if group.leader not in obs.other_ids:
            # the leader is gone (it halted); hold position
            obs = yield Stay(1)
            if done(obs):
                return obs


def gather_phases(agent: Agent, k: int, mode: str = "gather"):
    """Run gathering phases until a group of ``k`` agents has formed.

    Returns the group.  Leader and followers both return at the node where
    the whole team stands; the leader returns one round before its
    followers notice.
    """
    group = Group(agent.id, mode)
    group.publish(agent)
    full = lambda g: len(g.members) >= k
    sched = MergedSchedule(agent, group, full)
    obs = agent.obs
    try:
        sched.on_resume(obs)
        phase_start = 0
        for n, b in diagonal_pairs():
            phase_end = phase_start + tau_max(n, b)
            agent.exposed["phase"] = (n, b)
            yield from sched.rdv_phase(n, phase_start, phase_end)
            phase_start = phase_end
    except Finished:
        return group
    except Demoted:
        pass

    def done(o):
        return full(group)

    yield from follow_leader(agent, group, done)
    return group


def gather(k: int):
    """Gathering of ``k`` agents that do not know the graph size."""

    def protocol(agent: Agent):
        group = yield from gather_phases(agent, k)
        agent.result = {"group": sorted(group.members), "phase": agent.exposed.get("phase")}
        if group.leading:
            # one round so every follower sees the completed group
            agent.exposed["group"] = group.members
            yield Stay(1)

    return protocol


def team_size_check(agent: Agent, x: int, k: int):
    """Merged rendezvous as if the graph had ``x`` nodes; decides ``|group| > k``."""
    group = Group(agent.id, "teamsize")
    group.publish(agent)
    sched = MergedSchedule(agent, group, lambda g: False)
    try:
        sched.on_resume(agent.obs)
        yield from sched.rdv_phase(x, 0, tau(x, agent.id))
        agent.result = sorted(group.members)
        yield Decide(len(group.members) > k)
        return
    except Demoted:
        pass
    while True:
        obs = yield Follow(group.leader)
        if group.absorb(obs):
            group.publish(agent)
        lead = obs.memory_of(group.leader)
        if lead is not None and "decision" in lead:
            agent.result = sorted(group.members)
            yield Decide(lead["decision"])
            return
        if lead is None:
            # leader vanished without deciding; cannot happen under the protocol
            yield Decide(False)
            return
