"""Corpus-wide property checks, grouped into named suites.

Every suite returns a :class:`SuiteReport`: one :class:`Check` per
property, with the number of cases examined and the first counterexample.
Checks marked ``informational`` never fail a suite.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .corpus import CorpusEntry, norris_corpus, small_entries, standard_corpus
from .generators import DEFAULT_SEED, consistent_cycle, path, star, sun
from .graphs import (
    O,
    P,
    InitialConfiguration,
    PortLabeledGraph,
    isomorphic,
    quotient_isomorphic,
    rooted_isomorphic,
    serialize_graph,
)
from .problems import (
    CYCLE,
    OMEGA,
    PATH,
    QUOTIENT,
    REGISTRY,
    SUN,
    TEAMSIZE,
    TREE,
    TREESIZE,
    ProblemDescriptor,
    closure_check,
    complement,
    decode_empty,
    oracle_env,
    witness_same_quotient_nonisomorphic,
)
from .protocols import deciders
from .protocols.mapping import token_map
from .protocols.omega import decide_cycle_and_cosun, omega_quotient, reduce_to_omega, verify_omega
from .protocols.rendezvous import gather, rdv
from .protocols.walks import tau
from .sim import run
from .views import partition_by_views, quotient, truncated_view, view_partition


@dataclass
class Check:
    name: str
    passed: bool
    cases: int
    detail: str = ""
    counterexample: Optional[str] = None
    informational: bool = False


@dataclass
class SuiteReport:
    suite: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed or c.informational for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "checks": [asdict(c) for c in self.checks]}

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "INFO" if c.informational else ("PASS" if c.passed else "FAIL")
            out.append(f"{status} {self.suite}/{c.name}: {c.cases} cases. {c.detail}".rstrip())
            if c.counterexample and not c.passed:
                out.append(f"  first counterexample: {c.counterexample}")
        return out


class _Tally:
    """Counts cases and keeps the first failure."""

    def __init__(self, name: str):
        self.name = name
        self.cases = 0
        self.first: Optional[str] = None
        self.failures = 0

    def see(self, ok: bool, what: Callable[[], str]) -> None:
        self.cases += 1
        if not ok:
            self.failures += 1
            if self.first is None:
                self.first = what()

    def check(self, detail: str = "", informational: bool = False) -> Check:
        if self.failures:
            detail = f"{self.failures} failing. {detail}".strip()
        return Check(self.name, self.failures == 0, self.cases, detail, self.first, informational)


def _where(entry: CorpusEntry, **extra) -> str:
    bits = " ".join(f"{k}={v}" for k, v in extra.items())
    return f"{entry.name} {bits}".strip()


def _config(g: PortLabeledGraph, starts, ids=None, inputs=None) -> InitialConfiguration:
    k = len(starts)
    ids = tuple(ids) if ids is not None else tuple(range(1, k + 1))
    inputs = tuple(inputs) if inputs is not None else ("",) * k
    return InitialConfiguration(g, tuple(starts), ids, inputs)


# --------------------------------------------------------------------------
# views and quotients

def norris_suite(seed: int = DEFAULT_SEED) -> SuiteReport:
    """Stabilization by depth n-1, the sharper bound by the quotient size, equal fibers."""
    stab = _Tally("stabilization")
    bound = _Tally("quotient-bound")
    fibers = _Tally("fibers")
    refine = _Tally("refinement-matches-views")
    worst = 0
    for e in norris_corpus(seed):
        g, n = e.graph, e.n
        short = partition_by_views(g, max(n - 1, 0))
        stab.see(short == partition_by_views(g, 2 * n), lambda: _where(e))
        part = view_partition(g)
        refine.see(part.blocks == short, lambda: _where(e))
        nhat = len(part.blocks)
        worst = max(worst, part.stabilization_depth - (nhat - 1))
        bound.see(part.stabilization_depth <= max(nhat - 1, 0),
                  lambda: _where(e, depth=part.stabilization_depth, nhat=nhat))
        sizes = {len(b) for b in part.blocks}
        fibers.see(len(sizes) == 1 and n % nhat == 0, lambda: _where(e, sizes=sorted(sizes)))
    return SuiteReport("norris", [
        stab.check("depth n-1 partition equals depth 2n partition"),
        bound.check(f"max(depth - (nhat - 1)) = {worst}"),
        fibers.check("all classes equal-sized, nhat divides n"),
        refine.check("partition refinement equals grouping by depth n-1 views"),
    ])


# --------------------------------------------------------------------------
# rendezvous, gathering, mapping

def rdv_suite(id_sets: Iterable[tuple[int, int]] = ((1, 2), (2, 5)), max_n: int = 4) -> SuiteReport:
    meet = _Tally("meet-by-tau")
    home = _Tally("home-at-tau")
    latest = 0
    for e in small_entries(max_n):
        g, n = e.graph, e.n
        proto = rdv(n)
        for ids in id_sets:
            for starts in itertools.product(range(n), repeat=2):
                out = run(_config(g, starts, ids), proto)
                lo = min(ids)
                r = out.first_meeting(*ids)
                latest = max(latest, r if r is not None else 0)
                meet.see(r is not None and r <= tau(n, lo), lambda: _where(e, ids=ids, starts=starts, met=r))
                for i, s in zip(ids, starts):
                    home.see(out.position(i, tau(n, i)) == s, lambda: _where(e, ids=ids, starts=starts, agent=i))
    return SuiteReport("rdv", [
        meet.check(f"latest first meeting at round {latest}"),
        home.check("every agent i at its start at round tau(n, i)"),
    ])


def _sampled_placements(n: int, k: int, count: int, rng) -> list[tuple[int, ...]]:
    every = list(itertools.product(range(n), repeat=k))
    if len(every) <= count:
        return every
    pick = sorted(rng.choice(len(every), size=count, replace=False).tolist())
    return [every[i] for i in pick]


def gather_suite(ks: Iterable[int] = (2, 3), sample_n5: int = 8, seed: int = DEFAULT_SEED) -> SuiteReport:
    """All placements up to four nodes, and a seeded sample of placements on five-node graphs."""
    together = _Tally("gathered")
    rng = np.random.default_rng(seed)
    cases = [(e, None) for e in small_entries()]
    cases += [(e, sample_n5) for e in standard_corpus(seed) if e.n == 5]
    latest = 0
    for k in ks:
        proto = gather(k)
        for e, sample in cases:
            n = e.n
            placements = (
                list(itertools.product(range(n), repeat=k)) if sample is None
                else _sampled_placements(n, k, sample, rng)
            )
            for starts in placements:
                out = run(_config(e.graph, starts), proto)
                latest = max(latest, out.rounds_used)
                ok = not out.exhausted and out.gathered() and all(
                    r["group"] == list(range(1, k + 1)) for r in out.outputs.values()
                )
                together.see(ok, lambda: _where(e, k=k, starts=starts))
    return SuiteReport("gather", [together.check(f"longest run {latest} rounds")])


def token_suite(max_n: int = 5, seed: int = DEFAULT_SEED) -> SuiteReport:
    mapped = _Tally("map-isomorphic")
    rooted = _Tally("start-marked")
    for e in standard_corpus(seed):
        if e.n > max_n:
            continue
        for s in range(e.n):
            out = run(_config(e.graph, (s,)), token_map(), token_at=s)
            m, start = out.outputs[1]
            mapped.see(isomorphic(m, e.graph) is not None, lambda: _where(e, start=s))
            rooted.see(rooted_isomorphic(m, start, e.graph, s), lambda: _where(e, start=s))
    return SuiteReport("token", [mapped.check(), rooted.check("the map's start is the agent's start up to automorphism")])


# --------------------------------------------------------------------------
# Omega

def omega_configurations(seed: int = DEFAULT_SEED, n4_sample: int = 12) -> list[InitialConfiguration]:
    """Configurations for the Omega verifier, with inputs on both branches and malformed ones."""
    rng = np.random.default_rng(seed)
    small = [e for e in small_entries() if e.n <= 3]
    fours = [e for e in small_entries() if e.n == 4]
    pick = sorted(rng.choice(len(fours), size=min(n4_sample, len(fours)), replace=False).tolist())
    out = []
    for e in small + [fours[i] for i in pick]:
        g = e.graph
        inputs = ["10", "11", "12", omega_quotient(O), omega_quotient(P), omega_quotient(quotient(g)), "3", "2x"]
        for k in (1, 2):
            placements = list(itertools.product(range(g.node_count), repeat=k))
            if e.n == 4:
                placements = [placements[0], placements[-1]]
            for starts in placements:
                for w in inputs:
                    out.append(_config(g, starts, inputs=(w,) * k))
    return out


def omega_suite(seed: int = DEFAULT_SEED) -> SuiteReport:
    accept = _Tally("yes-accepted-with-honest-certificate")
    reject = _Tally("no-rejected-for-every-tested-certificate")
    proto = verify_omega()
    configs = omega_configurations(seed)
    yes = 0
    for c in configs:
        n = c.graph.node_count
        what = lambda: f"n={n} starts={c.starts} input={c.inputs[0]!r}"
        if OMEGA.ground_truth(c):
            yes += 1
            out = run(c, proto, certificates=str(n))
            accept.see(all(out.decisions.values()), what)
        else:
            for x in range(1, 2 * n + 1):
                out = run(c, proto, certificates=str(x))
                reject.see(not all(out.decisions.values()), lambda: f"{what()} x={x}")
    note = f"{len(configs)} configurations, {yes} yes-instances"
    return SuiteReport("omega", [
        accept.check(note),
        reject.check("certificates bounded to x in 1..2n instead of all x"),
    ])


# --------------------------------------------------------------------------
# the reduction

REDUCTION_PROBLEMS: tuple[tuple[ProblemDescriptor, tuple[str, ...]], ...] = (
    (TREE, ("",)),
    (PATH, ("",)),
    (TEAMSIZE, ("0", "1", "2", "3")),
)


def reduction_configurations(max_n: int = 4, ks: Iterable[int] = (1, 2, 3)):
    for e in small_entries(max_n):
        for k in ks:
            for starts in itertools.product(range(e.n), repeat=k):
                yield e, starts


def reduction_suite(max_n: int = 4, problems=REDUCTION_PROBLEMS) -> SuiteReport:
    checks = []
    for problem, inputs in problems:
        tally = _Tally(f"agrees-{problem.name}")
        proto = reduce_to_omega(problem)
        for e, starts in reduction_configurations(max_n):
            for w in inputs:
                c = _config(e.graph, starts, inputs=(w,) * len(starts))
                out = run(c, proto, oracle=oracle_env(OMEGA, c))
                want = problem.ground_truth(c)
                tally.see(out.decision_vector() == (want,) * len(starts),
                          lambda: _where(e, starts=starts, input=w, got=out.decision_vector(), want=want))
        checks.append(tally.check("every agent decides the ground truth"))
    return SuiteReport("reduction", checks)


# --------------------------------------------------------------------------
# dovetailing

def dovetail_suite(max_n: int = 5, seed: int = DEFAULT_SEED, budget: int = 10 ** 6) -> SuiteReport:
    tally = _Tally("treesize-dovetail")
    proto = deciders.treesize_dovetail()
    for e in standard_corpus(seed):
        if e.n > max_n:
            continue
        for s in range(e.n):
            for m in range(1, max_n + 2):
                c = _config(e.graph, (s,), inputs=(str(m),))
                out = run(c, proto, max_rounds=budget)
                tally.see(out.decisions[1] == TREESIZE.ground_truth(c), lambda: _where(e, start=s, input=m))
    control = run(_config(star(4), (0,), inputs=("4",)),
                  deciders.dovetail_decide(deciders.never_accepts(), deciders.never_accepts()), max_rounds=200)
    never = Check("rejecting-pair-exhausts-budget", control.exhausted and control.undecided == [1], 1,
                  "a pair that accepts nothing is reported undecided")
    return SuiteReport("dovetail", [tally.check("terminates and matches ground truth"), never])


# --------------------------------------------------------------------------
# separations

def indistinguishable_path_cycle(t: int) -> bool:
    """Center of the consistent path on 2t+3 nodes vs any consistent cycle node, at depth t."""
    p = path(2 * t + 3)
    c = consistent_cycle(2 * t + 3)
    return truncated_view(p, t + 1, t) is truncated_view(c, 0, t)


COSUN = complement(SUN)


def separations_suite(witness_max_n: int = 8) -> SuiteReport:
    shapes = _Tally("cycle-and-sun-quotients")
    for m in range(3, 7):
        shapes.see(quotient_isomorphic(quotient(consistent_cycle(m)), O), lambda: f"cycle {m}")
        shapes.see(quotient_isomorphic(quotient(sun(m)), P), lambda: f"sun {m}")

    decided = _Tally("cycle-cosun-decider")
    graphs = [(f"cycle:{m}", consistent_cycle(m)) for m in range(3, 9)]
    graphs += [(f"sun:{m}", sun(m)) for m in range(3, 6)]
    graphs += [(f"star:{m}", star(m)) for m in range(2, 7)]
    graphs += [(f"path:{m}", path(m)) for m in range(1, 7)]
    for name, g in graphs:
        for s in range(g.node_count):
            for which, problem, w in (("cycle", CYCLE, ""), ("cosun", COSUN, ""),
                                      ("product", CYCLE, "1"), ("product", COSUN, "2")):
                c = _config(g, (s,), inputs=(w,))
                truth = problem.ground_truth(_config(g, (s,)))
                out = run(c, decide_cycle_and_cosun(which), oracle=oracle_env(QUOTIENT, c))
                decided.see(out.decisions[1] == truth, lambda: f"{name} start={s} {which} input={w!r}")

    c4, c6 = consistent_cycle(4), consistent_cycle(6)
    same = quotient_isomorphic(quotient(c4), quotient(c6)) and c4.node_count != c6.node_count
    sizes = Check("c4-c6-same-quotient", same, 1, "so the node count is invisible to the quotient")

    pair = witness_same_quotient_nonisomorphic(witness_max_n)
    if pair is None:
        witness = Check("same-quotient-nonisomorphic-pair", False, 1, f"none with n <= {witness_max_n}")
    else:
        g, h = pair
        ok = (g.node_count == h.node_count and quotient_isomorphic(quotient(g), quotient(h))
              and isomorphic(g, h) is None)
        witness = Check("same-quotient-nonisomorphic-pair", ok, 1,
                        f"n={g.node_count}: " + " | ".join(serialize_graph(x).replace("\n", "; ") for x in pair))

    blind = _Tally("path-vs-cycle-views")
    for t in range(1, 6):
        blind.see(indistinguishable_path_cycle(t), lambda: f"t={t}")
    return SuiteReport("separations", [
        shapes.check("m = 3..6"), decided.check(), sizes, witness, blind.check("t = 1..5"),
    ])


# --------------------------------------------------------------------------
# closure under automorphisms

def _even_start_index(c: InitialConfiguration, _) -> bool:
    return all(s % 2 == 0 for s in c.starts)


BROKEN = ProblemDescriptor("even-start-index", True, decode_empty, _even_start_index, lambda g, k: [[""] * k])


def closure_suite(max_agents: int = 2) -> SuiteReport:
    checks = []
    graphs = small_entries()
    for name in sorted(REGISTRY):
        problem = REGISTRY[name]
        tally = _Tally(f"closed-{name}")
        for e in graphs:
            bad = closure_check(problem, e.graph, max_agents)
            tally.see(bad is None, lambda: _where(e, alpha=bad[0], config=bad[1]))
        checks.append(tally.check())
    caught = closure_check(BROKEN, consistent_cycle(4), 1) is not None
    checks.append(Check("negative-control-caught", caught, 1, "start-index parity is not invariant"))
    return SuiteReport("closure", checks)


# --------------------------------------------------------------------------
# unanimity of the deciders

def unanimity_suite(max_n: int = 4, seed: int = DEFAULT_SEED) -> SuiteReport:
    checks = []

    def sweep(name, proto, configs, oracle_problem=None, budget=None):
        tally = _Tally(name)
        for label, c in configs:
            oracle = oracle_env(oracle_problem, c) if oracle_problem else None
            out = run(c, proto, oracle=oracle, max_rounds=budget)
            tally.see(out.all_decided and out.unanimous, lambda: f"{label} got={out.decision_vector()}")
        checks.append(tally.check())

    def multi(inputs, ks=(1, 2), n_max=max_n):
        for e in small_entries(n_max):
            for k in ks:
                for starts in itertools.product(range(e.n), repeat=k):
                    for w in inputs:
                        yield _where(e, starts=starts, input=w), _config(e.graph, starts, inputs=(w,) * k)

    sweep("treesize", deciders.decide_treesize(), multi([str(m) for m in range(1, 6)]))
    sweep("odd", deciders.decide_odd(), multi([""]))
    sweep("dovetail-treesize", deciders.treesize_dovetail(), multi(["3", "4"], ks=(1,)), budget=10 ** 6)
    sweep("cycle-cosun", decide_cycle_and_cosun("product"), multi(["1", "2"], ks=(1,)), QUOTIENT)
    for problem, inputs in REDUCTION_PROBLEMS:
        sweep(f"reduce-{problem.name}", reduce_to_omega(problem),
              multi(inputs, ks=(1, 2, 3), n_max=3), OMEGA)
    return SuiteReport("unanimity", checks)


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "norris": norris_suite,
    "rdv": rdv_suite,
    "gather": gather_suite,
    "token": token_suite,
    "omega": omega_suite,
    "reduction": reduction_suite,
    "dovetail": dovetail_suite,
    "separations": separations_suite,
    "closure": closure_suite,
    "unanimity": unanimity_suite,
}


def run_suite(name: str, **options) -> SuiteReport:
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(SUITES)}") from None
    t0 = time.perf_counter()
    report = fn(**options)
    report.seconds = time.perf_counter() - t0
    return report
