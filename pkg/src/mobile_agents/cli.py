"""Command-line front end: ``mobile-agents <command> ...``.

Graphs come from ``--graph FILE`` or ``--gen NAME:PARAMS`` (``cycle:6``,
``path:3``, ``star:4``, ``sun:3``, ``random:N[:DENSITY[:SEED]]``,
``enum:N:I`` for the I-th enumerated graph on N nodes).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence
from urllib.parse import unquote

from . import generators
from .graphs import (
    GraphFormatError,
    InitialConfiguration,
    PortLabeledGraph,
    QuotientGraph,
    isomorphic,
    parse_config,
    parse_graph,
    serialize_graph,
    serialize_quotient,
)
from .problems import REGISTRY as PROBLEMS
from .problems import get_problem, oracle_env, witness_same_quotient_nonisomorphic
from .protocols import REGISTRY as PROTOCOLS
from .protocols import get_protocol
from .sim import SimulationFault, run
from .views import quotient_with_classes, truncated_view, view_partition

BUDGET_SLACK = 1000


class UsageError(Exception):
    pass


def graph_from_gen(spec: str, seed: int = generators.DEFAULT_SEED) -> PortLabeledGraph:
    name, *params = spec.split(":")
    try:
        if name == "cycle":
            return generators.consistent_cycle(int(params[0]))
        if name == "path":
            return generators.path(int(params[0]))
        if name == "star":
            return generators.star(int(params[0]))
        if name == "sun":
            return generators.sun(int(params[0]))
        if name == "random":
            n = int(params[0])
            density = float(params[1]) if len(params) > 1 else 0.3
            s = int(params[2]) if len(params) > 2 else seed
            return generators.random_graph(n, density, s)
        if name == "enum":
            return generators.enumerate_connected(int(params[0]))[int(params[1])]
    except (IndexError, ValueError) as exc:
        raise UsageError(f"bad generator spec {spec!r}: {exc}") from None
    raise UsageError(f"unknown generator {name!r} (cycle, path, star, sun, random, enum)")


def load_graph(args, which: str = "graph") -> PortLabeledGraph:
    path = getattr(args, which, None)
    gen = getattr(args, "gen", None) if which == "graph" else None
    if path and gen:
        raise UsageError("give either --graph or --gen, not both")
    if path:
        return parse_graph(Path(path).read_text())
    if gen:
        return graph_from_gen(gen, args.seed)
    raise UsageError("a graph is needed: --graph FILE or --gen NAME:PARAMS")


def parse_agents(text: str, shared_input: str) -> tuple[tuple[int, ...], tuple[int, ...], tuple[str, ...]]:
    """``node:id[:input]`` items, comma separated; inputs are percent-decoded."""
    starts, ids, inputs = [], [], []
    for item in text.split(","):
        parts = item.strip().split(":")
        if len(parts) not in (2, 3):
            raise UsageError(f"bad agent {item!r}; expected node:id[:input]")
        try:
            starts.append(int(parts[0]))
            ids.append(int(parts[1]))
        except ValueError:
            raise UsageError(f"bad agent {item!r}; node and id must be integers") from None
        inputs.append(unquote(parts[2]) if len(parts) == 3 else shared_input)
    return tuple(starts), tuple(ids), tuple(inputs)


def load_config(args) -> InitialConfiguration:
    if args.config:
        if args.graph or args.gen or args.agents:
            raise UsageError("--config already fixes the graph and the agents")
        return parse_config(Path(args.config).read_text(), base_dir=Path(args.config).parent)
    g = load_graph(args)
    if not args.agents:
        raise UsageError("--agents node:id[:input],... is needed (or --config)")
    starts, ids, inputs = parse_agents(args.agents, args.input)
    try:
        return InitialConfiguration(g, starts, ids, inputs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def default_budget(config: InitialConfiguration, certificate: Optional[str]) -> int:
    """``4 (max id + 1) m^m`` plus slack, with ``m`` the larger of n and a numeric certificate."""
    m = config.graph.node_count
    if certificate and certificate.isdigit():
        m = max(m, int(certificate))
    return 4 * (max(config.ids) + 1) * m ** m + BUDGET_SLACK


def _plain(value: Any) -> Any:
    """JSON-friendly rendering of protocol outputs."""
    if isinstance(value, PortLabeledGraph):
        return serialize_graph(value)
    if isinstance(value, QuotientGraph):
        return serialize_quotient(value)
    if isinstance(value, (set, frozenset)):
        return sorted(_plain(v) for v in value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return repr(value)


def _verdict(d: Optional[bool]) -> str:
    return "undecided" if d is None else ("yes" if d else "no")


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(text)


# --------------------------------------------------------------------------
# commands

def cmd_quotient(args) -> int:
    g = load_graph(args)
    q, cls = quotient_with_classes(g)
    _emit(args, {"quotient": serialize_quotient(q), "class_of": list(cls),
                 "stabilization_depth": view_partition(g).stabilization_depth},
          serialize_quotient(q).rstrip())
    return 0


def cmd_view(args) -> int:
    g = load_graph(args)
    if not 0 <= args.node < g.node_count:
        raise UsageError(f"node {args.node} out of range")
    if args.depth < 0:
        raise UsageError("depth must be non-negative")
    vt = truncated_view(g, args.node, args.depth)
    _emit(args, {"node": args.node, "depth": args.depth, "view": repr(vt), "tree_nodes": vt.node_count()},
          repr(vt))
    return 0


def cmd_iso(args) -> int:
    g = load_graph(args)
    h = parse_graph(Path(args.other).read_text()) if args.other else None
    if h is None:
        if not args.other_gen:
            raise UsageError("iso needs a second graph: --other FILE or --other-gen SPEC")
        h = graph_from_gen(args.other_gen, args.seed)
    f = isomorphic(g, h)
    _emit(args, {"isomorphic": f is not None, "bijection": list(f) if f else None},
          "not isomorphic" if f is None else "isomorphic: " + " ".join(f"{u}->{v}" for u, v in enumerate(f)))
    return 0 if f is not None else 1


def cmd_run(args) -> int:
    try:
        entry, arg = get_protocol(args.protocol)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    config = load_config(args)
    try:
        protocol = entry.build(arg, config)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from None
    oracle = oracle_env(get_problem(entry.oracle), config) if entry.oracle else None
    if args.budget is None:
        budget = default_budget(config, args.cert)
    else:
        budget = None if args.budget == 0 else args.budget
    token_at = config.starts[0] if entry.token else None
    try:
        out = run(config, protocol, oracle=oracle, max_rounds=budget, certificates=args.cert,
                  token_at=token_at, record_trace=bool(args.trace))
    except SimulationFault as exc:
        print(f"simulation fault: {exc}", file=sys.stderr)
        return 2
    if args.trace:
        Path(args.trace).write_text(out.to_jsonl())
    payload = {
        "protocol": args.protocol,
        "rounds": out.rounds_used,
        "budget": budget,
        "exhausted": out.exhausted,
        "decisions": {str(i): _verdict(d) for i, d in sorted(out.decisions.items())},
        "outputs": {str(i): _plain(v) for i, v in sorted(out.outputs.items())},
        "oracle_calls": len(out.oracle_log),
    }
    lines = [f"protocol {args.protocol}: {out.rounds_used} rounds" + (" (budget exhausted)" if out.exhausted else "")]
    for i, d in sorted(out.decisions.items()):
        lines.append(f"  agent {i}: {_verdict(d)}")
    if len(config.ids) >= 2 and entry.name in ("rdv", "gather"):
        a, b = sorted(config.ids)[:2]
        r = out.first_meeting(a, b)
        payload["first_meeting"] = r
        lines.append(f"  agents {a} and {b} met at round {r}" if r is not None else "  no meeting")
    if entry.name == "gather":
        payload["gathered"] = out.gathered()
        lines.append(f"  gathered: {out.gathered()}")
    for i, v in sorted(out.outputs.items()):
        if v is not None:
            lines.append(f"  output {i}: {json.dumps(_plain(v))}")
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_suite(args) -> int:
    from .suites import run_suite

    options: dict[str, Any] = {}
    if args.name in ("norris", "gather", "token", "omega", "dovetail", "unanimity"):
        options["seed"] = args.seed
    if args.ids:
        if args.name != "rdv":
            raise UsageError("--ids only applies to the rdv suite")
        ids = tuple(int(x) for x in args.ids.split(","))
        if len(ids) != 2:
            raise UsageError("--ids takes two ids")
        options["id_sets"] = (ids,)
    try:
        report = run_suite(args.name, **options)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    payload = report.to_dict()
    _emit(args, payload, "\n".join(report.lines() + [f"suite {args.name}: {'pass' if report.passed else 'FAIL'}"]))
    return 0 if report.passed else 1


def cmd_problems(args) -> int:
    if args.action == "list":
        rows = [{"name": p.name, "uniform": p.uniform, "tags": list(p.tags), "doc": p.doc}
                for p in sorted(PROBLEMS.values(), key=lambda p: p.name)]
        _emit(args, {"problems": rows},
              "\n".join(f"{r['name']:<12} {'uniform' if r['uniform'] else 'per-agent':<10} {r['doc']}" for r in rows))
        return 0
    if not args.problem or not args.config_file:
        raise UsageError("problems eval NAME CONFIG-FILE [INPUT]")
    try:
        problem = get_problem(args.problem)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    config = parse_config(Path(args.config_file).read_text(), base_dir=Path(args.config_file).parent)
    if args.value is not None:
        config = config.with_inputs(unquote(args.value))
    answer = problem.ground_truth(config)
    _emit(args, {"problem": problem.name, "answer": answer}, "yes" if answer else "no")
    return 0


def cmd_enumerate(args) -> int:
    try:
        graphs = generators.enumerate_connected(args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.count:
        _emit(args, {"n": args.n, "count": len(graphs)}, str(len(graphs)))
    else:
        _emit(args, {"n": args.n, "graphs": [serialize_graph(g) for g in graphs]},
              "\n".join(serialize_graph(g) for g in graphs).rstrip())
    return 0


def cmd_witness(args) -> int:
    pair = witness_same_quotient_nonisomorphic(args.max_n)
    if pair is None:
        _emit(args, {"found": False}, f"no pair with at most {args.max_n} nodes")
        return 1
    text = "\n".join(serialize_graph(g) for g in pair)
    if args.out:
        Path(args.out).write_text(text)
    _emit(args, {"found": True, "graphs": [serialize_graph(g) for g in pair]}, text.rstrip())
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=generators.DEFAULT_SEED)

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--graph", help="graph file")
    source.add_argument("--gen", help="generator spec, e.g. cycle:6")

    parser = argparse.ArgumentParser(prog="mobile-agents", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quotient", parents=[common, source], help="print the quotient graph")
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("view", parents=[common, source], help="print a truncated view")
    p.add_argument("--node", type=int, default=0)
    p.add_argument("--depth", type=int, default=1)
    p.set_defaults(func=cmd_view)

    p = sub.add_parser("iso", parents=[common, source], help="port-preserving isomorphism test")
    p.add_argument("--other", help="second graph file")
    p.add_argument("--other-gen", help="second graph generator spec")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("run", parents=[common, source], help="simulate a protocol")
    p.add_argument("protocol", help=f"name[:arg]; one of {', '.join(PROTOCOLS)}")
    p.add_argument("--config", help="configuration file")
    p.add_argument("--agents", help="node:id[:input],...")
    p.add_argument("--input", default="", help="input shared by agents without their own")
    p.add_argument("--cert", default=None, help="certificate shared by all agents")
    p.add_argument("--budget", type=int, default=None, help="round budget; 0 means none")
    p.add_argument("--trace", help="write a JSON-lines trace here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("suite", parents=[common], help="run a property suite over the corpus")
    p.add_argument("name")
    p.add_argument("--ids", help="rdv suite only: two ids, e.g. 1,2")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("problems", parents=[common], help="list problems or evaluate ground truth")
    p.add_argument("action", choices=["list", "eval"])
    p.add_argument("problem", nargs="?")
    p.add_argument("config_file", nargs="?")
    p.add_argument("value", nargs="?", help="input given to every agent (percent-encoded)")
    p.set_defaults(func=cmd_problems)

    p = sub.add_parser("enumerate", parents=[common], help="all graphs on n <= 4 nodes")
    p.add_argument("n", type=int)
    p.add_argument("--count", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("witness-search", parents=[common], help="same size and quotient, not isomorphic")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--out", help="write the pair here")
    p.set_defaults(func=cmd_witness)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GraphFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
