import json
import subprocess
import sys
from pathlib import Path

import pytest

from mobile_agents.cli import default_budget, graph_from_gen, main
from mobile_agents.generators import consistent_cycle, path
from mobile_agents.graphs import InitialConfiguration, parse_graph, serialize_graph, serialize_quotient, O
from mobile_agents.protocols import REGISTRY, ProtocolEntry
from mobile_agents.sim import Move

GOLDEN = Path(__file__).parent / "golden"


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name, argv", [
    ("quotient_sun3.json", ["quotient", "--gen", "sun:3", "--json"]),
    ("view_c3.json", ["view", "--gen", "cycle:3", "--depth", "2", "--json"]),
    ("run_rdv_k2.json", ["run", "rdv", "--gen", "path:2", "--agents", "0:1,1:2", "--json"]),
    ("run_omega_verify.json",
     ["run", "omega-verify", "--gen", "path:3", "--agents", "0:1,2:2", "--input", "11", "--cert", "3", "--json"]),
])
def test_json_output_matches_golden(capsys, name, argv):
    code, out, _ = cli(capsys, *argv)
    assert code == 0
    assert json.loads(out) == json.loads((GOLDEN / name).read_text())


def test_quotient_of_a_cycle_file_prints_o(capsys, tmp_path):
    f = tmp_path / "c6.txt"
    f.write_text(serialize_graph(consistent_cycle(6)))
    code, out, _ = cli(capsys, "quotient", "--graph", str(f))
    assert code == 0 and out == serialize_quotient(O)


def test_view_depth_zero(capsys):
    code, out, _ = cli(capsys, "view", "--gen", "star:4", "--depth", "0")
    assert code == 0 and out.strip() == "(3)"


def test_parse_errors_exit_nonzero(capsys, tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("graph 2\nedge 0 1 1 1\nedge 0 1 1 1\n")
    code, _, err = cli(capsys, "quotient", "--graph", str(f))
    assert code == 2 and "line 3" in err
    code, _, err = cli(capsys, "quotient", "--gen", "hexagon:6")
    assert code == 2 and "unknown generator" in err
    code, _, err = cli(capsys, "quotient")
    assert code == 2


def test_iso_exit_codes(capsys):
    assert cli(capsys, "iso", "--gen", "cycle:4", "--other-gen", "cycle:4")[0] == 0
    code, out, _ = cli(capsys, "iso", "--gen", "cycle:4", "--other-gen", "path:4")
    assert code == 1 and "not isomorphic" in out


def test_run_rdv_on_k2_meets_early(capsys):
    code, out, _ = cli(capsys, "run", "rdv", "--gen", "path:2", "--agents", "0:1,1:2")
    assert code == 0
    line = next(s for s in out.splitlines() if "met at round" in s)
    assert int(line.rsplit(" ", 1)[1]) <= 16


def test_run_unknown_protocol(capsys):
    code, _, err = cli(capsys, "run", "teleport", "--gen", "path:2", "--agents", "0:1")
    assert code == 2 and "unknown protocol" in err


def test_budget_exhaustion_is_reported_not_an_error(capsys):
    code, out, _ = cli(capsys, "run", "dovetail-treesize", "--gen", "path:3", "--agents", "0:1",
                       "--input", "3", "--budget", "5", "--json")
    data = json.loads(out)
    assert code == 0 and data["exhausted"] and data["decisions"] == {"1": "undecided"}


def test_simulation_fault_exits_nonzero(capsys, monkeypatch):
    def bad(agent):
        yield Move(7)

    monkeypatch.setitem(REGISTRY, "bad", ProtocolEntry("bad", lambda a, c: bad))
    code, _, err = cli(capsys, "run", "bad", "--gen", "path:2", "--agents", "0:1")
    assert code == 2 and "simulation fault" in err


def test_trace_file(capsys, tmp_path):
    trace = tmp_path / "t.jsonl"
    code, _, _ = cli(capsys, "run", "verify-leaf", "--gen", "path:3", "--agents", "1:4",
                     "--cert", "1", "--trace", str(trace))
    rows = [json.loads(x) for x in trace.read_text().splitlines()]
    assert code == 0 and rows[0]["agents"][0] == {"id": 4, "node": 1, "action": rows[0]["agents"][0]["action"]}


def test_config_file_and_per_agent_inputs(capsys, tmp_path):
    (tmp_path / "g.txt").write_text(serialize_graph(path(3)))
    cfg = tmp_path / "c.txt"
    cfg.write_text("config\nuse g.txt\nagent 0 1 3\nagent 2 2 3\n")
    code, out, _ = cli(capsys, "run", "treesize", "--config", str(cfg), "--json")
    assert code == 0 and json.loads(out)["decisions"] == {"1": "yes", "2": "yes"}
    code, out, _ = cli(capsys, "run", "treesize", "--gen", "path:3", "--agents", "0:1:4,2:2:4", "--json")
    assert json.loads(out)["decisions"] == {"1": "no", "2": "no"}
    code, _, err = cli(capsys, "run", "treesize", "--config", str(cfg), "--gen", "path:3")
    assert code == 2


def test_oracle_protocols_get_their_oracle(capsys):
    code, out, _ = cli(capsys, "run", "cycle-cosun", "--gen", "cycle:5", "--agents", "0:1", "--input", "1", "--json")
    data = json.loads(out)
    assert code == 0 and data["decisions"] == {"1": "yes"} and data["oracle_calls"] >= 1
    code, out, _ = cli(capsys, "run", "reduce:tree", "--gen", "star:4", "--agents", "0:1,1:2", "--json")
    assert json.loads(out)["decisions"] == {"1": "yes", "2": "yes"}


def test_problems_list_and_eval(capsys, tmp_path):
    code, out, _ = cli(capsys, "problems", "list", "--json")
    names = [p["name"] for p in json.loads(out)["problems"]]
    assert code == 0 and "omega" in names and names == sorted(names)
    (tmp_path / "c.txt").write_text("config\n" + serialize_graph(path(4)) + "agent 0 1 -\n")
    assert cli(capsys, "problems", "eval", "tree", str(tmp_path / "c.txt"))[1].strip() == "yes"
    assert cli(capsys, "problems", "eval", "#nodes", str(tmp_path / "c.txt"), "5")[1].strip() == "no"
    assert cli(capsys, "problems", "eval", "planar", str(tmp_path / "c.txt"))[0] == 2


def test_enumerate(capsys):
    assert cli(capsys, "enumerate", "3", "--count")[1].strip() == "3"
    code, out, _ = cli(capsys, "enumerate", "2")
    assert parse_graph(out) == graph_from_gen("path:2")
    assert cli(capsys, "enumerate", "5")[0] == 2


def test_suite_command(capsys):
    code, out, _ = cli(capsys, "suite", "closure", "--json")
    first = json.loads(out)
    assert code == 0 and first["passed"]
    assert {"name", "passed", "cases", "detail", "counterexample", "informational"} == set(first["checks"][0])
    assert json.loads(cli(capsys, "suite", "closure", "--json")[1]) == first
    assert cli(capsys, "suite", "nonsense")[0] == 2
    assert cli(capsys, "suite", "closure", "--ids", "1,2")[0] == 2


def test_witness_search_writes_the_pair(capsys, tmp_path):
    out_file = tmp_path / "w.txt"
    code, _, _ = cli(capsys, "witness-search", "--max-n", "6", "--out", str(out_file))
    assert code == 0 and out_file.read_text() == (GOLDEN / "witness.txt").read_text()
    assert cli(capsys, "witness-search", "--max-n", "4")[0] == 1


def test_default_budget():
    c = InitialConfiguration(path(3), (0, 1), (1, 5), ("", ""))
    assert default_budget(c, None) == 4 * 6 * 27 + 1000
    assert default_budget(c, "4") == 4 * 6 * 256 + 1000
    assert default_budget(c, "abc") == 4 * 6 * 27 + 1000


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "mobile_agents.cli", "enumerate", "3", "--count"],
                          capture_output=True, text=True)
    assert done.returncode == 0 and done.stdout.strip() == "3"
