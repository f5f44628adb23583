import csv
import io
import json
import subprocess
import sys

import pytest

from zerofree.cli import graph_from_json, graph_to_json, load_graph, parse_sweep, run
from zerofree.errors import ConfigError
from zerofree.models import build_hardcore, build_proper_coloring, cycle, path

K3 = ["--builder", "complete", "--params", "n=3"]


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_exact_triangle(capsys):
    code, out, _ = call(capsys, "exact", *K3, "--model", "hardcore:lambda=1")
    assert code == 0 and json.loads(out)["Z"] == "4/1"


def test_exact_marginal(capsys):
    code, out, _ = call(capsys, "exact", "--builder", "path", "--params", "n=2",
                        "--model", "hardcore:lambda=1", "--S", "0", "--sigma", "2")
    assert code == 0 and json.loads(out)["mu"] == "1/3"


def test_poly_cycle(capsys):
    code, out, _ = call(capsys, "poly", "--builder", "cycle", "--params", "n=4", "--model", "hardcore:lambda=1")
    doc = json.loads(out)
    assert code == 0 and doc["kind"] == "type1" and doc["coefficients"] == ["1/1", "4/1", "2/1"]


def test_poly_type2_edge(capsys):
    code, out, _ = call(capsys, "poly", "--builder", "path", "--params", "n=2",
                        "--model", "coloring:K=2", "--kind", "type2")
    assert json.loads(out)["coefficients"] == ["4/1", "-2/1"]


def test_taylor_csv(capsys):
    code, out, _ = call(capsys, "taylor", "--builder", "path", "--params", "n=2",
                        "--model", "hardcore:lambda=1", "--kind", "type2", "--m", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["k", "power_sum", "taylor_coeff"] and len(rows) == 3


def test_pseudo(capsys):
    code, out, _ = call(capsys, "pseudo", "--builder", "path", "--params", "n=1",
                        "--model", "hardcore:lambda=1/2", "--S", "0", "--sigma", "2", "--m", "20")
    assert code == 0 and json.loads(out)["value"].startswith("0.33333")


def test_theorem1_exit_codes(capsys):
    base = ["theorem1", "--builder", "path", "--params", "n=7", "--model", "hardcore:lambda=1",
            "--S", "0", "--sigma", "2", "--m", "3"]
    code, out, _ = call(capsys, *base, "--R", "5")
    assert code == 0 and json.loads(out)["holds"]
    code, out, err = call(capsys, *base, "--R", "3")
    assert code == 1 and err.startswith("error=assertion message=")
    assert json.loads(out)["witness"]["lhs"] == "-17/3"


def test_ssm_scan_csv(capsys):
    code, out, _ = call(capsys, "ssm-scan", "--builder", "path", "--params", "n=9",
                        "--model", "hardcore:lambda=1", "--S", "4", "--R", "1,4", "--m", "1",
                        "--kind", "type1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["rho"] for r in rows] == ["1/2", "19/442"]
    assert rows[1]["pseudo_gap_exact_zero"] == "true"


def test_ssm_scan_sweep(capsys):
    code, out, _ = call(capsys, "ssm-scan", "--builder", "path", "--params", "n=5",
                        "--model", "hardcore:lambda=1", "--S", "0", "--R", "2",
                        "--sweep", "lambda=1/2:3/2:1/2", "--m", "0")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["value"] for r in rows] == ["1/2", "1/1", "3/2"]


def test_accuracy(capsys):
    code, out, _ = call(capsys, "accuracy", "--builder", "path", "--params", "n=4",
                        "--model", "coloring:K=5", "--kind", "type2", "--m", "3")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["m"] for r in rows] == ["0", "1", "2", "3"]


def test_subgraph(capsys):
    code, out, _ = call(capsys, "subgraph", *K3, "--pattern", "2:0-1")
    assert json.loads(out)["ind"] == 3
    code, out, _ = call(capsys, "subgraph", "--builder", "cycle", "--params", "n=4", "--size-max", "3")
    assert json.loads(out)["connected_total"] == 12
    code, out, _ = call(capsys, "subgraph", "--beta-k", "2", "--lambda", "1")
    doc = json.loads(out)["beta"]
    assert code == 0 and doc["disconnected_nonzero"] == [] and sorted(doc["entries"].values()) == ["0/1", "1/1", "2/1"]


def test_selftest(capsys):
    code, out, _ = call(capsys, "selftest")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] == doc["total"]


@pytest.mark.parametrize("argv", [
    ["exact"],                                                 # no graph
    ["exact", *K3, "--model", "nosuch"],
    ["exact", *K3, "--model", "hardcore:lambda=1", "--S", "0", "--sigma", "3"],
    ["exact", *K3, "--model", "hardcore:lambda=x"],
    ["poly", *K3, "--model", "coloring:K=3", "--kind", "type1"],
    ["accuracy", *K3, "--model", "coloring:K=2", "--kind", "type2"],   # Z = 0
    ["ssm-scan", *K3, "--model", "hardcore:lambda=1", "--S", "0"],
])
def test_config_errors(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2
    assert err.startswith("error=config message=") and err.count("\n") == 1


def test_budget_error(capsys):
    code, _, err = call(capsys, "exact", "--builder", "path", "--params", "n=12",
                        "--model", "coloring:K=3", "--budget", "1000")
    assert code == 3 and err.startswith("error=budget")


def test_output_is_deterministic(tmp_path):
    argv = ["theorem1", "--builder", "grid", "--params", "w=3,h=3", "--model", "hardcore:lambda=1",
            "--S", "4", "--sigma", "2", "--R", "1", "--m", "1", "--tau-budget", "4", "--samples", "6",
            "--seed", "11"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(argv + ["--out", str(a)])
    run(argv + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_graph_file_round_trip(tmp_path, capsys):
    g = build_proper_coloring(cycle(5), 3)
    doc = graph_to_json(g)
    assert graph_from_json(doc) == g
    f = tmp_path / "g.json"
    f.write_text(json.dumps(doc))
    assert load_graph(str(f)) == g
    code, out, _ = call(capsys, "exact", "--graph", str(f))
    assert json.loads(out)["Z"] == "30/1"


def test_graph_file_edge_orientation():
    doc = graph_to_json(build_hardcore(path(2), 1), ids=["b", "a"])
    assert doc["edges"][0]["u"] == "a"
    swapped = dict(doc, edges=[dict(doc["edges"][0], u="b", v="a")])
    with pytest.raises(ConfigError):
        graph_from_json(swapped)


def test_parse_sweep_inclusive():
    assert parse_sweep("lambda=1:2:1/2")[1] == [1, 1.5, 2]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "zerofree", "exact", *K3, "--model", "hardcore:lambda=1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["Z"] == "4/1"
