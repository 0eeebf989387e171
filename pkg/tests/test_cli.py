import json
import subprocess
import sys
import time
from pathlib import Path

import networkx as nx
import pytest

from pubcomm.cli import main
from pubcomm.config import load_config
from pubcomm.graph import Network
from pubcomm.pipeline import PIPELINE, report_from_counts
from pubcomm.report import NOT_COMPUTED, SummaryReport, fmt_share
from pubcomm.workspace import StageError, Workspace, network_from_json, network_to_json

FIXTURES = Path(__file__).parent / "fixtures"


def _tree(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(Path(root).rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def toy_ws(tmp_path_factory, toy_path):
    ws = tmp_path_factory.mktemp("toy") / "ws"
    assert main(["run", "-w", str(ws), "--input", toy_path, "--trials", "5"]) == 0
    return ws


# --- report -----------------------------------------------------------------

def test_report_fixture_lines(capsys):
    assert main(["report", "--counts", str(FIXTURES / "tables.json")]) == 0
    out = capsys.readouterr().out
    for text in ("6,645 (72.9%)", "33,203 (81.4%)", "532 (47.0%)", "48 (9.0%)", "477 (22.9%)",
                 "18,664", "19.7 (11)", "27.5 (13)"):
        assert text in out


def test_report_recomputes_shares():
    # 2086 / 4270 = 0.48852 rounds to 48.9%
    assert fmt_share(2086, 4270) == "2,086 (48.9%)"
    assert fmt_share(6645, 9116) == "6,645 (72.9%)"
    assert fmt_share(3, 0) == "3 (N.A.)"


def test_report_not_computed():
    text = report_from_counts(json.dumps({"publications": 200, "authors": 113}))
    lines = dict(line.split("\t", 1) for line in text.splitlines() if "\t" in line and not line.startswith("\t"))
    assert lines["# of publications"] == "200"
    assert lines["# of clusters"] == NOT_COMPUTED
    assert lines["# of nodes in giant (proportion)"] == NOT_COMPUTED
    assert lines["Average cluster size in giant (median)"] == NOT_COMPUTED
    rep = SummaryReport.from_counts({"giant_cluster_sizes": [1, 2, 30]})
    assert dict(rep.lines())["Average cluster size in giant (median)"] == ["11.0 (2)"]


# --- config -----------------------------------------------------------------

def test_config_defaults_and_validation(capsys, tmp_path):
    assert main(["config", "--defaults"]) == 0
    text = capsys.readouterr().out
    assert "[run]" in text and "min_pubs = 2" in text
    assert load_config(text=text).as_dict() == load_config().as_dict()
    with pytest.raises(ValueError):
        load_config(text="[nope]\nx = 1\n")
    with pytest.raises(ValueError):
        load_config(text="[run]\nbogus = 1\n")
    bad = tmp_path / "bad.ini"
    bad.write_text("[run]\nbogus = 1\n")
    assert main(["ingest", "-w", str(tmp_path / "w"), "-c", str(bad)]) == 1
    assert "[config]" in capsys.readouterr().err


# --- workspace --------------------------------------------------------------

def test_network_json_roundtrip():
    net = Network(["a", "b"], {("a", "b"): 2.5}, directed=True, node_attrs={"a": {"geo": "Asia"}},
                  edge_attrs={("a", "b"): {"records": ("r1", "r2")}})
    again = network_from_json(network_to_json(net))
    assert again.edges == net.edges and again.directed
    assert again.edge_attrs[("a", "b")]["records"] == ("r1", "r2")
    assert network_to_json(again) == network_to_json(net)


def test_stage_context_restricts_reads(tmp_path):
    ws = Workspace(tmp_path)
    (tmp_path / "a.txt").write_text("x")
    (tmp_path / "secret.txt").write_text("y")

    def peek(ctx):
        ctx.read_text("secret.txt")

    with pytest.raises(StageError) as err:
        ws.run_stage("s", peek, inputs=["a.txt"])
    assert str(err.value).startswith("[s]")
    with pytest.raises(StageError, match="run `maker` first"):
        ws.run_stage("s", peek, inputs=["missing.txt"], producers={"missing.txt": "maker"})


def test_stage_noop_and_rerun(tmp_path):
    ws = Workspace(tmp_path)
    calls = []

    def stage(ctx):
        calls.append(1)
        ctx.write("out.txt", "hello")

    assert ws.run_stage("s", stage, params={"k": 1})
    assert not ws.run_stage("s", stage, params={"k": 1})
    assert ws.run_stage("s", stage, params={"k": 2})
    (tmp_path / "out.txt").write_text("tampered")
    assert ws.run_stage("s", stage, params={"k": 2})
    assert (tmp_path / "out.txt").read_text() == "hello" and len(calls) == 3


# --- pipeline ---------------------------------------------------------------

def test_toy_pipeline_outputs(toy_ws):
    ws = Workspace(toy_ws)
    assert set(PIPELINE) <= set(ws.manifest["stages"])
    summary = (toy_ws / "summary.txt").read_text()
    assert "# of publications\t200" in summary
    areas = (toy_ws / "areas.csv").read_text().splitlines()
    assert areas[0] == "area_id,record_id" and len(areas) > 100
    assert (toy_ws / "residuals.csv").read_text().startswith("Source areas,a1")


def test_rerun_is_noop(toy_ws, toy_path, capsys):
    before = _tree(toy_ws)
    assert main(["run", "-w", str(toy_ws), "--input", toy_path, "--trials", "5"]) == 0
    assert _tree(toy_ws) == before


def test_byte_identical_workspaces(tmp_path, toy_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for ws in (a, b):
        assert main(["run", "-w", str(ws), "--input", toy_path, "--seed", "7", "--trials", "3"]) == 0
    assert _tree(a) == _tree(b)
    manifest = json.loads((a / "manifest.json").read_text())
    assert "time" not in json.dumps(manifest)


def test_changed_parameter_reruns_downstream(tmp_path, toy_path):
    ws = tmp_path / "ws"
    assert main(["run", "-w", str(ws), "--input", toy_path, "--trials", "3"]) == 0
    cluster = json.loads((ws / "manifest.json").read_text())["stages"]["cluster"]["outputs"]
    assert main(["run", "-w", str(ws), "--input", toy_path, "--trials", "3", "--min-frac", "0.1"]) == 0
    stages = json.loads((ws / "manifest.json").read_text())["stages"]
    assert stages["cluster"]["outputs"] == cluster
    assert stages["topics"]["params"]["min_frac"] == 0.1


def test_too_few_areas_halts_at_affinity(tmp_path, toy_path, capsys):
    ws = tmp_path / "ws"
    assert main(["run", "-w", str(ws), "--input", toy_path, "--trials", "3", "--min-frac", "0.5"]) == 1
    assert "[affinity]" in capsys.readouterr().err
    # the stages before the failure stay in the workspace
    assert (ws / "areas.csv").exists()


def test_missing_input(tmp_path, capsys):
    missing = tmp_path / "nope.wos"
    assert main(["run", "-w", str(tmp_path / "ws"), "--input", str(missing)]) == 1
    err = capsys.readouterr().err
    assert err.startswith("pubcomm: error: [ingest]") and str(missing) in err


def test_stage_out_of_order(tmp_path, capsys):
    assert main(["topics", "-w", str(tmp_path / "ws")]) == 1
    assert "run `" in capsys.readouterr().err


def test_exports(toy_ws, tmp_path, capsys):
    dot = tmp_path / "collab.dot"
    assert main(["export", "collab", "dot", "-o", str(dot), "-w", str(toy_ws)]) == 0
    text = dot.read_text()
    assert text.startswith("graph") and text.rstrip().endswith("}")
    assert text.count("{") == text.count("}")
    gml = tmp_path / "coauthor.graphml"
    assert main(["export", "coauthor", "graphml", "-o", str(gml), "-w", str(toy_ws)]) == 0
    assert nx.read_graphml(gml).number_of_nodes() > 0
    res = tmp_path / "res.csv"
    assert main(["export", "residuals", "csv", "-o", str(res), "-w", str(toy_ws)]) == 0
    assert res.read_bytes() == (toy_ws / "residuals.csv").read_bytes()
    capsys.readouterr()
    assert main(["export", "bogus", "csv", "-o", str(res), "-w", str(toy_ws)]) == 1
    assert "valid:" in capsys.readouterr().err
    assert main(["export", "residuals", "dot", "-o", str(res), "-w", str(toy_ws)]) == 1
    assert "valid: csv" in capsys.readouterr().err


def test_export_missing_stage(tmp_path, toy_path, capsys):
    ws = tmp_path / "ws"
    assert main(["ingest", "-w", str(ws), "--input", toy_path]) == 0
    assert main(["export", "affinity", "dot", "-o", str(tmp_path / "x.dot"), "-w", str(ws)]) == 1
    assert "run stage `affinity` first" in capsys.readouterr().err
    assert main(["export", "affinity", "dot", "-o", str(tmp_path / "x.dot"), "-w", str(tmp_path / "none")]) == 1
    assert not (tmp_path / "none").exists()


def test_delineation_stages(toy_ws, toy_researcher_path):
    assert main(["delineate-precision", "-w", str(toy_ws)]) == 0
    assert "affinity components:" in (toy_ws / "precision.txt").read_text()
    assert main(["delineate-recall", "-w", str(toy_ws), "--researchers", toy_researcher_path]) == 0
    rows = (toy_ws / "recall.csv").read_text().splitlines()
    assert rows[0].startswith("researcher,cluster") and len(rows) >= 3


def test_synth(capsys, tmp_path):
    assert main(["synth", "--n", "64", "--k", "4", "--p-in", "0.4", "--p-out", "0.01", "-o", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "nmi: 1.0000" in out
    assert (tmp_path / "edges.csv").exists() and (tmp_path / "truth.csv").exists()


def test_console_entry_point(tmp_path, toy_path):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "pubcomm.cli", "run", "-w", str(tmp_path / "ws"),
                           "--input", toy_path], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert time.perf_counter() - t0 < 10
    assert "# of nodes in giant (proportion)" in proc.stdout
