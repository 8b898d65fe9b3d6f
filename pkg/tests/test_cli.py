from __future__ import annotations

import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from mergewidth.cli import run

FIXTURES = Path(__file__).parent / "fixtures"


def call(capsys, argv, stdin: str | None = None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def cograph3(tmp_path, capsys):
    code, out, _ = call(capsys, ["generate", "cograph", "3"])
    assert code == 0
    path = tmp_path / "c3.json"
    path.write_text(out)
    return path


def test_generate_then_width(cograph3, capsys):
    for variant in ("mw", "tmw", "pmw"):
        code, out, _ = call(capsys, ["width", str(cograph3), "--variant", variant, "--r", "1", "--exact-cap", "8"])
        assert code == 0
        report = json.loads(out)
        assert report["value"] == 1 and report["mode"] == "EXACT"
    code, out, _ = call(capsys, ["width", str(cograph3), "--variant", "mw", "--radius", "inf"])
    assert json.loads(out)["radius"] == "inf" and json.loads(out)["value"] == 1


def test_pipeline_through_a_real_pipe():
    gen = subprocess.run([sys.executable, "-m", "mergewidth", "generate", "cograph", "3"], capture_output=True, text=True, check=True)
    width = subprocess.run(
        [sys.executable, "-m", "mergewidth", "width", "--variant", "mw", "--r", "1"],
        input=gen.stdout,
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(width.stdout)["value"] == 1


def test_outputs_are_byte_identical(cograph3, capsys):
    argv = ["approx", str(cograph3), "--r", "1"]
    first = call(capsys, argv)[1]
    second = call(capsys, argv)[1]
    assert first == second
    for cmd in (["label", str(cograph3)], ["quotient", str(cograph3)], ["generate", "gnp", "8", "0.4", "5"]):
        assert call(capsys, cmd)[1] == call(capsys, cmd)[1]


def test_verify_accepts_and_rejects(cograph3, tmp_path, capsys):
    code, out, _ = call(capsys, ["verify", str(cograph3)])
    assert code == 0 and json.loads(out)["valid"]
    data = json.loads(cograph3.read_text())
    merge = next(c for c in data["certificates"] if c["kind"] == "merge")
    # drop every resolved pair from the last step
    merge["steps"][-1]["resolved"] = []
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out, err = call(capsys, ["verify", str(bad)])
    assert code == 1
    assert not json.loads(out)["valid"]
    assert "monotonicity" in err
    code, _, err = call(capsys, ["width", str(bad), "--variant", "mw"])
    assert code == 1 and "verify" in err


def test_hash_binds_certificate_to_graph(cograph3, tmp_path, capsys):
    data = json.loads(cograph3.read_text())
    data["graph"]["edges"] = data["graph"]["edges"][1:]
    bad = tmp_path / "moved.json"
    bad.write_text(json.dumps(data))
    code, _, err = call(capsys, ["verify", str(bad)])
    assert code == 2 and "hash" in err


@pytest.mark.parametrize("r", [1, 2])
def test_oracle_matches_frozen_fixture(r, capsys):
    code, out, _ = call(capsys, ["oracle", "--n", "4", "--r", str(r)])
    assert code == 0
    assert json.loads(out) == json.loads((FIXTURES / f"oracle_n4_r{r}.json").read_text())


def test_oracle_budget_is_reported(capsys):
    code, _, err = call(capsys, ["oracle", "--n", "6"])
    assert code == 3
    assert "oracle_n" in json.loads(err)["cap"]


def test_edge_list_and_graph6_inputs(tmp_path, capsys, monkeypatch):
    edges = tmp_path / "p4.txt"
    edges.write_text("4 3\n0 1\n1 2\n2 3\n")
    code, out, _ = call(capsys, ["width", str(edges), "--variant", "mw", "--r", "1"])
    assert code == 0 and json.loads(out)["value"] == 2 and json.loads(out)["details"]["of"] == "oracle"
    code, out, _ = call(capsys, ["width", "-", "--format", "graph6", "--variant", "pmw"], "Ch\n", monkeypatch)
    assert code == 0 and json.loads(out)["value"] == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1\n0 7\n")
    code, _, err = call(capsys, ["width", str(bad)])
    assert code == 2 and err


def test_convert_label_query(cograph3, tmp_path, capsys):
    code, out, _ = call(capsys, ["convert", str(cograph3), "--to", "merge"])
    assert code == 0
    merged = tmp_path / "merge.json"
    merged.write_text(out)
    assert call(capsys, ["verify", str(merged)])[0] == 0
    code, out, _ = call(capsys, ["convert", str(cograph3), "--to", "order"])
    assert code == 0 and json.loads(out)["certificates"][0]["kind"] == "order"
    code, out, _ = call(capsys, ["label", str(cograph3)])
    labels = tmp_path / "labels.json"
    labels.write_text(out)
    # leaves 0 and 1 of the depth-3 tree meet at depth 2, so they are non-adjacent
    assert json.loads(call(capsys, ["query", str(labels), "0", "1"])[1])["adjacent"] is False
    assert json.loads(call(capsys, ["query", str(labels), "0", "2"])[1])["adjacent"] is True
    assert call(capsys, ["query", str(labels), "0", "99"])[0] == 2


def test_quotient_and_cover_commands(cograph3, capsys):
    code, out, _ = call(capsys, ["cover", str(cograph3)])
    assert code == 0 and json.loads(out)["report"]["ok"]
    code, out, _ = call(capsys, ["quotient", str(cograph3), "--twin-width"])
    assert code == 2  # the cograph chain skips steps, so it is not a contraction sequence


def test_config_file_and_env(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"oracle_n": 3}))
    monkeypatch.setenv("MERGEWIDTH_CONFIG", str(cfg))
    code, _, _ = call(capsys, ["oracle", "--n", "4"])
    assert code == 3
    cfg.write_text(json.dumps({"no_such_key": 1}))
    assert call(capsys, ["oracle", "--n", "2"])[0] == 2


def test_bench_reports_timings(capsys):
    code, out, _ = call(capsys, ["bench", "--sizes", "5", "6"])
    assert code == 0
    tasks = {(t["task"], t["n"]) for t in json.loads(out)["timings"]}
    assert tasks == {("approx", 5), ("approx", 6), ("flip_balls", 5), ("flip_balls", 6)}
