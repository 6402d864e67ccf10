"""End-to-end checks of every CLI verb, exit codes included."""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from flowrec.cli import main

from conftest import GOLDEN, PROJECTS, cursor_at_end

STORE_SNIPPET = """\
from models import ItemStore

def refill(names):
    store = ItemStore()
    for name in names:
        store.
"""


@pytest.fixture(scope="module")
def alpha_dir() -> str:
    return str(PROJECTS / "alpha")


@pytest.fixture(scope="module")
def bundle_path(tmp_path_factory, alpha_dir) -> str:
    out = str(tmp_path_factory.mktemp("bundle") / "alpha.bundle.json")
    code = main(
        ["train", alpha_dir, "-o", out, "--trees", "20", "--depth", "8", "--seed", "7"]
    )
    assert code == 0
    return out


@pytest.fixture(scope="module")
def snippet_path(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("src") / "snippet.py"
    path.write_text(STORE_SNIPPET)
    return str(path)


class TestTrain:
    def test_summary_and_bundle_file(self, tmp_path, capsys):
        out = str(tmp_path / "fresh.bundle.json")
        code = main(
            ["train", str(PROJECTS / "alpha"), "-o", out, "--trees", "10", "--depth", "6"]
        )
        captured = capsys.readouterr()
        assert code == 0
        summary = json.loads(captured.out)
        assert summary["bundle"] == out
        assert summary["files"] == len(list((PROJECTS / "alpha").glob("*.py")))
        assert summary["training_rows"] > 0
        assert summary["vocabulary"] > 0
        assert summary["apis"] > 0
        assert Path(out).exists()

    def test_empty_corpus_exits_1(self, tmp_path, capsys):
        code = main(["train", str(tmp_path), "-o", str(tmp_path / "b.json")])
        captured = capsys.readouterr()
        assert code == 1
        assert captured.err.startswith("error [")


class TestRecommend:
    def test_human_lines(self, bundle_path, snippet_path, capsys):
        line, col = cursor_at_end(STORE_SNIPPET)
        code = main(
            [
                "recommend",
                "--bundle", bundle_path,
                "--file", snippet_path,
                "--line", str(line),
                "--col", str(col),
                "-k", "5",
            ]
        )
        captured = capsys.readouterr()
        assert code == 0
        lines = captured.out.splitlines()
        assert 0 < len(lines) <= 5
        assert lines[0].lstrip().startswith("1. ")
        names = [ln.split(".", 1)[1].split()[0] for ln in lines]
        assert "add_item" in names

    def test_json_output(self, bundle_path, snippet_path, capsys):
        line, col = cursor_at_end(STORE_SNIPPET)
        code = main(
            [
                "recommend",
                "--bundle", bundle_path,
                "--file", snippet_path,
                "--line", str(line),
                "--col", str(col),
                "--json",
            ]
        )
        captured = capsys.readouterr()
        assert code == 0
        result = json.loads(captured.out)
        assert result["receiver"] == "store"
        assert result["recommendations"]
        assert result["recommendations"][0]["rank"] == 1

    def test_not_a_dot_exits_1(self, bundle_path, snippet_path, capsys):
        code = main(
            [
                "recommend",
                "--bundle", bundle_path,
                "--file", snippet_path,
                "--line", "1",
                "--col", "0",
            ]
        )
        captured = capsys.readouterr()
        assert code == 1
        assert captured.err.startswith("error [frontend]:")

    def test_missing_bundle_exits_1(self, snippet_path, tmp_path, capsys):
        code = main(
            [
                "recommend",
                "--bundle", str(tmp_path / "nope.json"),
                "--file", snippet_path,
                "--line", "6",
                "--col", "14",
            ]
        )
        captured = capsys.readouterr()
        assert code == 1
        assert captured.err.startswith("error [")


class TestEvaluate:
    def test_two_fold_report(self, alpha_dir, capsys):
        code = main(["evaluate", alpha_dir, "--folds", "2", "--seed", "1"])
        captured = capsys.readouterr()
        assert code == 0
        report = json.loads(captured.out)
        assert report["folds"] == 2
        assert len(report["per_fold"]) == 2
        overall = report["overall"]
        assert isinstance(overall["queries"], int) and overall["queries"] > 0
        assert "10" in overall["topk"]
        assert set(overall["baselines"]) == {"alphabetical", "frequency"}

    def test_queries_flag_includes_records(self, capsys):
        files = [str(PROJECTS / "alpha" / n) for n in ("models.py", "restock.py")]
        code = main(["evaluate", *files, "--folds", "2", "--queries"])
        captured = capsys.readouterr()
        assert code == 0
        report = json.loads(captured.out)
        records = report["overall"]["queries"]
        assert isinstance(records, list) and records
        assert {"file", "line", "col", "truth", "rank"} <= set(records[0])


class TestDataflowDump:
    def test_whole_file(self, capsys):
        code = main(["dataflow", "dump", "--file", str(GOLDEN / "g01_wordindex.py")])
        captured = capsys.readouterr()
        assert code == 0
        edges = json.loads(captured.out)
        assert edges
        assert all({"src", "dst", "line", "rule"} == set(e) for e in edges)

    def test_point_restricts_to_prefix(self, tmp_path, capsys):
        src = "a = open(p)\nb = a.\nc = b.\n"
        path = tmp_path / "prefix.py"
        path.write_text(src)
        code = main(["dataflow", "dump", "--file", str(path), "--point", "2:5"])
        captured = capsys.readouterr()
        assert code == 0
        edges = json.loads(captured.out)
        names = {e["src"] for e in edges} | {e["dst"] for e in edges}
        assert "c" not in names
        assert "__HOLE__" in names

    def test_syntax_error_exits_1(self, tmp_path, capsys):
        path = tmp_path / "broken.py"
        path.write_text("def broken(:::\n")
        code = main(["dataflow", "dump", "--file", str(path)])
        captured = capsys.readouterr()
        assert code == 1
        assert captured.err.startswith("error [frontend]:")


class TestDataflowScore:
    def test_jsonl_labels_perfect_agreement(self, capsys):
        code = main(
            [
                "dataflow", "score",
                "--file", str(GOLDEN / "g01_wordindex.py"),
                "--labels", str(GOLDEN / "g01_wordindex.edges.jsonl"),
            ]
        )
        captured = capsys.readouterr()
        assert code == 0
        result = json.loads(captured.out)
        assert result["precision"] == 1.0
        assert result["recall"] == 1.0
        assert result["fp"] == 0 and result["fn"] == 0

    # tiny.py extracts exactly {(make,x), (x,load), (x,y), (load,y)}
    TINY = "x = make()\ny = x.load()\n"

    def test_json_array_labels(self, tmp_path, capsys):
        src_path = tmp_path / "tiny.py"
        src_path.write_text(self.TINY)
        labels = tmp_path / "tiny.edges.json"
        labels.write_text(json.dumps([{"src": "x", "dst": "y"}]))
        code = main(
            ["dataflow", "score", "--file", str(src_path), "--labels", str(labels)]
        )
        captured = capsys.readouterr()
        assert code == 0
        result = json.loads(captured.out)
        assert result["tp"] == 1
        assert result["recall"] == 1.0

    def test_partial_overlap_scores_between(self, tmp_path, capsys):
        src_path = tmp_path / "tiny.py"
        src_path.write_text(self.TINY)
        labels = tmp_path / "labels.jsonl"
        labels.write_text(
            '{"src": "x", "dst": "y"}\n{"src": "ghost", "dst": "y"}\n'
        )
        code = main(
            ["dataflow", "score", "--file", str(src_path), "--labels", str(labels)]
        )
        captured = capsys.readouterr()
        assert code == 0
        result = json.loads(captured.out)
        assert result["tp"] == 1
        assert result["fp"] == 3
        assert result["fn"] == 1
        assert result["precision"] == 0.25
        assert result["recall"] == 0.5


class TestAblate:
    def test_report_covers_all_features(self, capsys):
        files = [
            str(PROJECTS / "alpha" / n)
            for n in ("models.py", "restock.py", "reports.py", "pricing.py")
        ]
        code = main(["ablate", *files, "--seeds", "0", "--test-fraction", "0.25"])
        captured = capsys.readouterr()
        assert code == 0
        report = json.loads(captured.out)
        assert set(report["deltas"]) == {
            "flow_ngram", "token_similarity", "object_cooccur", "context_cooccur"
        }
        assert report["seeds"] == [0]


class TestUsageErrors:
    def test_no_arguments_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_verb_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["summon"])
        assert exc.value.code == 2

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "flowrec", "--version"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "flowrec" in proc.stdout
