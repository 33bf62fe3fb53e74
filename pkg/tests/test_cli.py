import json

import numpy as np
import pytest

from cdgraph import cli, verifier
from cdgraph.classes import conjugacy_classes
from cdgraph.constructors import cyclic, frobenius_metacyclic, serialize_spec, symmetric
from cdgraph.graph import build_graph

F42 = serialize_spec(frobenius_metacyclic(7, 6))


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- group -----------------------------------------------------------------


def test_group_text_and_json(capsys):
    code, out, _ = run(capsys, "group", serialize_spec(cyclic(6)))
    assert code == 0 and "order: 6" in out and "classes: 6" in out
    code, out, _ = run(capsys, "group", "ex31a", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["order"] == 5250 and doc["center_order"] == 5
    code, out, _ = run(capsys, "group", serialize_spec(symmetric(4)), "--json")
    assert sorted(r["size"] for r in json.loads(out)["classes"]) == [1, 3, 6, 6, 8]


def test_group_from_file(tmp_path, capsys):
    path = tmp_path / "spec.json"
    path.write_text(F42)
    code, out, _ = run(capsys, "group", str(path))
    assert code == 0 and "order: 42" in out


@pytest.mark.parametrize("argv", [
    ["group", '{"kind": "cyclic", "n": 6'],
    ["group", '{"kind":"cyclic","n":0}'],
    ["group", "no-such-file.json"],
    ["group", '{"kind":"symmetric","n":9}'],
    ["graph", F42],
    ["graph", F42, "--prime", "4"],
    ["graph", F42, "--prime", "2", "--ordinary"],
    ["verify", F42, "--suite", "bogus", "--prime", "2"],
    ["verify", F42, "--prime", "2", "--budget", "0"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_parse_error_names_position(capsys):
    code, _, err = run(capsys, "group", '{"kind": "cyclic", "n": 6')
    assert code == 2 and "parse error" in err and "position 25" in err


# -- graph -----------------------------------------------------------------


def test_graph_summaries(capsys):
    code, out, _ = run(capsys, "graph", F42, "--ordinary")
    assert code == 0 and out.rstrip().endswith("2 components, diameter inf")
    code, out, _ = run(capsys, "graph", "ex31a", "--prime", "2")
    assert code == 0 and out.rstrip().endswith("diameter 3")
    code, out, _ = run(capsys, "graph", serialize_spec(cyclic(14)), "--prime", "7")
    assert code == 0 and out.rstrip().endswith("diameter null")
    assert "0 vertices" in out


def test_graph_writes_files(tmp_path, capsys):
    dot, js = tmp_path / "g.dot", tmp_path / "g.json"
    code, _, _ = run(capsys, "graph", "F7_6", "--prime", "2", "--dot", str(dot), "--json", str(js))
    assert code == 0
    assert dot.read_text().startswith('graph "F7_6" {')
    assert json.loads(js.read_text())["diameter"] == "inf"


# -- verify ----------------------------------------------------------------


def test_verify_first_example(capsys):
    code, out, err = run(capsys, "verify", "ex31a", "--prime", "2", "--suite", "all")
    doc = json.loads(out)
    assert code == 0
    assert len(doc["verdicts"]) == 7 and len(doc["conjecture"]) == 1
    thm_b = next(v for v in doc["verdicts"] if v["check_id"] == "THM-B")
    assert thm_b["conclusion"] == "holds"
    assert "7 verdicts: " in err and "0 fails" in err


def test_verify_second_example(capsys):
    code, out, _ = run(capsys, "verify", "ex31b", "--prime", "3", "--suite", "thmB", "--no-timing")
    [v] = json.loads(out)["verdicts"]
    assert code == 0
    assert v["hypothesis"] == "fails" and v["conclusion"] == "not-applicable"
    assert v["witnesses"]["p_nilpotent"] is False
    assert "elapsed_ms" not in v


def test_verify_all_primes(capsys):
    code, out, _ = run(capsys, "verify", "S4", "--all-primes", "--suite", "thmA,corDiam")
    doc = json.loads(out)
    assert code == 0 and [(v["check_id"], v["prime"]) for v in doc["verdicts"]] == [
        ("THM-A", 2), ("COR-DIAM", 2), ("THM-A", 3), ("COR-DIAM", 3)]


def test_verify_with_corrupted_class_data_exits_1(monkeypatch, capsys):
    real = verifier._graph

    def corrupted(G, p):
        g = real(G, p)
        if p is None:
            return g
        g = build_graph(conjugacy_classes(G), p)
        n = len(g)
        idx = np.arange(n)
        g.dist = np.abs(idx[:, None] - idx[None, :]).astype(float)
        return g

    monkeypatch.setattr(verifier, "_graph", corrupted)
    code, out, err = run(capsys, "verify", "ex31a", "--prime", "2", "--suite", "corDiam")
    [v] = json.loads(out)["verdicts"]
    assert code == 1
    assert v["conclusion"] == "fails"
    assert v["witnesses"]["counterexample"]["distance"] > 3
    assert "1 fails" in err


# -- scan ------------------------------------------------------------------


def _corpus(tmp_path, entries):
    path = tmp_path / "corpus.jsonl"
    path.write_text("".join(json.dumps({"name": n, "spec": json.loads(s)}) + "\n" for n, s in entries))
    return path


def test_empty_corpus(tmp_path, capsys):
    corpus = tmp_path / "empty.jsonl"
    corpus.write_text("\n")
    out = tmp_path / "out.jsonl"
    code, stdout, _ = run(capsys, "scan", "--corpus", str(corpus), "--out", str(out))
    assert code == 0 and out.read_text() == ""
    assert stdout.splitlines()[0] == "0 records"


def test_scan_records(tmp_path, capsys):
    corpus = _corpus(tmp_path, [("f42", F42), ("s4", serialize_spec(symmetric(4)))])
    out = tmp_path / "out.jsonl"
    code, stdout, _ = run(capsys, "scan", "--corpus", str(corpus), "--out", str(out))
    records = [json.loads(line) for line in out.read_text().splitlines()]
    assert code == 0
    assert [(r["group"], r["prime"]) for r in records] == [("f42", 2), ("f42", 3), ("f42", 7), ("s4", 2), ("s4", 3)]
    f2 = records[0]
    assert f2["disconnected"] and f2["diameter"] == "inf" and f2["sizes"] == [6, 7, 7]
    assert f2["verdicts"]["DISC-ORD"] == "holds" and f2["failures"] == []
    assert f2["conjecture"] == {"CONJ-C": "holds"}
    assert "theorem check fails: 0" in stdout and "conjecture C fails: 0" in stdout


def test_scan_is_deterministic_across_jobs(tmp_path, capsys):
    names = ["S4", "F7_6", "A4", "S3xD10", "D8xF21", "ex31b"]
    from cdgraph.constructors import builtin_corpus
    specs = dict(builtin_corpus())
    corpus = _corpus(tmp_path, [(n, serialize_spec(specs[n])) for n in reversed(names)])
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert run(capsys, "scan", "--corpus", str(corpus), "--out", str(a), "--jobs", "1")[0] == 0
    assert run(capsys, "scan", "--corpus", str(corpus), "--out", str(b), "--jobs", "3")[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_scan_failure_leaves_no_output(tmp_path, capsys):
    corpus = _corpus(tmp_path, [("a", F42), ("z", serialize_spec(symmetric(9)))])
    out = tmp_path / "out.jsonl"
    code, _, err = run(capsys, "scan", "--corpus", str(corpus), "--out", str(out))
    assert code == 2 and "error" in err
    assert not out.exists()
    assert list(tmp_path.glob(".cdgraph-*")) == []


def test_write_failure_removes_temp_file(tmp_path, monkeypatch, capsys):
    corpus = _corpus(tmp_path, [("f42", F42)])
    out = tmp_path / "out.jsonl"

    def boom(src, dst):
        raise OSError(28, "No space left on device")

    monkeypatch.setattr(cli.os, "replace", boom)
    code, _, err = run(capsys, "scan", "--corpus", str(corpus), "--out", str(out))
    assert code == 2 and "No space left" in err
    assert not out.exists() and list(tmp_path.glob(".cdgraph-*")) == []


@pytest.mark.parametrize("text", ['{"name": "x"}\n', "not json\n",
                                  '{"name":"a","spec":{"kind":"cyclic","n":2}}\n' * 2])
def test_bad_corpus_lines(tmp_path, capsys, text):
    corpus = tmp_path / "bad.jsonl"
    corpus.write_text(text)
    code, _, err = run(capsys, "scan", "--corpus", str(corpus))
    assert code == 2 and err.startswith("error:")


def test_scan_records_revalidate(tmp_path, capsys):
    """Each record re-parses and matches a fresh computation."""
    corpus = _corpus(tmp_path, [("f42", F42)])
    out = tmp_path / "out.jsonl"
    run(capsys, "scan", "--corpus", str(corpus), "--out", str(out))
    for line in out.read_text().splitlines():
        rec = json.loads(line)
        fresh = cli.scan_group(rec["group"], rec["spec"])
        assert [r for r in fresh if r["prime"] == rec["prime"]] == [rec]
