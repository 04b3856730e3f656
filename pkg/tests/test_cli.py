from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from cgtlab.cli import run_cli

FAST = ["--iterations", "40", "--burn-in", "25", "--sample-lag", "3",
        "--n-samples", "4"]


def _cli(tmp_path, *args):
    return run_cli(["--project", str(tmp_path / "proj"), *args])


def _dump(tmp_path):
    lines = []
    texts = [
        "booking schedule cancellations tutors",
        "booking schedule empty cancellations",
        "payment rates platform booking fee",
        "payment rates missing tutor pay",
        "rating system student cancellation",
        "ratings technical problems classroom app",
    ]
    for i, t in enumerate(texts):
        lines.append(json.dumps({
            "id": f"p{i}", "subreddit": "r", "author_hash": "h",
            "created_utc": i, "kind": "post", "parent_id": None, "text": t,
        }))
    path = tmp_path / "dump.jsonl"
    path.write_text("\n".join(lines) + "\n")
    return path


def test_ingest_build_train_topics(tmp_path, capsys):
    dump = _dump(tmp_path)
    assert _cli(tmp_path, "ingest", "--input", str(dump)) == 0
    assert _cli(tmp_path, "build", "--min-df", "1", "--max-df-ratio", "1.0") == 0
    assert _cli(tmp_path, "train", "--k", "2", "--seed", "3", *FAST) == 0
    capsys.readouterr()
    assert _cli(tmp_path, "topics", "--run", "lda-0001", "--topic", "0",
                "--n-terms", "3", "--n-docs", "2") == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["terms"]) == 3
    assert len(out["documents"]) == 2


def test_synth_sweep_select(tmp_path, capsys):
    assert _cli(tmp_path, "synth", "--k", "3", "--docs", "50", "--vocab", "30",
                "--doc-len", "15", "--seed", "5") == 0
    assert _cli(tmp_path, "sweep", "--k-min", "2", "--k-max", "4",
                "--seed", "9", *FAST) == 0
    out = capsys.readouterr().out
    assert "K,cao,arun,umass,c_v,status,model_digest" in out
    assert _cli(tmp_path, "select-k", "--run", "sweep-0001") == 0
    assert "recommended K" in capsys.readouterr().out


def test_compare_bundled_fixture_counts(tmp_path, capsys):
    code = _cli(tmp_path, "compare",
                "--labelings", _fixture("labelings_13.json"),
                "--labelings", _fixture("labelings_17.json"))
    assert code == 0
    out = capsys.readouterr().out
    assert "union detected=12 missing=1 novel=1 final=14" in out


def _fixture(name):
    import cgtlab.validation as v

    return str(Path(v.__file__).parent / "fixtures" / name)


def test_ledger_and_qdtm_from_fixtures(tmp_path, capsys):
    assert _cli(tmp_path, "synth", "--k", "3", "--docs", "50", "--vocab", "30",
                "--doc-len", "15", "--seed", "5") == 0
    capsys.readouterr()
    assert _cli(tmp_path, "ledger", "--bundled-fixtures") == 0
    ledger = json.loads(capsys.readouterr().out)
    assert len(ledger["rows"]) == 14
    # queries from a file against the synthetic corpus: all terms OOV
    queries = {"queries": [{"label": "ghost", "terms": ["covid"]}]}
    qfile = tmp_path / "queries.json"
    qfile.write_text(json.dumps(queries))
    assert _cli(tmp_path, "qdtm", "--queries", str(qfile), "--iterations", "20",
                "--background-topics", "2", "--t-max", "2",
                "--expansion-size", "3") == 0
    status = json.loads(capsys.readouterr().out)
    assert status["result"]["unmodelable"] == ["ghost"]


def test_judge_export_import_roundtrip(tmp_path, capsys):
    _dump(tmp_path)
    assert _cli(tmp_path, "ingest", "--input", str(tmp_path / "dump.jsonl")) == 0
    judgments = {
        "judgments": {
            "lda-0001:topic:0": {
                "a1": {"coherent": True, "include": False, "note": "n"},
            }
        }
    }
    jfile = tmp_path / "judgments.json"
    jfile.write_text(json.dumps(judgments))
    assert _cli(tmp_path, "judge-import", "--input", str(jfile)) == 0
    out_file = tmp_path / "export.json"
    assert _cli(tmp_path, "judge-export", "--output", str(out_file)) == 0
    exported = json.loads(out_file.read_text())
    rec = exported["judgments"]["lda-0001:topic:0"]["a1"]
    assert rec["include"] is False and rec["coherent"] is True


def test_exit_codes(tmp_path, capsys):
    # domain error -> 1
    assert _cli(tmp_path, "build") == 1
    err = capsys.readouterr().err
    assert "error:" in err
    # usage error -> 2
    assert _cli(tmp_path, "train") == 2
    # unknown flags rejected -> 2
    assert _cli(tmp_path, "train", "--k", "2", "--bogus") == 2


def test_help_everywhere(tmp_path):
    assert _cli(tmp_path, "--help") == 0
    for sub in ["ingest", "fetch", "build", "train", "sweep", "select-k",
                "topics", "compare", "ledger", "qdtm", "synth",
                "judge-import", "judge-export", "serve", "export"]:
        assert _cli(tmp_path, sub, "--help") == 0


def test_cli_and_api_artifacts_identical(tmp_path):
    # the same ingest+build+train operation through the CLI and through
    # the service must leave byte-identical artifacts
    from fastapi.testclient import TestClient

    from cgtlab.workbench import create_app

    dump = _dump(tmp_path)
    assert _cli(tmp_path, "ingest", "--input", str(dump)) == 0
    assert _cli(tmp_path, "build", "--min-df", "1", "--max-df-ratio", "1.0") == 0
    assert _cli(tmp_path, "train", "--k", "2", "--seed", "4", *FAST) == 0
    cli_dir = tmp_path / "proj"
    cli_model = (cli_dir / "runs" / "lda-0001" / "model" / "phi.bin").read_bytes()
    cli_vocab = (cli_dir / "corpus" / "vocab.tsv").read_bytes()

    app = create_app(tmp_path / "root2", pool_size=1)
    with TestClient(app) as client:
        client.post("/api/v1/projects", json={"name": "proj"})
        overrides = json.dumps({"min_df": 1, "max_df_ratio": 1.0})
        up = client.post("/api/v1/projects/proj/corpus",
                         files={"file": ("dump.jsonl", dump.read_bytes())},
                         data={"preprocess": overrides})
        assert up.status_code == 200
        resp = client.post("/api/v1/projects/proj/runs", json={
            "kind": "lda",
            "params": {"K": 2, "seed": 4, "iterations": 40, "burn_in": 25,
                       "sample_lag": 3, "n_samples": 4},
        })
        run_id = resp.json()["run_id"]
        for _ in range(600):
            if client.get(f"/api/v1/runs/{run_id}").json()["status"] == "done":
                break
        api_dir = tmp_path / "root2" / "proj"
        api_model = (api_dir / "runs" / run_id / "model" / "phi.bin").read_bytes()
        api_vocab = (api_dir / "corpus" / "vocab.tsv").read_bytes()
    assert api_vocab == cli_vocab
    assert api_model == cli_model
