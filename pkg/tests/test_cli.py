"""Command line: golden outputs, exit codes, formats, determinism."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from salesminer.cli import run

DATA = Path(__file__).parent / "data"
FIXTURE = str(DATA / "faq_fixture.csv")
RULES = str(DATA / "rules.toml")


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for var in (
        "SALESMINER_LISTEN",
        "SALESMINER_DATA_DIR",
        "SALESMINER_SCORER_BACKEND",
        "SALESMINER_REMOTE_URL",
        "SALESMINER_RULES_PATH",
        "SALESMINER_TASK_DELAY_SECONDS",
    ):
        monkeypatch.delenv(var, raising=False)


def test_extract_faq_matches_golden_file(tmp_path):
    out = tmp_path / "faq.json"
    assert run(["extract-faq", "--input", FIXTURE, "--out", str(out)]) == 0
    assert out.read_bytes() == (DATA / "faq_golden.json").read_bytes()


def test_extract_faq_stdout_equals_out_file(tmp_path, capfdbinary):
    out = tmp_path / "faq.json"
    assert run(["extract-faq", "--input", FIXTURE, "--out", str(out)]) == 0
    assert run(["extract-faq", "--input", FIXTURE]) == 0
    captured = capfdbinary.readouterr()
    assert captured.out == out.read_bytes()


def test_extract_faq_table_format(capfd):
    assert run(["extract-faq", "--input", FIXTURE, "--format", "table"]) == 0
    out = capfd.readouterr().out
    assert "score" in out and "question" in out and "answer" in out
    assert "how do i reset my password?" in out


def test_ingest_stats(tmp_path, capfd):
    assert run(["ingest", "--input", FIXTURE, "--stats"]) == 0
    doc = json.loads(capfd.readouterr().out)
    assert doc["dialogs"] == 20
    assert doc["utterances"] > 0
    assert run(["ingest", "--input", FIXTURE, "--stats", "--format", "table"]) == 0
    assert "metric" in capfd.readouterr().out


def test_ingest_full_document(capfd):
    assert run(["ingest", "--input", FIXTURE]) == 0
    doc = json.loads(capfd.readouterr().out)
    assert [d["dialog_id"] for d in doc["dialogs"]][:2] == ["d01", "d02"]


def test_mine_objections_is_seed_deterministic(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    base = ["mine-objections", "--input", FIXTURE, "--k", "4", "--seed", "7"]
    assert run(base + ["--out", str(a)]) == 0
    assert run(base + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text("utf-8"))
    assert doc["kind"] == "objection_mining"
    assert doc["parameters"]["seed"] == 7
    assert doc["clusters"]


def test_mine_objections_table(capfd):
    assert run(
        ["mine-objections", "--input", FIXTURE, "--k", "3", "--format", "table"]
    ) == 0
    out = capfd.readouterr().out
    assert "cluster" in out and "anchor" in out


def test_dashboard_json_and_table(tmp_path, capfd):
    assert run(["dashboard", "--input", FIXTURE, "--rules", RULES]) == 0
    doc = json.loads(capfd.readouterr().out)
    assert doc["kind"] == "dashboard"
    assert set(doc["views"]) == {"trigger", "team", "staff"}

    assert run(
        [
            "dashboard",
            "--input",
            FIXTURE,
            "--rules",
            RULES,
            "--format",
            "table",
            "--view",
            "staff",
        ]
    ) == 0
    out = capfd.readouterr().out
    assert "[staff]" in out
    assert "[team]" not in out


def test_search_over_mining_result(tmp_path, capfd):
    index = tmp_path / "mined.json"
    assert run(
        [
            "mine-objections",
            "--input",
            FIXTURE,
            "--k",
            "4",
            "--seed",
            "0",
            "--out",
            str(index),
        ]
    ) == 0
    assert run(
        [
            "search",
            "--index",
            str(index),
            "--query",
            "can i upgrade my plan",
            "--top-k",
            "3",
        ]
    ) == 0
    doc = json.loads(capfd.readouterr().out)
    assert doc["query"] == "can i upgrade my plan"
    assert doc["k"] == 3
    assert 1 <= len(doc["hits"]) <= 3
    scores = [h["score"] for h in doc["hits"]]
    assert scores == sorted(scores, reverse=True)

    assert run(
        [
            "search",
            "--index",
            str(index),
            "--query",
            "upgrade",
            "--format",
            "table",
        ]
    ) == 0
    assert "response" in capfd.readouterr().out


def test_search_rejects_wrong_document_kind(tmp_path, capfd):
    faq = tmp_path / "faq.json"
    assert run(["extract-faq", "--input", FIXTURE, "--out", str(faq)]) == 0
    code = run(["search", "--index", str(faq), "--query", "price"])
    assert code == 2
    assert "not an objection-mining result" in capfd.readouterr().err


def test_usage_errors_exit_1(capfd):
    assert run(["extract-faq"]) == 1  # missing --input
    assert run(["no-such-command"]) == 1
    assert run(["extract-faq", "--input", FIXTURE, "--format", "yaml"]) == 1
    assert run(["search", "--index", "x.json", "--query", "q", "--top-k", "0"]) == 1
    capfd.readouterr()


def test_no_command_prints_help_and_exits_1(capfd):
    assert run([]) == 1
    assert "salesminer" in capfd.readouterr().err


def test_data_errors_exit_2(tmp_path, capfd):
    assert run(["extract-faq", "--input", str(tmp_path / "missing.csv")]) == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("dialog_id,turn_index,speaker\n", encoding="utf-8")
    assert run(["extract-faq", "--input", str(bad)]) == 2
    assert run(["dashboard", "--input", FIXTURE, "--rules", "/none.toml"]) == 2
    assert run(["extract-faq", "--input", FIXTURE, "--config", "/none.toml"]) == 2
    capfd.readouterr()


def test_remote_backend_unreachable_exits_3(tmp_path, capfd):
    config = tmp_path / "remote.toml"
    config.write_text(
        '[scoring]\nbackend = "remote"\nremote_url = "http://127.0.0.1:9"\n',
        encoding="utf-8",
    )
    code = run(["extract-faq", "--input", FIXTURE, "--config", str(config)])
    assert code == 3
    assert "error" in capfd.readouterr().err


def test_flag_overrides_change_parameters(tmp_path):
    out = tmp_path / "narrow.json"
    assert run(
        [
            "extract-faq",
            "--input",
            FIXTURE,
            "--window",
            "1",
            "--threshold",
            "0.9",
            "--out",
            str(out),
        ]
    ) == 0
    doc = json.loads(out.read_text("utf-8"))
    assert doc["parameters"]["window"] == 1
    assert doc["parameters"]["answer_threshold"] == 0.9
    # Tighter settings can only shrink the golden result set.
    golden = json.loads((DATA / "faq_golden.json").read_text("utf-8"))
    assert len(doc["pairs"]) <= len(golden["pairs"])
