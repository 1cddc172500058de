"""Command-line driver for every pipeline, plus `serve`.

Subcommands write the same canonical JSON documents the service persists,
so a CLI run and a service task over identical input and configuration
produce byte-identical files. Exit codes: 0 success, 1 usage error,
2 data error, 3 remote scorer unreachable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from typing import Any, Optional, Sequence

from .config import ConfigError, EngineConfig, ServiceConfig, load_config
from .errors import IngestError, RemoteUnavailable, SalesMinerError
from .ingest import chatlog_to_doc, dialog_stats, parse_chatlog
from .pipelines import (
    canonical_json_bytes,
    clusters_from_doc,
    run_dashboard,
    run_faq_extraction,
    run_objection_mining,
)
from .scoring import make_scorer
from .search import build_index, search
from .sop import load_rules

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_REMOTE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exit code 1, not 2."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> _Parser:
    parser = _Parser(prog="salesminer", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    def common(p: _Parser) -> None:
        p.add_argument("--config", help="TOML config file (flags override it)")
        p.add_argument(
            "--format",
            choices=("json", "table"),
            default="json",
            help="output rendering (default json)",
        )
        p.add_argument("--out", help="write output to this file instead of stdout")

    p = sub.add_parser("ingest", help="parse and validate a chatlog CSV")
    common(p)
    p.add_argument("--input", required=True, help="chatlog CSV file")
    p.add_argument(
        "--stats", action="store_true", help="print corpus statistics, not the parsed log"
    )

    p = sub.add_parser("extract-faq", help="mine question/answer pairs")
    common(p)
    p.add_argument("--input", required=True, help="chatlog CSV file")
    p.add_argument("--window", type=int, help="answer search window size")
    p.add_argument("--threshold", type=float, help="answer acceptance threshold")

    p = sub.add_parser("mine-objections", help="cluster customer objections")
    common(p)
    p.add_argument("--input", required=True, help="chatlog CSV file")
    p.add_argument("--k", type=int, help="number of clusters (default: heuristic)")
    p.add_argument("--seed", type=int, help="random seed for clustering")

    p = sub.add_parser("dashboard", help="evaluate SOP rules over a chatlog")
    common(p)
    p.add_argument("--input", required=True, help="chatlog CSV file")
    p.add_argument("--rules", required=True, help="rules TOML file")
    p.add_argument(
        "--view",
        choices=("trigger", "team", "staff"),
        help="with --format table, render only this aggregation",
    )

    p = sub.add_parser("search", help="query a persisted objection-mining result")
    common(p)
    p.add_argument("--index", required=True, help="objection-mining result JSON file")
    p.add_argument("--query", required=True, help="query text")
    p.add_argument("--top-k", type=int, default=10, dest="top_k", help="hits to return")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", help="TOML config file")
    p.add_argument("--host", help="listen host (overrides config)")
    p.add_argument("--port", type=int, help="listen port (overrides config)")

    return parser


def _load(args: argparse.Namespace) -> ServiceConfig:
    return load_config(getattr(args, "config", None), env=os.environ)


def _engine_with_flags(config: ServiceConfig, overrides: dict[str, Any]) -> EngineConfig:
    given = {k: v for k, v in overrides.items() if v is not None}
    return config.engine.with_overrides(given)


def _read_chatlog(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_chatlog(raw, source_file=os.path.basename(path))


def _emit(doc: dict, args: argparse.Namespace, table_renderer=None) -> None:
    if args.format == "table" and table_renderer is not None:
        text = table_renderer(doc)
        payload = text.encode("utf-8")
        if not text.endswith("\n"):
            payload += b"\n"
    else:
        payload = canonical_json_bytes(doc)
    if getattr(args, "out", None):
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()


def _table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    cells = [[str(c) for c in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def line(row):
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
    out = [line(headers), line("-" * w for w in widths)]
    out.extend(line(row) for row in cells)
    return "\n".join(out)


def _stats_table(doc: dict) -> str:
    return _table(["metric", "value"], sorted(doc.items()))


def _faq_table(doc: dict) -> str:
    rows = [
        [f"{p['score']:.4f}", p["question"], p["answer"], p["dialog_id"]]
        for p in doc["pairs"]
    ]
    return _table(["score", "question", "answer", "dialog"], rows)


def _clusters_table(doc: dict) -> str:
    rows = [
        [
            c["cluster_id"],
            c["frequency"],
            f"{c['mean_relevance']:.4f}",
            ", ".join(c["keywords"]),
            c["anchor_text"],
        ]
        for c in doc["clusters"]
    ]
    return _table(["cluster", "freq", "relevance", "keywords", "anchor"], rows)


def _dashboard_table(doc: dict, view: Optional[str]) -> str:
    views = [view] if view else ["trigger", "team", "staff"]
    blocks = []
    for name in views:
        rows = [
            [r["key"], r["triggered"], r["executed"], f"{r['ratio']:.4f}"]
            for r in doc["views"][name]
        ]
        blocks.append(f"[{name}]\n" + _table(["key", "triggered", "executed", "ratio"], rows))
    return "\n\n".join(blocks)


def _search_table(doc: dict) -> str:
    rows = [
        [f"{h['score']:.4f}", h["cluster_id"], h["customer_query_text"], h["response_text"]]
        for h in doc["hits"]
    ]
    return _table(["score", "cluster", "customer query", "response"], rows)


def cmd_ingest(args: argparse.Namespace) -> int:
    chatlog = _read_chatlog(args.input)
    if args.stats:
        _emit(dialog_stats(chatlog).to_doc(), args, _stats_table)
    else:
        _emit(chatlog_to_doc(chatlog), args)
    return EXIT_OK


def cmd_extract_faq(args: argparse.Namespace) -> int:
    config = _load(args)
    engine = _engine_with_flags(
        config, {"window": args.window, "answer_threshold": args.threshold}
    )
    chatlog = _read_chatlog(args.input)
    _emit(run_faq_extraction(chatlog, engine), args, _faq_table)
    return EXIT_OK


def cmd_mine_objections(args: argparse.Namespace) -> int:
    config = _load(args)
    engine = _engine_with_flags(config, {"k": args.k, "seed": args.seed})
    chatlog = _read_chatlog(args.input)
    _emit(run_objection_mining(chatlog, engine), args, _clusters_table)
    return EXIT_OK


def cmd_dashboard(args: argparse.Namespace) -> int:
    config = _load(args)
    rules, model = load_rules(args.rules)
    chatlog = _read_chatlog(args.input)
    doc = run_dashboard(chatlog, rules, model, config.engine)
    _emit(doc, args, lambda d: _dashboard_table(d, args.view))
    return EXIT_OK


def cmd_search(args: argparse.Namespace) -> int:
    if args.top_k < 1:
        raise UsageError("--top-k must be >= 1")
    config = _load(args)
    try:
        with open(args.index, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SalesMinerError(f"cannot read {args.index}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SalesMinerError(f"{args.index} is not valid JSON: {exc}") from exc
    if doc.get("kind") != "objection_mining":
        raise SalesMinerError(f"{args.index} is not an objection-mining result")
    scorer = make_scorer(config.engine.scorer)
    index = build_index(clusters_from_doc(doc, scorer), scorer)
    hits = search(index, args.query, args.top_k, scorer)
    _emit(
        {"query": args.query, "k": args.top_k, "hits": [h.to_doc() for h in hits]},
        args,
        _search_table,
    )
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    config = _load(args)
    if args.host:
        config = replace(config, host=args.host)
    if args.port:
        config = replace(config, port=args.port)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "extract-faq": cmd_extract_faq,
    "mine-objections": cmd_mine_objections,
    "dashboard": cmd_dashboard,
    "search": cmd_search,
    "serve": cmd_serve,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except RemoteUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REMOTE
    except (SalesMinerError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
