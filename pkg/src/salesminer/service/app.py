"""HTTP API over the store and worker.

Endpoints (JSON unless noted):

    POST /api/chatlogs            multipart CSV upload -> {"file_id", "stats"}
    POST /api/tasks               {"kind", "file_id", "overrides"?} -> 202
    GET  /api/tasks               newest first
    GET  /api/tasks/{id}          one record
    GET  /api/tasks/{id}/result   persisted result document, byte for byte
    GET  /api/search?q=&k=&task=  top-k hits from a finished mining task
    GET  /api/health              {"status": "ok"}

Errors are JSON: {"error": {"kind", "message", ...}} with 400/404/409/413.
"""

from __future__ import annotations

import json
import threading
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..config import ServiceConfig
from ..errors import ConfigError, EmptyQuery, IngestError, SalesMinerError
from ..ingest import chatlog_to_doc, dialog_stats, parse_chatlog
from ..pipelines import OBJECTION_MINING, TASK_KINDS, clusters_from_doc
from ..scoring import Scorer, make_scorer
from ..search import SearchIndex, build_index, search
from ..sop import IntentModel, SopRule, load_rules
from .store import SUCCEEDED, Store
from .worker import Worker


def error_body(kind: str, message: str, **extra) -> dict:
    body = {"kind": kind, "message": message}
    body.update({k: v for k, v in extra.items() if v is not None})
    return {"error": body}


def error_response(status: int, kind: str, message: str, **extra) -> JSONResponse:
    return JSONResponse(status_code=status, content=error_body(kind, message, **extra))


class IndexCache:
    """Search indexes for finished mining tasks, rebuilt on demand."""

    def __init__(self, store: Store, scorer: Scorer):
        self.store = store
        self.scorer = scorer
        self._lock = threading.Lock()
        self._indexes: dict[str, SearchIndex] = {}

    def get(self, task_id: str) -> Optional[SearchIndex]:
        with self._lock:
            cached = self._indexes.get(task_id)
        if cached is not None:
            return cached
        raw = self.store.read_result_bytes(task_id)
        if raw is None:
            return None
        doc = json.loads(raw.decode("utf-8"))
        if doc.get("kind") != OBJECTION_MINING:
            return None
        index = build_index(clusters_from_doc(doc, self.scorer), self.scorer)
        with self._lock:
            self._indexes[task_id] = index
        return index


def create_app(config: ServiceConfig) -> FastAPI:
    store = Store(config.data_dir)
    interrupted = store.recover_interrupted()

    rules: tuple[SopRule, ...] = ()
    intent_model = IntentModel(vocabulary=frozenset())
    if config.rules_path:
        loaded_rules, intent_model = load_rules(config.rules_path)
        rules = tuple(loaded_rules)
    worker = Worker(
        store,
        config.engine,
        rules=rules,
        intent_model=intent_model,
        n_threads=config.workers,
    )
    scorer = make_scorer(config.engine.scorer)
    index_cache = IndexCache(store, scorer)

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        worker.start()
        try:
            yield
        finally:
            worker.stop()

    app = FastAPI(
        title="salesminer",
        docs_url=None,
        redoc_url=None,
        openapi_url=None,
        lifespan=lifespan,
    )
    app.state.store = store
    app.state.worker = worker
    app.state.config = config
    app.state.recovered_task_ids = interrupted

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/api/chatlogs")
    async def upload_chatlog(request: Request) -> Response:
        body_limit = config.max_upload_bytes
        declared = request.headers.get("content-length")
        if declared is not None and declared.isdigit() and int(declared) > body_limit:
            return error_response(
                413, "PayloadTooLarge", f"upload exceeds {body_limit} bytes"
            )
        form = await request.form()
        upload = form.get("file")
        if upload is None or isinstance(upload, str):
            return error_response(
                400, "MissingFile", 'multipart field "file" is required'
            )
        raw = await upload.read()
        if len(raw) > body_limit:
            return error_response(
                413, "PayloadTooLarge", f"upload exceeds {body_limit} bytes"
            )
        try:
            chatlog = parse_chatlog(raw, source_file=upload.filename or "")
        except IngestError as exc:
            return JSONResponse(status_code=400, content={"error": exc.to_doc()})
        file_id = store.put_upload(raw, chatlog_to_doc(chatlog))
        stats = dialog_stats(chatlog)
        return JSONResponse(
            status_code=200, content={"file_id": file_id, "stats": stats.to_doc()}
        )

    @app.post("/api/tasks")
    async def start_task(request: Request) -> Response:
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return error_response(400, "BadRequest", "body must be a JSON object")
        if not isinstance(body, dict):
            return error_response(400, "BadRequest", "body must be a JSON object")
        kind = body.get("kind")
        file_id = body.get("file_id")
        overrides = body.get("overrides") or {}
        if kind not in TASK_KINDS:
            return error_response(
                400,
                "UnknownKind",
                f"kind must be one of {', '.join(TASK_KINDS)}",
                value=kind,
            )
        if not isinstance(file_id, str) or not store.has_upload(file_id):
            return error_response(404, "UnknownFile", "file_id not found", value=file_id)
        if not isinstance(overrides, dict):
            return error_response(400, "BadRequest", "overrides must be an object")
        try:
            effective = config.engine.with_overrides(overrides)
        except ConfigError as exc:
            return error_response(400, "BadConfig", str(exc))
        snapshot = effective.to_doc()
        snapshot["overrides"] = overrides
        record = store.create_task(kind, file_id, snapshot)
        worker.submit(record.task_id)
        return JSONResponse(status_code=202, content={"task_id": record.task_id})

    @app.get("/api/tasks")
    def list_tasks() -> dict:
        return {"tasks": [r.to_doc() for r in store.list_tasks()]}

    @app.get("/api/tasks/{task_id}")
    def get_task(task_id: str) -> Response:
        record = store.get_task(task_id)
        if record is None:
            return error_response(404, "UnknownTask", "task_id not found", value=task_id)
        return JSONResponse(status_code=200, content=record.to_doc())

    @app.get("/api/tasks/{task_id}/result")
    def get_result(task_id: str) -> Response:
        record = store.get_task(task_id)
        if record is None:
            return error_response(404, "UnknownTask", "task_id not found", value=task_id)
        if record.status != SUCCEEDED:
            return error_response(
                409,
                "TaskNotSucceeded",
                f"task is {record.status}; results exist only for succeeded tasks",
                value=task_id,
            )
        raw = store.read_result_bytes(task_id)
        if raw is None:
            return error_response(404, "MissingResult", "result document not found")
        return Response(content=raw, media_type="application/json; charset=utf-8")

    @app.get("/api/search")
    def search_endpoint(q: str = "", k: int = 10, task: str = "") -> Response:
        if not q.strip():
            return error_response(400, "EmptyQuery", "query text is empty")
        if k < 1:
            return error_response(400, "BadRequest", "k must be >= 1")
        record = store.get_task(task) if task else None
        if record is None or record.status != SUCCEEDED or record.kind != OBJECTION_MINING:
            return error_response(
                404,
                "NoIndex",
                "task must name a succeeded objection_mining task",
                value=task or None,
            )
        index = index_cache.get(task)
        if index is None:
            return error_response(404, "NoIndex", "no index available for this task")
        try:
            hits = search(index, q, k, scorer)
        except EmptyQuery:
            return error_response(400, "EmptyQuery", "query text is empty")
        return JSONResponse(
            status_code=200,
            content={"query": q, "k": k, "task": task, "hits": [h.to_doc() for h in hits]},
        )

    @app.exception_handler(SalesMinerError)
    def on_domain_error(_request: Request, exc: SalesMinerError) -> JSONResponse:
        return error_response(400, type(exc).__name__, str(exc))

    if config.static_dir:
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app
