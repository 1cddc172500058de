"""Background execution of tasks against the store."""

from __future__ import annotations

import os
import queue
import threading
import time
import traceback
from typing import Optional

from ..config import EngineConfig
from ..errors import SalesMinerError
from ..pipelines import (
    DASHBOARD,
    FAQ_EXTRACTION,
    OBJECTION_MINING,
    canonical_json_bytes,
    run_dashboard,
    run_faq_extraction,
    run_objection_mining,
)
from ..sop import IntentModel, SopRule
from .store import FAILED, RUNNING, SUCCEEDED, Store, utc_now

# Test hook: sleep this many seconds inside each task while it is RUNNING,
# so a test can observe (or kill) a service mid-task.
DELAY_ENV = "SALESMINER_TASK_DELAY_SECONDS"


class Worker:
    """Pulls task ids off a queue and runs them one at a time per thread."""

    def __init__(
        self,
        store: Store,
        engine: EngineConfig,
        rules: tuple[SopRule, ...] = (),
        intent_model: Optional[IntentModel] = None,
        n_threads: int = 1,
    ):
        self.store = store
        self.engine = engine
        self.rules = rules
        self.intent_model = intent_model or IntentModel()
        self.queue: "queue.Queue[Optional[str]]" = queue.Queue()
        self.threads = [
            threading.Thread(target=self._loop, daemon=True, name=f"salesminer-worker-{i}")
            for i in range(max(1, n_threads))
        ]
        self._started = False

    def start(self) -> None:
        if not self._started:
            for thread in self.threads:
                thread.start()
            self._started = True

    def stop(self) -> None:
        if self._started:
            for _ in self.threads:
                self.queue.put(None)
            for thread in self.threads:
                thread.join(timeout=5.0)
            self._started = False

    def submit(self, task_id: str) -> None:
        self.queue.put(task_id)

    def drain(self, timeout: float = 30.0) -> None:
        """Block until every queued task has been processed (for tests/CLI)."""
        deadline = time.monotonic() + timeout
        while not self.queue.empty():
            if time.monotonic() > deadline:
                raise TimeoutError("worker queue did not drain in time")
            time.sleep(0.01)
        self.queue.join()

    def _loop(self) -> None:
        while True:
            task_id = self.queue.get()
            if task_id is None:
                self.queue.task_done()
                return
            try:
                self.run_task(task_id)
            finally:
                self.queue.task_done()

    def run_task(self, task_id: str) -> None:
        record = self.store.get_task(task_id)
        if record is None or record.status not in ("pending",):
            return
        self.store.update_task(task_id, status=RUNNING)
        delay = float(os.environ.get(DELAY_ENV, "0") or "0")
        if delay > 0:
            time.sleep(delay)
        # The snapshot stores the full effective engine for reproducibility;
        # only the raw request overrides get re-applied here.
        overrides = record.config_snapshot.get("overrides", {})
        try:
            doc_bytes = self.execute(record.kind, record.file_id, overrides)
        except SalesMinerError as exc:
            self.store.update_task(
                task_id,
                status=FAILED,
                error_message=str(exc),
                finished_at=utc_now(),
            )
            return
        except Exception:
            self.store.update_task(
                task_id,
                status=FAILED,
                error_message=traceback.format_exc(limit=3),
                finished_at=utc_now(),
            )
            return
        result_ref = self.store.write_result(task_id, doc_bytes)
        self.store.update_task(
            task_id,
            status=SUCCEEDED,
            finished_at=utc_now(),
            result_ref=result_ref,
        )

    def execute(self, kind: str, file_id: str, overrides: dict) -> bytes:
        chatlog = self.store.load_chatlog(file_id)
        if chatlog is None:
            raise SalesMinerError(f"uploaded file {file_id} is missing from the store")
        engine = self.engine.with_overrides(overrides)
        if kind == FAQ_EXTRACTION:
            doc = run_faq_extraction(chatlog, engine)
        elif kind == OBJECTION_MINING:
            doc = run_objection_mining(chatlog, engine)
        elif kind == DASHBOARD:
            if not self.rules:
                raise SalesMinerError(
                    "no rule set configured; provide a rules file via --rules "
                    "or SALESMINER_RULES_PATH"
                )
            doc = run_dashboard(chatlog, self.rules, self.intent_model, engine)
        else:
            raise SalesMinerError(f"unknown task kind: {kind}")
        return canonical_json_bytes(doc)
