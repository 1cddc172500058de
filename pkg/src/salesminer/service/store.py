"""File-backed persistence: content-addressed uploads, task records, results.

Layout under the data directory:

    uploads/<file_id>.json   parsed chatlog (file_id = sha256 of raw bytes)
    tasks/<task_id>.json     task record
    results/<task_id>.json   result document (canonical JSON)

Every document is written to a temp file in the same directory and moved
into place with os.replace, so a crash at any point leaves either the old
document or the new one, never a torn file. Task record writes funnel
through one lock.
"""

from __future__ import annotations

import hashlib
import os
import secrets
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

import json

from ..ingest import Chatlog, chatlog_from_doc
from ..pipelines import canonical_json_bytes

PENDING = "pending"
RUNNING = "running"
SUCCEEDED = "succeeded"
FAILED = "failed"
STATUSES = (PENDING, RUNNING, SUCCEEDED, FAILED)


@dataclass(frozen=True)
class TaskRecord:
    task_id: str
    kind: str
    file_id: str
    config_snapshot: dict
    status: str = PENDING
    error_message: Optional[str] = None
    created_at: str = ""
    finished_at: Optional[str] = None
    result_ref: Optional[str] = None

    def to_doc(self) -> dict[str, Any]:
        return {
            "task_id": self.task_id,
            "kind": self.kind,
            "file_id": self.file_id,
            "config_snapshot": self.config_snapshot,
            "status": self.status,
            "error_message": self.error_message,
            "created_at": self.created_at,
            "finished_at": self.finished_at,
            "result_ref": self.result_ref,
        }

    @staticmethod
    def from_doc(doc: dict) -> "TaskRecord":
        return TaskRecord(
            task_id=doc["task_id"],
            kind=doc["kind"],
            file_id=doc["file_id"],
            config_snapshot=doc.get("config_snapshot", {}),
            status=doc.get("status", PENDING),
            error_message=doc.get("error_message"),
            created_at=doc.get("created_at", ""),
            finished_at=doc.get("finished_at"),
            result_ref=doc.get("result_ref"),
        )


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def new_task_id() -> str:
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%f")
    return f"{stamp}-{secrets.token_hex(4)}"


def atomic_write(path: Path, data: bytes) -> None:
    tmp = path.parent / f".{path.name}.{secrets.token_hex(4)}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class Store:
    """Single data-directory store used by the service and its worker."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        self.uploads = self.root / "uploads"
        self.tasks = self.root / "tasks"
        self.results = self.root / "results"
        for directory in (self.uploads, self.tasks, self.results):
            directory.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()
        self._sweep_temp_files()

    def _sweep_temp_files(self) -> None:
        # Leftovers from writes cut short by a crash; never valid documents.
        for directory in (self.uploads, self.tasks, self.results):
            for leftover in directory.glob(".*.tmp"):
                leftover.unlink(missing_ok=True)

    # -- uploads ---------------------------------------------------------

    def put_upload(self, raw_bytes: bytes, chatlog_doc: dict) -> str:
        file_id = hashlib.sha256(raw_bytes).hexdigest()
        path = self.uploads / f"{file_id}.json"
        if not path.exists():
            atomic_write(path, canonical_json_bytes(chatlog_doc))
        return file_id

    def has_upload(self, file_id: str) -> bool:
        return (self.uploads / f"{file_id}.json").exists()

    def load_chatlog(self, file_id: str) -> Optional[Chatlog]:
        path = self.uploads / f"{file_id}.json"
        if not path.exists():
            return None
        return chatlog_from_doc(json.loads(path.read_text("utf-8")))

    # -- task records ----------------------------------------------------

    def create_task(self, kind: str, file_id: str, config_snapshot: dict) -> TaskRecord:
        record = TaskRecord(
            task_id=new_task_id(),
            kind=kind,
            file_id=file_id,
            config_snapshot=config_snapshot,
            status=PENDING,
            created_at=utc_now(),
        )
        self._write_task(record)
        return record

    def _write_task(self, record: TaskRecord) -> None:
        with self._write_lock:
            atomic_write(
                self.tasks / f"{record.task_id}.json",
                canonical_json_bytes(record.to_doc()),
            )

    def update_task(self, task_id: str, **changes: Any) -> TaskRecord:
        with self._write_lock:
            record = self._read_task(task_id)
            if record is None:
                raise KeyError(task_id)
            record = replace(record, **changes)
            atomic_write(
                self.tasks / f"{task_id}.json", canonical_json_bytes(record.to_doc())
            )
            return record

    def _read_task(self, task_id: str) -> Optional[TaskRecord]:
        path = self.tasks / f"{task_id}.json"
        if not path.exists():
            return None
        return TaskRecord.from_doc(json.loads(path.read_text("utf-8")))

    def get_task(self, task_id: str) -> Optional[TaskRecord]:
        return self._read_task(task_id)

    def list_tasks(self) -> list[TaskRecord]:
        records = []
        for path in self.tasks.glob("*.json"):
            try:
                records.append(TaskRecord.from_doc(json.loads(path.read_text("utf-8"))))
            except (json.JSONDecodeError, KeyError):
                continue  # unreadable record: skip rather than break the list
        records.sort(key=lambda r: (r.created_at, r.task_id), reverse=True)
        return records

    # -- results ---------------------------------------------------------

    def write_result(self, task_id: str, doc_bytes: bytes) -> str:
        path = self.results / f"{task_id}.json"
        atomic_write(path, doc_bytes)
        return str(path.relative_to(self.root))

    def read_result_bytes(self, task_id: str) -> Optional[bytes]:
        path = self.results / f"{task_id}.json"
        if not path.exists():
            return None
        return path.read_bytes()

    # -- crash recovery ---------------------------------------------------

    def recover_interrupted(self) -> list[str]:
        """Mark tasks that never reached a terminal state as failed.

        Pending tasks are included: the queue lives in memory, so after a
        restart nothing would ever run them.
        """
        interrupted = []
        for record in self.list_tasks():
            if record.status in (PENDING, RUNNING):
                self.update_task(
                    record.task_id,
                    status=FAILED,
                    error_message="interrupted by service restart",
                    finished_at=utc_now(),
                )
                interrupted.append(record.task_id)
        return interrupted
