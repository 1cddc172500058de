"""HTTP task service: upload, task queue, results, search."""

from .app import create_app
from .store import (
    FAILED,
    PENDING,
    RUNNING,
    SUCCEEDED,
    Store,
    TaskRecord,
)
from .worker import Worker

__all__ = [
    "create_app",
    "Store",
    "TaskRecord",
    "Worker",
    "PENDING",
    "RUNNING",
    "SUCCEEDED",
    "FAILED",
]
