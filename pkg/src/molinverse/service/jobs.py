"""In-process job queue for long-running workspace methods.

One worker thread pool; jobs against the same workspace run strictly one
at a time so only one writer ever holds the workspace.  Read endpoints
never go through the queue.  Queued and running jobs are lost on
restart; committed nodes are not.
"""

from __future__ import annotations

import threading
import traceback
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

QUEUED = "queued"
RUNNING = "running"
DONE = "done"
FAILED = "failed"


@dataclass
class JobRecord:
    id: str
    workspace: str
    parent: str
    method: str
    params: dict
    state: str = QUEUED
    node_id: str | None = None
    progress: dict = field(default_factory=dict)
    error: str | None = None
    cancelled: bool = False

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "workspace": self.workspace,
            "parent": self.parent,
            "method": self.method,
            "state": self.state,
            "node": self.node_id,
            "progress": dict(self.progress),
            "error": self.error,
        }


class JobQueue:
    def __init__(self, runner, max_jobs: int = 2):
        """runner(job) performs the work and returns the new node id."""
        self._runner = runner
        self._pool = ThreadPoolExecutor(max_workers=max(1, max_jobs))
        self._jobs: dict[str, JobRecord] = {}
        self._lock = threading.Lock()
        self._ws_locks: dict[str, threading.Lock] = {}

    def submit(self, workspace: str, parent: str, method: str, params: dict) -> JobRecord:
        job = JobRecord(uuid.uuid4().hex[:12], workspace, parent, method, params)
        with self._lock:
            self._jobs[job.id] = job
            ws_lock = self._ws_locks.setdefault(workspace, threading.Lock())
        self._pool.submit(self._run, job, ws_lock)
        return job

    def get(self, job_id: str) -> JobRecord | None:
        with self._lock:
            return self._jobs.get(job_id)

    def cancel(self, job_id: str) -> JobRecord | None:
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                return None
            job.cancelled = True
            if job.state == QUEUED:
                job.state = FAILED
                job.error = "cancelled"
            return job

    def _run(self, job: JobRecord, ws_lock: threading.Lock):
        with ws_lock:
            with self._lock:
                if job.state != QUEUED:
                    return  # cancelled while waiting
                job.state = RUNNING
            try:
                node_id = self._runner(job)
            except Exception as exc:
                with self._lock:
                    job.state = FAILED
                    job.error = f"{type(exc).__name__}: {exc}"
                    job.progress["traceback"] = traceback.format_exc(limit=5)
                return
            with self._lock:
                job.node_id = node_id
                job.state = DONE

    def shutdown(self):
        self._pool.shutdown(wait=False, cancel_futures=True)
