"""HTTP service, job queue, and SVG depiction."""

from .app import create_app
from .depict import DepictError, depict
from .jobs import DONE, FAILED, QUEUED, RUNNING, JobQueue, JobRecord

__all__ = [
    "DONE",
    "DepictError",
    "FAILED",
    "JobQueue",
    "JobRecord",
    "QUEUED",
    "RUNNING",
    "create_app",
    "depict",
]
