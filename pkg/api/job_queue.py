"""
Job Queue
=========
Jobs persisted as `<runs_dir>/<job_id>/job.json`; a job's artifacts share its directory.
"""

import json
import os
import threading
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from logsmells.logging_config import get_logger

from .job_models import AnalysisJob, JobStatus

logger = get_logger("api.job_queue")

JOB_FILE = "job.json"


class JobQueue:
    """
    Directory-backed queue of analysis jobs.

    Status changes go through `_transition`, which re-reads the job under the
    lock so two workers cannot both claim the same pending job.
    """

    def __init__(self, runs_dir: str):
        self.runs_dir = runs_dir
        self.root = Path(runs_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.lock = threading.Lock()

    def _path(self, job_id: str) -> Optional[Path]:
        if not job_id or job_id in (".", "..") or os.sep in job_id or "/" in job_id:
            return None
        return self.root / job_id / JOB_FILE

    def _write(self, job: AnalysisJob) -> None:
        path = self._path(job.job_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(job.to_dict(), indent=2), encoding="utf-8")
        os.replace(tmp, path)

    def create_job(self, config: Dict[str, Any]) -> AnalysisJob:
        job = AnalysisJob(config=config)
        with self.lock:
            self._write(job)
        logger.info("queued job %s", job.job_id)
        return job

    def get_job(self, job_id: str) -> Optional[AnalysisJob]:
        path = self._path(job_id)
        if path is None or not path.is_file():
            return None
        try:
            return AnalysisJob.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except (OSError, ValueError, TypeError) as exc:
            logger.warning("ignoring unreadable job file %s: %s", path, exc)
            return None

    def _jobs(self) -> List[AnalysisJob]:
        jobs = (self.get_job(entry.name) for entry in self.root.iterdir() if entry.is_dir())
        return [job for job in jobs if job is not None]

    def _transition(self, job_id: str, expected: Optional[JobStatus],
                    status: JobStatus, **changes: Any) -> Optional[AnalysisJob]:
        with self.lock:
            job = self.get_job(job_id)
            if job is None or (expected is not None and job.status != expected):
                return None
            job.status = status
            for name, value in changes.items():
                setattr(job, name, value)
            self._write(job)
            return job

    def get_next_pending_job(self) -> Optional[AnalysisJob]:
        """Oldest pending job."""
        pending = [j for j in self._jobs() if j.status == JobStatus.PENDING]
        return min(pending, key=lambda j: j.created_at, default=None)

    def start_job(self, job_id: str) -> Optional[AnalysisJob]:
        """Claim a pending job; None when another worker got there first."""
        return self._transition(job_id, JobStatus.PENDING, JobStatus.RUNNING,
                                started_at=datetime.now().isoformat())

    def complete_job(self, job_id: str, summary: Dict[str, Any], n_findings: int,
                     artifacts: Dict[str, str]) -> Optional[AnalysisJob]:
        return self._transition(job_id, JobStatus.RUNNING, JobStatus.COMPLETED,
                                finished_at=datetime.now().isoformat(), summary=summary,
                                n_findings=n_findings, artifacts=artifacts)

    def fail_job(self, job_id: str, error: str) -> Optional[AnalysisJob]:
        return self._transition(job_id, None, JobStatus.FAILED,
                                finished_at=datetime.now().isoformat(), error=error)

    def list_jobs(self, limit: int = 50) -> List[AnalysisJob]:
        """Most recent first."""
        return sorted(self._jobs(), key=lambda j: j.created_at, reverse=True)[:limit]

    def get_job_output_dir(self, job_id: str) -> str:
        return str(self.root / job_id)
