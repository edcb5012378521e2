"""
Background Worker
=================
Processes analysis jobs from the queue.
"""

import os
import threading
import traceback
from typing import Optional

from logsmells.config_loader import load_config_from_json
from logsmells.engine import run_analysis
from logsmells.logging_config import get_logger
from logsmells.output_generator import cleanup_old_runs, generate_outputs

from .job_queue import JobQueue
from .job_models import AnalysisJob, JobStatus

logger = get_logger("api.worker")


class AnalysisWorker:
    """Runs queued analysis jobs one at a time on a daemon thread."""

    def __init__(self, job_queue: JobQueue, poll_interval: float = 2.0, max_runs: int = 50):
        self.job_queue = job_queue
        self.poll_interval = poll_interval
        self.max_runs = max_runs
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    @property
    def running(self) -> bool:
        return self._thread is not None and self._thread.is_alive()

    def start(self):
        if self.running:
            return
        self._stop.clear()
        self._thread = threading.Thread(target=self._poll, name="analysis-worker", daemon=True)
        self._thread.start()
        logger.info("worker polling every %ss", self.poll_interval)

    def stop(self, timeout: float = 5.0):
        self._stop.set()
        if self._thread:
            self._thread.join(timeout=timeout)
        logger.info("worker stopped")

    def _poll(self):
        while not self._stop.is_set():
            job = None
            try:
                job = self.job_queue.get_next_pending_job()
                if job:
                    self._process_job(job)
            except Exception:
                logger.exception("worker loop error")
            if job is None:
                self._stop.wait(self.poll_interval)

    def _process_job(self, job: AnalysisJob):
        job = self.job_queue.start_job(job.job_id)
        if not job:
            logger.warning("job is no longer pending, skipping")
            return
        logger.info("processing job %s", job.job_id)

        try:
            config = load_config_from_json(job.config)
            config.run_id = job.job_id

            result = run_analysis(config)
            if not result["success"]:
                errors = result.get("errors") or ["unknown error"]
                self.job_queue.fail_job(job.job_id, "; ".join(errors))
                logger.warning("job %s rejected: %s", job.job_id, errors)
                return

            report = result["report"]
            output_dir = self.job_queue.get_job_output_dir(job.job_id)
            written = generate_outputs(report, output_dir, job.job_id, result["config"])
            summary = {
                "run_id": job.job_id,
                "execution_time_seconds": result["execution_time_seconds"],
                "n_files": report.n_files,
                "n_functions": report.n_functions,
                "n_skipped": len(report.skipped),
                "summary": report.summary(),
            }
            self.job_queue.complete_job(
                job.job_id, summary, len(report.findings),
                {name: os.path.basename(path) for name, path in written.items()},
            )
            logger.info("completed job %s: %d findings", job.job_id, len(report.findings))
            cleanup_old_runs(self.job_queue.runs_dir, self.max_runs)

        except Exception as e:
            logger.exception("job %s failed", job.job_id)
            self.job_queue.fail_job(job.job_id, f"{e}\n{traceback.format_exc()}")

    def process_job_sync(self, job_id: str) -> bool:
        """Process a job synchronously (used by tests)."""
        job = self.job_queue.get_job(job_id)
        if not job or job.status != JobStatus.PENDING:
            return False
        self._process_job(job)
        return True
