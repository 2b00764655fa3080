"""Background training jobs: one thread per run, status poll-able by id."""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from ..harness.config import RunConfig
from ..harness.metrics import MetricsRow
from ..harness.training import train


@dataclass
class Job:
    job_id: str
    config: RunConfig
    state: str = "queued"  # queued | running | finished | failed
    episode: int = 0
    error: str | None = None
    metrics_path: str | None = None
    checkpoint_path: str | None = None
    thread: threading.Thread | None = field(default=None, repr=False)


class JobRegistry:
    """Owns all training jobs of one service process."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._jobs: dict[str, Job] = {}

    def start(self, config: RunConfig) -> Job:
        job = Job(job_id=uuid.uuid4().hex[:12], config=config)

        def _progress(row: MetricsRow) -> None:
            with self._lock:
                job.episode = row.episode

        def _run() -> None:
            with self._lock:
                job.state = "running"
            try:
                result = train(config, progress=_progress)
            except Exception as e:  # surfaced through the status endpoint
                with self._lock:
                    job.state = "failed"
                    job.error = f"{type(e).__name__}: {e}"
                return
            with self._lock:
                job.state = "finished"
                job.episode = result.episodes
                job.metrics_path = result.metrics_path
                job.checkpoint_path = result.checkpoint_path

        job.thread = threading.Thread(target=_run, daemon=True)
        with self._lock:
            self._jobs[job.job_id] = job
        job.thread.start()
        return job

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    def snapshot(self, job_id: str) -> dict | None:
        """Consistent copy of one job's public state."""
        with self._lock:
            job = self._jobs.get(job_id)
            if job is None:
                return None
            return {
                "job_id": job.job_id,
                "state": job.state,
                "episode": job.episode,
                "episodes": job.config.episodes,
                "error": job.error,
                "metrics_path": job.metrics_path,
                "checkpoint_path": job.checkpoint_path,
            }
