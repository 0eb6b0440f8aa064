"""Background extraction jobs: submitting an ROI enqueues feature extraction
and returns immediately; identical (roi, settings) submissions share one
job and one computation.
"""

from __future__ import annotations

import threading
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..features.extract import ExtractionSettings, extract_feature_vector
from ..volume import Mask, RoiPolygon, Volume, rasterize
from .stores import FeatureStore


@dataclass
class Job:
    job_id: str
    roi_id: str
    settings_hash: str
    state: str = "queued"  # queued | running | done | failed
    error: str | None = None
    done_event: threading.Event = field(default_factory=threading.Event)

    def to_doc(self) -> dict:
        return {"job_id": self.job_id, "roi_id": self.roi_id,
                "settings_hash": self.settings_hash, "state": self.state,
                "error": self.error}


class ExtractionQueue:
    def __init__(self, features: FeatureStore, workers: int = 2):
        self.features = features
        self.pool = ThreadPoolExecutor(max_workers=workers)
        self._jobs: dict[str, Job] = {}  # job_id == f"{roi_id}__{settings_hash}"
        self._lock = threading.Lock()

    def submit(self, vol: Volume, roi: RoiPolygon, settings: ExtractionSettings) -> Job:
        job_id = f"{roi.roi_id}__{settings.settings_hash()}"
        with self._lock:
            existing = self._jobs.get(job_id)
            if existing is not None and existing.state in ("queued", "running", "done"):
                return existing
            if self.features.has(roi.roi_id, settings.settings_hash()):
                job = Job(job_id, roi.roi_id, settings.settings_hash(), state="done")
                job.done_event.set()
                self._jobs[job_id] = job
                return job
            job = Job(job_id, roi.roi_id, settings.settings_hash())
            self._jobs[job_id] = job
        self.pool.submit(self._run, job, vol, roi, settings)
        return job

    def _run(self, job: Job, vol: Volume, roi: RoiPolygon, settings: ExtractionSettings):
        job.state = "running"
        try:
            mask = rasterize(roi, vol)
            vector = extract_feature_vector(vol, mask, settings)
            vector.roi_id = roi.roi_id
            self.features.put(vector)
            job.state = "done"
        except Exception as exc:
            job.state = "failed"
            job.error = f"{type(exc).__name__}: {exc}"
            job.traceback = traceback.format_exc()  # type: ignore[attr-defined]
        finally:
            job.done_event.set()

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    def wait_all(self, timeout: float = 60.0) -> None:
        with self._lock:
            jobs = list(self._jobs.values())
        for job in jobs:
            job.done_event.wait(timeout)
