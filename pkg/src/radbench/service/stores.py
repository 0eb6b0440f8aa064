"""The four file-backed stores (images, masks/ROIs, features, models) plus
the study index.  Everything is content-addressed or id-keyed JSON/DVOL on
disk and survives process restarts bit-exactly.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

from .. import dvol
from ..features.extract import FeatureVector
from ..graph.records import ExperimentStore
from ..volume import RoiPolygon, Series, Study, Volume


class NotFound(KeyError):
    pass


def roi_content_id(series_id: str, slices) -> str:
    """Content-addressed ROI id: identical polygon resubmissions map to the
    same id (and therefore the same extraction job)."""
    doc = [series_id, [[z, [[float(x), float(y)] for x, y in verts]] for z, verts in slices]]
    return "roi-" + hashlib.sha256(json.dumps(doc).encode()).hexdigest()[:16]


class ImageStore:
    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)

    def put(self, study_id: str, series_id: str, vol: Volume) -> Path:
        path = self.root / f"{study_id}__{series_id}.dvol"
        dvol.write_volume(vol, path)
        return path

    def get(self, study_id: str, series_id: str) -> Volume:
        path = self.root / f"{study_id}__{series_id}.dvol"
        if not path.exists():
            raise NotFound(f"no volume for series {series_id!r} in study {study_id!r}")
        return dvol.load_volume(path)


class MaskStore:
    """ROI documents, grouped per study."""

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, roi_id: str) -> Path:
        return self.root / f"{roi_id}.json"

    def put(self, study_id: str, roi: RoiPolygon) -> None:
        doc = dvol.roi_to_doc(roi)
        doc["study_id"] = study_id
        self._path(roi.roi_id).write_text(json.dumps(doc, indent=2, sort_keys=True))

    def get(self, roi_id: str) -> tuple[str, RoiPolygon]:
        path = self._path(roi_id)
        if not path.exists():
            raise NotFound(f"ROI {roi_id!r} not found")
        doc = json.loads(path.read_text())
        return doc["study_id"], dvol.roi_from_doc(doc)

    def for_study(self, study_id: str) -> list[RoiPolygon]:
        out = []
        for f in sorted(self.root.glob("*.json")):
            doc = json.loads(f.read_text())
            if doc.get("study_id") == study_id:
                out.append(dvol.roi_from_doc(doc))
        return out


class FeatureStore:
    """Feature vectors addressed by (roi_id, settings hash)."""

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, roi_id: str, settings_hash: str) -> Path:
        return self.root / f"{roi_id}__{settings_hash}.json"

    def put(self, vector: FeatureVector) -> None:
        self._path(vector.roi_id, vector.settings_hash).write_text(
            json.dumps(vector.to_doc()))

    def get(self, roi_id: str, settings_hash: str) -> FeatureVector:
        path = self._path(roi_id, settings_hash)
        if not path.exists():
            raise NotFound(f"no features for ROI {roi_id!r} with settings {settings_hash!r}")
        return FeatureVector.from_doc(json.loads(path.read_text()))

    def has(self, roi_id: str, settings_hash: str) -> bool:
        return self._path(roi_id, settings_hash).exists()


class StudyIndex:
    """Study/series/ROI metadata with per-study write serialization."""

    def __init__(self, root: Path, images: ImageStore, masks: MaskStore):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self.images = images
        self.masks = masks
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def lock(self, study_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(study_id, threading.Lock())

    def _path(self, study_id: str) -> Path:
        return self.root / f"{study_id}.json"

    def create(self, study_id: str, series: list[dict]) -> None:
        if self._path(study_id).exists():
            raise ValueError(f"study {study_id!r} already exists")
        self._path(study_id).write_text(json.dumps(
            {"study_id": study_id, "series": series}, indent=2, sort_keys=True))

    def exists(self, study_id: str) -> bool:
        return self._path(study_id).exists()

    def get_doc(self, study_id: str) -> dict:
        path = self._path(study_id)
        if not path.exists():
            raise NotFound(f"study {study_id!r} not found")
        return json.loads(path.read_text())

    def load_study(self, study_id: str) -> Study:
        doc = self.get_doc(study_id)
        study = Study(study_id)
        for s in doc["series"]:
            study.add_series(Series(s["series_id"],
                                    self.images.get(study_id, s["series_id"]),
                                    s.get("modality", "")))
        for roi in self.masks.for_study(study_id):
            study.add_roi(roi)
        return study

    def save_rois(self, study: Study) -> None:
        for roi in study.rois.values():
            self.masks.put(study.study_id, roi)

    def study_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))


class Workspace:
    """The four stores rooted in one directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.images = ImageStore(self.root / "images")
        self.masks = MaskStore(self.root / "masks")
        self.features = FeatureStore(self.root / "features")
        self.experiments = ExperimentStore(self.root / "models")
        self.studies = StudyIndex(self.root / "studies", self.images, self.masks)
