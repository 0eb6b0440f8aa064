"""HTTP facade: studies, ROI submission with background feature extraction,
segmentation tools, graph validation/runs, and experiment history/retest.

Error bodies are {"code", "message", "details"}; an ROI submission returns
202 with a job id before extraction finishes.
"""

from __future__ import annotations

import base64
import io
import tempfile
import threading
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import dvol
from ..analytics import FeatureTable, TableError
from ..analytics.metrics import MetricsError
from ..features.extract import ExtractionSettings
from ..graph import (
    ExecutionCache,
    RecordError,
    RunContext,
    execute,
    from_doc,
    port_type_table,
    validate,
)
from ..segment import (
    GrowRequest,
    SeedError,
    copy_roi,
    fit_boundary,
    mask_to_polygons,
)
from ..volume import (
    EmptyMaskError,
    GeometryError,
    RoiPolygon,
    StudyMismatchError,
)
from .jobs import ExtractionQueue
from .stores import NotFound, Workspace, roi_content_id


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details=None):
        self.status = status
        self.code = code
        self.message = message
        self.details = details or {}


def _settings_from_query(settings: str | None) -> ExtractionSettings:
    if not settings or settings == "default":
        return ExtractionSettings()
    raise ApiError(422, "unknown-settings",
                   f"unknown settings preset {settings!r}; use 'default'")


def _roi_from_body(body: dict, series_id: str) -> RoiPolygon:
    try:
        slices = [(int(z), [(float(x), float(y)) for x, y in verts])
                  for z, verts in body["slices"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ApiError(400, "malformed-roi", f"bad slices payload: {exc}")
    roi_id = roi_content_id(series_id, slices)
    try:
        return RoiPolygon(roi_id, series_id, slices, labels=dict(body.get("labels", {})))
    except GeometryError as exc:
        raise ApiError(422, "invalid-polygon", str(exc))


def create_app(root: str | Path | None = None, workers: int = 2) -> FastAPI:
    root = Path(root) if root else Path(tempfile.mkdtemp(prefix="radbench-"))
    ws = Workspace(root)
    queue = ExtractionQueue(ws.features, workers=workers)
    cache = ExecutionCache()
    runs: dict[str, dict] = {}
    runs_lock = threading.Lock()

    app = FastAPI(title="radbench", version="0.1.0")
    app.state.workspace = ws
    app.state.queue = queue

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={
            "code": exc.code, "message": exc.message, "details": exc.details})

    @app.exception_handler(NotFound)
    async def _not_found(_req: Request, exc: NotFound):
        return JSONResponse(status_code=404, content={
            "code": "not-found", "message": str(exc.args[0]), "details": {}})

    def _load_volume(study_id: str, series_id: str):
        try:
            return ws.images.get(study_id, series_id)
        except NotFound:
            raise ApiError(404, "unknown-series",
                           f"series {series_id!r} not found in study {study_id!r}")

    # --- studies ---------------------------------------------------------------

    @app.post("/studies", status_code=201)
    async def create_study(body: dict):
        study_id = body.get("study_id") or f"study-{uuid.uuid4().hex[:8]}"
        series_docs = []
        for s in body.get("series", []):
            sid = s.get("series_id") or f"series-{uuid.uuid4().hex[:8]}"
            if "dvol_path" in s:
                vol = dvol.load_volume(s["dvol_path"])
            elif "dvol_b64" in s:
                raw = base64.b64decode(s["dvol_b64"])
                tmp = root / "incoming.dvol"
                tmp.write_bytes(raw)
                vol = dvol.load_volume(tmp)
                tmp.unlink()
            else:
                raise ApiError(400, "missing-volume",
                               f"series {sid!r} needs dvol_path or dvol_b64")
            ws.images.put(study_id, sid, vol)
            series_docs.append({"series_id": sid, "modality": s.get("modality", vol.modality)})
        try:
            ws.studies.create(study_id, series_docs)
        except ValueError as exc:
            raise ApiError(409, "duplicate-study", str(exc))
        return {"study_id": study_id, "series": series_docs}

    @app.get("/studies/{study_id}")
    async def get_study(study_id: str):
        doc = ws.studies.get_doc(study_id)
        rois = [dvol.roi_to_doc(r) for r in ws.masks.for_study(study_id)]
        return {**doc, "rois": rois}

    # --- ROI submission and features --------------------------------------------

    def _submit_roi(study_id: str, roi: RoiPolygon):
        vol = _load_volume(study_id, roi.series_id)
        nz = vol.dims[2]
        for z, _ in roi.slices:
            if not (0 <= z < nz):
                raise ApiError(422, "slice-out-of-range",
                               f"slice {z} outside volume (nz={nz})")
        with ws.studies.lock(study_id):
            ws.masks.put(study_id, roi)
        job = queue.submit(vol, roi, ExtractionSettings())
        return job

    @app.post("/studies/{study_id}/rois", status_code=202)
    async def submit_roi(study_id: str, body: dict):
        if not ws.studies.exists(study_id):
            raise NotFound(f"study {study_id!r} not found")
        series_id = body.get("series_id", "")
        roi = _roi_from_body(body, series_id)
        job = _submit_roi(study_id, roi)
        return {"roi_id": roi.roi_id, "job": job.to_doc()}

    @app.get("/rois/{roi_id}/features")
    async def get_features(roi_id: str, settings: str | None = None):
        s = _settings_from_query(settings)
        job = queue.get(f"{roi_id}__{s.settings_hash()}")
        if job is not None and job.state in ("queued", "running"):
            return JSONResponse(status_code=200, content={"state": job.state})
        if job is not None and job.state == "failed":
            raise ApiError(422, "extraction-failed", job.error or "extraction failed")
        vector = ws.features.get(roi_id, s.settings_hash())
        return {"state": "done", "vector": vector.to_doc()}

    @app.post("/rois/{roi_id}/link")
    async def link_rois(roi_id: str, body: dict):
        roi_ids = [roi_id] + [r for r in body.get("roi_ids", []) if r != roi_id]
        group_id = body.get("group_id") or f"group-{uuid.uuid4().hex[:8]}"
        owners = {}
        for rid in roi_ids:
            owners[rid], _ = ws.masks.get(rid)
        if len(set(owners.values())) > 1:
            raise ApiError(422, "cross-study-link",
                           f"ROIs span studies: {owners}", details=owners)
        study_id = owners[roi_id]
        with ws.studies.lock(study_id):
            study = ws.studies.load_study(study_id)
            try:
                study.link_rois(roi_ids, group_id)
            except StudyMismatchError as exc:
                raise ApiError(422, "cross-study-link", str(exc))
            if "labels" in body:
                for name, value in body["labels"].items():
                    study.set_label(roi_id, name, value)
            ws.studies.save_rois(study)
        return {"group_id": group_id,
                "members": [dvol.roi_to_doc(study.rois[r]) for r in roi_ids]}

    # --- segmentation tools ------------------------------------------------------

    @app.post("/tools/region-grow")
    async def region_grow(body: dict):
        study_id = body.get("study_id", "")
        series_id = body.get("series_id", "")
        vol = _load_volume(study_id, series_id)
        curve = _roi_from_body(body.get("curve", {}), series_id)
        try:
            req = GrowRequest(
                volume=vol, curve=curve,
                polarity=body.get("polarity", "bright"),
                spread_3d=bool(body.get("spread_3d", False)),
                max_voxels=int(body.get("max_voxels", 1_000_000)),
            )
            result = fit_boundary(req)
            traced = mask_to_polygons(result.mask, "grown", series_id)
        except (SeedError, EmptyMaskError, GeometryError, ValueError) as exc:
            raise ApiError(422, "grow-failed", str(exc))
        return {
            "slices": [[z, [[x, y] for x, y in verts]] for z, verts in traced.slices],
            "truncated": result.truncated,
            "voxel_count": result.mask.voxel_count,
        }

    @app.post("/rois/{roi_id}/copy")
    async def copy_roi_endpoint(roi_id: str, body: dict):
        target_series = body.get("target_series", "")
        study_id, roi = ws.masks.get(roi_id)
        source = _load_volume(study_id, roi.series_id)
        target = _load_volume(study_id, target_series)
        try:
            mapped = copy_roi(roi, source, target, "pending", target_series)
        except GeometryError as exc:
            raise ApiError(422, "copy-failed", str(exc))
        mapped.roi_id = roi_content_id(target_series, mapped.slices)
        job = _submit_roi(study_id, mapped)
        return {"roi": dvol.roi_to_doc(mapped), "job": job.to_doc()}

    # --- graphs and runs -----------------------------------------------------------

    @app.get("/graphs/port-types")
    async def port_types():
        return port_type_table()

    @app.post("/graphs/validate")
    async def validate_graph(body: dict):
        try:
            spec = from_doc(body.get("graph", body))
        except Exception as exc:
            raise ApiError(400, "malformed-graph", str(exc))
        return {"diagnostics": [d.to_doc() for d in validate(spec)]}

    def _annotated_source(params: dict) -> FeatureTable:
        study_id = params["study_id"]
        label_name = params.get("label_name", "label")
        settings = ExtractionSettings()
        rois = ws.masks.for_study(study_id)
        if not rois:
            raise ValueError(f"study {study_id!r} has no ROIs")
        rows, labels, split, vectors = [], [], [], []
        missing = []
        for roi in sorted(rois, key=lambda r: r.roi_id):
            if not ws.features.has(roi.roi_id, settings.settings_hash()):
                missing.append(roi.roi_id)
                continue
            vec = ws.features.get(roi.roi_id, settings.settings_hash())
            rows.append(roi.roi_id)
            labels.append(roi.labels.get(label_name))
            sp = roi.labels.get("split", "unassigned")
            split.append(sp if sp in ("train", "validation", "test") else "unassigned")
            vectors.append(vec)
        if missing:
            raise ValueError(f"features not extracted yet for: {missing}")
        values = np.stack([v.values for v in vectors])
        return FeatureTable(rows, vectors[0].names, values, labels, split)

    def _annotated_fingerprint(params: dict) -> str:
        import hashlib
        study_id = params.get("study_id", "")
        ids = sorted(r.roi_id for r in ws.masks.for_study(study_id))
        return hashlib.sha256(str(ids).encode()).hexdigest()

    @app.post("/runs", status_code=202)
    async def start_run(body: dict):
        try:
            spec = from_doc(body.get("graph", body))
        except Exception as exc:
            raise ApiError(400, "malformed-graph", str(exc))
        diags = validate(spec)
        if diags:
            raise ApiError(422, "invalid-graph", "graph failed validation",
                           details={"diagnostics": [d.to_doc() for d in diags]})
        ctx = RunContext(
            data_dir=Path(body["data_dir"]) if "data_dir" in body else root,
            seed=body.get("seed"),
            extras={"annotated_source": _annotated_source,
                    "annotated_fingerprint": _annotated_fingerprint},
        )
        run_id = uuid.uuid4().hex[:12]
        entry = {"state": "running", "record": None, "error": None}
        with runs_lock:
            runs[run_id] = entry

        def work():
            try:
                record = execute(spec, ctx, parallelism=int(body.get("parallelism", 2)),
                                 cache=cache)
                entry["record"] = record
                entry["record_id"] = ws.experiments.save(record)
                entry["state"] = "done"  # only after the record is persisted
            except Exception as exc:
                entry["state"] = "failed"
                entry["error"] = f"{type(exc).__name__}: {exc}"

        threading.Thread(target=work, daemon=True).start()
        return {"run_id": run_id}

    def _run_entry(run_id: str) -> dict:
        with runs_lock:
            entry = runs.get(run_id)
        if entry is None:
            raise NotFound(f"run {run_id!r} not found")
        return entry

    @app.get("/runs/{run_id}")
    async def get_run(run_id: str):
        entry = _run_entry(run_id)
        doc = {"state": entry["state"], "error": entry["error"],
               "record_id": entry.get("record_id")}
        if entry["record"] is not None:
            doc["nodes"] = {nid: {"status": r.status, "duration": r.duration,
                                  "cached": r.cached, "error": r.error}
                            for nid, r in entry["record"].results.items()}
        return doc

    @app.get("/runs/{run_id}/nodes/{node_id}/output")
    async def node_output(run_id: str, node_id: str):
        entry = _run_entry(run_id)
        record = entry["record"]
        if record is None or node_id not in record.results:
            raise NotFound(f"node {node_id!r} not found in run {run_id!r}")
        res = record.results[node_id]
        if res.status != "ok":
            return {"status": res.status, "error": res.error}
        p = res.payload
        doc = {"status": "ok", "kind": p.kind}
        if p.kind == "table":
            t = p.data
            doc["table"] = {"rows": t.rows, "columns": t.columns,
                            "values": t.values.tolist(),
                            "labels": [None if l is None else l for l in t.labels],
                            "split": t.split}
            if "scores" in p.meta:
                doc["scores"] = p.meta["scores"]
            if "info" in p.meta:
                doc["info"] = p.meta["info"]
        elif p.kind == "model":
            m = p.data
            doc["model"] = {
                "kind": getattr(m, "kind", "ensemble"),
                "hyperparameters": getattr(m, "hyperparameters", {}),
                "feature_names": getattr(m, "feature_names", []),
            }
            for key in ("cv_table", "trials", "brackets", "consumed"):
                if key in p.meta:
                    doc[key] = p.meta[key]
        elif p.kind == "metrics":
            doc["metrics"] = p.data.to_doc()
        else:
            doc["data"] = p.data
        return doc

    # --- experiments ---------------------------------------------------------------

    @app.get("/experiments")
    async def history():
        return {"records": ws.experiments.list_records()}

    @app.post("/experiments/{record_id}/retest")
    async def retest(record_id: str, body: dict):
        t = body.get("table")
        if t is None:
            raise ApiError(400, "missing-table", "retest needs a 'table' document")
        try:
            table = FeatureTable(rows=list(t["rows"]), columns=list(t["columns"]),
                                 values=np.asarray(t["values"], dtype=np.float64),
                                 labels=list(t.get("labels", [])),
                                 split=list(t.get("split", [])))
            metrics = ws.experiments.retest(record_id, table, body.get("node_id"))
        except (KeyError, TypeError) as exc:
            raise ApiError(400, "malformed-table", f"bad table document: {exc}")
        except (RecordError, TableError, MetricsError) as exc:
            status = 404 if "not found" in str(exc) else 422
            raise ApiError(status, "retest-failed", str(exc))
        return {"metrics": metrics.to_doc()}

    @app.delete("/experiments/{record_id}")
    async def delete_experiment(record_id: str):
        try:
            ws.experiments.delete(record_id)
        except RecordError as exc:
            raise NotFound(str(exc))
        return {"deleted": record_id}

    return app
