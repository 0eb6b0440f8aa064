"""Experiment persistence: saved runs (graph + per-node results + model
payloads + dataset snapshot) and retest on new tables with the stored,
frozen preprocessing chain.
"""

from __future__ import annotations

import json
import pickle
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..analytics import FeatureTable, Metrics, TableError
from ..analytics.metrics import compute_metrics
from .engine import STATUS_OK, RunRecord
from .nodes import Payload
from .spec import GraphSpec, from_doc, render, to_doc

import numpy as np


class RecordError(ValueError):
    pass


@dataclass
class ExperimentRecord:
    record_id: str
    spec: GraphSpec
    created_at: float
    node_docs: dict[str, dict]
    payloads: dict[str, Payload] = field(default_factory=dict)

    def model_nodes(self) -> list[str]:
        return [nid for nid, p in self.payloads.items() if p.kind == "model"]

    def metrics_docs(self) -> dict[str, dict]:
        return {nid: p.data.to_doc() for nid, p in self.payloads.items()
                if p.kind == "metrics"}


class ExperimentStore:
    """File-backed store: one directory per record."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _dir(self, record_id: str) -> Path:
        return self.root / record_id

    def save(self, run: RunRecord) -> str:
        import hashlib

        digests = sorted(
            (nid, r.payload.digest()) for nid, r in run.results.items()
            if r.payload is not None
        )
        record_id = hashlib.sha256(
            (render(run.spec) + json.dumps(digests)).encode()
        ).hexdigest()[:16]
        d = self._dir(record_id)
        d.mkdir(parents=True, exist_ok=True)
        (d / "graph.json").write_text(render(run.spec))
        (d / "results.json").write_text(json.dumps(
            {nid: r.to_doc() for nid, r in run.results.items()}, indent=2, sort_keys=True))
        (d / "meta.json").write_text(json.dumps(
            {"record_id": record_id, "created_at": time.time(), "run_id": run.run_id}))
        payload_dir = d / "payloads"
        payload_dir.mkdir(exist_ok=True)
        for nid, r in run.results.items():
            if r.payload is not None and r.status == STATUS_OK:
                with open(payload_dir / f"{nid}.pkl", "wb") as fh:
                    pickle.dump(r.payload, fh)
        return record_id

    def load(self, record_id: str) -> ExperimentRecord:
        d = self._dir(record_id)
        if not d.exists():
            raise RecordError(f"experiment record {record_id!r} not found")
        spec = from_doc(json.loads((d / "graph.json").read_text()))
        meta = json.loads((d / "meta.json").read_text())
        node_docs = json.loads((d / "results.json").read_text())
        payloads = {}
        for f in sorted((d / "payloads").glob("*.pkl")):
            with open(f, "rb") as fh:
                payloads[f.stem] = pickle.load(fh)
        return ExperimentRecord(record_id, spec, meta["created_at"], node_docs, payloads)

    def delete(self, record_id: str) -> None:
        d = self._dir(record_id)
        if not d.exists():
            raise RecordError(f"experiment record {record_id!r} not found")
        for f in sorted(d.rglob("*"), reverse=True):
            f.unlink() if f.is_file() else f.rmdir()
        d.rmdir()

    def list_records(self) -> list[dict]:
        out = []
        for d in sorted(self.root.iterdir()):
            if not (d / "meta.json").exists():
                continue
            rec = self.load(d.name)
            out.append({
                "record_id": rec.record_id,
                "created_at": rec.created_at,
                "n_nodes": len(rec.spec.nodes),
                "metrics": {nid: {"auc": m["auc"], "ap": m["ap"]}
                            for nid, m in rec.metrics_docs().items()},
            })
        return out

    def retest(self, record_id: str, table: FeatureTable,
               node_id: str | None = None) -> Metrics:
        """Replay the stored model's frozen preprocessing chain on a new
        table and score every row; never refits anything."""
        rec = self.load(record_id)
        model_nodes = rec.model_nodes()
        if not model_nodes:
            raise RecordError(f"record {record_id!r} has no model payloads")
        if node_id is None:
            if len(model_nodes) > 1:
                raise RecordError(
                    f"record has several model nodes {sorted(model_nodes)}; pick one")
            node_id = model_nodes[0]
        if node_id not in rec.payloads:
            raise RecordError(f"node {node_id!r} has no stored payload")
        model = rec.payloads[node_id].data
        try:
            prepared = model.apply_chain(table)
        except TableError as exc:
            raise RecordError(str(exc)) from exc
        scores = model.predict_scores(prepared)
        y = np.asarray([l == model.classes[1] for l in prepared.label_array()],
                       dtype=np.float64)
        seed = self._stored_permutation_seed(rec)
        return compute_metrics(y, scores, permutation_seed=seed)

    @staticmethod
    def _stored_permutation_seed(rec: ExperimentRecord) -> int:
        for n in rec.spec.nodes:
            if n.node_type == "metrics":
                return n.params.get("permutation_seed", 0)
        return 0
