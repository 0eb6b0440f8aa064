import threading
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from radbench import dvol
from radbench.service import create_app
from radbench.volume import Volume

SQUARE_SLICES = [[2, [[8, 8], [16, 8], [16, 16], [8, 16]]]]


@pytest.fixture
def workspace(tmp_path):
    vals = np.zeros((24, 24, 5))
    x, y = np.ogrid[:24, :24]
    disk = (x - 12) ** 2 + (y - 12) ** 2 <= 36
    vals[:, :, 2][disk] = 100.0
    dvol.write_volume(Volume(vals, (1, 1, 1), modality="CT"), tmp_path / "v.dvol")
    app = create_app(tmp_path / "ws")
    client = TestClient(app)
    client.post("/studies", json={
        "study_id": "s1",
        "series": [{"series_id": "a", "dvol_path": str(tmp_path / "v.dvol")},
                   {"series_id": "b", "dvol_path": str(tmp_path / "v.dvol")}],
    })
    return client


def submit_roi(client, label="malignant", slices=None):
    body = {"series_id": "a", "slices": slices or SQUARE_SLICES,
            "labels": {"label": label}}
    r = client.post("/studies/s1/rois", json=body)
    assert r.status_code == 202
    return r.json()


def wait_features(client, roi_id, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        r = client.get(f"/rois/{roi_id}/features")
        doc = r.json()
        if doc.get("state") == "done":
            return doc["vector"]
        if r.status_code != 200:
            raise AssertionError(doc)
        time.sleep(0.05)
    raise TimeoutError("extraction did not finish")


class TestStudies:
    def test_create_and_get(self, workspace):
        r = workspace.get("/studies/s1")
        assert r.status_code == 200
        assert [s["series_id"] for s in r.json()["series"]] == ["a", "b"]

    def test_missing_study_404(self, workspace):
        r = workspace.get("/studies/nope")
        assert r.status_code == 404
        assert r.json()["code"] == "not-found"

    def test_duplicate_study_409(self, workspace, tmp_path):
        r = workspace.post("/studies", json={"study_id": "s1", "series": []})
        assert r.status_code == 409


class TestRoiSubmission:
    def test_features_eventually_1223(self, workspace):
        doc = submit_roi(workspace)
        vec = wait_features(workspace, doc["roi_id"])
        assert len(vec["names"]) == 1223
        assert len(vec["values"]) == 1223

    def test_resubmission_dedup(self, workspace):
        a = submit_roi(workspace)
        wait_features(workspace, a["roi_id"])
        b = submit_roi(workspace)
        assert b["roi_id"] == a["roi_id"]
        assert b["job"]["state"] == "done"  # no second computation queued

    def test_invalid_polygon_422(self, workspace):
        r = workspace.post("/studies/s1/rois", json={
            "series_id": "a", "slices": [[2, [[0, 0], [1, 1]]]]})
        assert r.status_code == 422
        assert r.json()["code"] == "invalid-polygon"

    def test_unknown_series_404(self, workspace):
        r = workspace.post("/studies/s1/rois", json={
            "series_id": "zz", "slices": SQUARE_SLICES})
        assert r.status_code == 404

    def test_concurrent_identical_submissions_one_job(self, workspace):
        results = []

        def hit():
            results.append(submit_roi(workspace)["job"])

        threads = [threading.Thread(target=hit) for _ in range(6)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        ids = {j["job_id"] for j in results}
        assert len(ids) == 1
        wait_features(workspace, results[0]["roi_id"])


class TestPersistence:
    def test_stores_survive_restart(self, tmp_path):
        vals = np.zeros((24, 24, 5))
        x, y = np.ogrid[:24, :24]
        vals[:, :, 2][(x - 12) ** 2 + (y - 12) ** 2 <= 36] = 100.0
        dvol.write_volume(Volume(vals, (1, 1, 1)), tmp_path / "v.dvol")
        first = TestClient(create_app(tmp_path / "ws"))
        first.post("/studies", json={"study_id": "s1", "series": [
            {"series_id": "a", "dvol_path": str(tmp_path / "v.dvol")}]})
        doc = submit_roi(first)
        vec = wait_features(first, doc["roi_id"])

        # a fresh process over the same root sees everything bit-exactly
        second = TestClient(create_app(tmp_path / "ws"))
        again = second.get(f"/rois/{doc['roi_id']}/features").json()
        assert again["state"] == "done"
        assert again["vector"] == vec
        study = second.get("/studies/s1").json()
        assert [r["roi_id"] for r in study["rois"]] == [doc["roi_id"]]
        # resubmission on the fresh process is still deduplicated
        resubmit = submit_roi(second)
        assert resubmit["roi_id"] == doc["roi_id"]
        assert resubmit["job"]["state"] == "done"


class TestLinking:
    def test_link_and_label_propagation(self, workspace):
        a = submit_roi(workspace, label="benign")
        other = [[2, [[2, 2], [7, 2], [7, 7], [2, 7]]]]
        b = submit_roi(workspace, label="benign", slices=other)
        r = workspace.post(f"/rois/{a['roi_id']}/link", json={
            "roi_ids": [b["roi_id"]], "labels": {"label": "malignant"}})
        assert r.status_code == 200
        members = r.json()["members"]
        assert all(m["labels"]["label"] == "malignant" for m in members)


class TestTools:
    def test_region_grow_round_trip_dice(self, workspace, tmp_path):
        r = workspace.post("/tools/region-grow", json={
            "study_id": "s1", "series_id": "a", "polarity": "bright",
            "curve": {"slices": [[2, [[4, 4], [20, 4], [20, 20], [4, 20]]]]}})
        assert r.status_code == 200
        doc = r.json()
        # re-rasterize the returned polygons and compare against voxel_count
        from radbench.volume import RoiPolygon, rasterize
        roi = RoiPolygon("t", "a", [(z, [tuple(v) for v in verts])
                                    for z, verts in doc["slices"]])
        vol = dvol.load_volume(tmp_path / "v.dvol")
        mask = rasterize(roi, vol)
        dice = 2 * min(mask.voxel_count, doc["voxel_count"]) / (
            mask.voxel_count + doc["voxel_count"])
        assert dice >= 0.99

    def test_grow_empty_seeds_422(self, workspace):
        r = workspace.post("/tools/region-grow", json={
            "study_id": "s1", "series_id": "a", "polarity": "bright",
            "curve": {"slices": [[2, [[0.1, 0.1], [0.3, 0.1], [0.2, 0.3]]]]}})
        assert r.status_code == 422

    def test_copy_identical_geometry(self, workspace):
        a = submit_roi(workspace)
        r = workspace.post(f"/rois/{a['roi_id']}/copy", json={"target_series": "b"})
        assert r.status_code == 200
        roi = r.json()["roi"]
        assert roi["series_id"] == "b"
        assert roi["slices"] == [[2, [[8.0, 8.0], [16.0, 8.0], [16.0, 16.0], [8.0, 16.0]]]]


class TestRuns:
    def _run_annotated_graph(self, client):
        # two ROI classes: squares away from the disk vs squares over it
        roi_ids = []
        for i in range(4):
            slices = [[2, [[2 + i, 2], [9 + i, 2], [9 + i, 9], [2 + i, 9]]]]
            roi_ids.append(submit_roi(client, label="flat", slices=slices)["roi_id"])
        for i in range(4):
            slices = [[2, [[8 + i, 8], [17 + i, 8], [17 + i, 17], [8 + i, 17]]]]
            roi_ids.append(submit_roi(client, label="disk", slices=slices)["roi_id"])
        for rid in roi_ids:
            wait_features(client, rid)  # the dataloader needs extracted features
        doc = {
            "nodes": [
                {"id": "load", "type": "annotated-input",
                 "params": {"study_id": "s1", "label_name": "label",
                            "split": {"fraction": 0.5, "seed": 0, "stratified": True}}},
                {"id": "clf", "type": "classifier",
                 "params": {"kind": "decision-tree", "grid_search": False,
                            "params": {"max_depth": 2}}},
                {"id": "mx", "type": "metrics", "params": {}},
            ],
            "edges": [["load", "clf", "table"], ["clf", "mx", "model"]],
        }
        r = client.post("/runs", json={"graph": doc})
        assert r.status_code == 202
        run_id = r.json()["run_id"]
        deadline = time.time() + 120
        while time.time() < deadline:
            state = client.get(f"/runs/{run_id}").json()
            if state["state"] in ("done", "failed"):
                return run_id, state
            time.sleep(0.1)
        raise TimeoutError

    def test_cyclic_graph_synchronous_diagnostics(self, workspace):
        doc = {"nodes": [{"id": "a", "type": "scaler", "params": {"kind": "min-max"}}],
               "edges": [["a", "a", "table"]]}
        r = workspace.post("/runs", json={"graph": doc})
        assert r.status_code == 422
        codes = [d["code"] for d in r.json()["details"]["diagnostics"]]
        assert "cycle" in codes

    def test_annotated_run_to_metrics(self, workspace):
        run_id, state = self._run_annotated_graph(workspace)
        assert state["state"] == "done", state
        assert state["nodes"]["mx"]["status"] == "ok"
        out = workspace.get(f"/runs/{run_id}/nodes/mx/output").json()
        assert out["kind"] == "metrics"
        assert 0.0 <= out["metrics"]["auc"] <= 1.0
        assert state["record_id"]

    def test_skipped_node_output_is_status(self, workspace, tmp_path):
        from radbench.analytics import FeatureTable, write_table
        t = FeatureTable(["a", "b"], ["f"], np.array([[1.0], [2.0]]), [0, 1])
        write_table(t, tmp_path / "ws" / "tiny.csv")
        doc = {
            "nodes": [
                {"id": "load", "type": "table-input", "params": {"path": "tiny.csv"}},
                {"id": "bad", "type": "custom-transform",
                 "params": {"expression": "log(x-100)"}},
                {"id": "down", "type": "heatmap", "params": {}},
            ],
            "edges": [["load", "bad", "table"], ["bad", "down", "table"]],
        }
        r = workspace.post("/runs", json={"graph": doc})
        run_id = r.json()["run_id"]
        for _ in range(100):
            if workspace.get(f"/runs/{run_id}").json()["state"] != "running":
                break
            time.sleep(0.05)
        out = workspace.get(f"/runs/{run_id}/nodes/down/output")
        assert out.status_code == 200
        assert out.json()["status"] == "skipped-upstream"

    def test_history_and_retest(self, workspace):
        run_id, state = self._run_annotated_graph(workspace)
        assert state["state"] == "done"
        records = workspace.get("/experiments").json()["records"]
        assert len(records) >= 1
        rid = state["record_id"]
        load_out = workspace.get(f"/runs/{run_id}/nodes/load/output").json()["table"]
        val_idx = [i for i, s in enumerate(load_out["split"]) if s == "validation"]
        table_doc = {
            "rows": [load_out["rows"][i] for i in val_idx],
            "columns": load_out["columns"],
            "values": [load_out["values"][i] for i in val_idx],
            "labels": [load_out["labels"][i] for i in val_idx],
        }
        r = workspace.post(f"/experiments/{rid}/retest", json={"table": table_doc})
        assert r.status_code == 200
        stored = workspace.get(f"/runs/{run_id}/nodes/mx/output").json()["metrics"]
        assert r.json()["metrics"] == stored  # bit-identical reproduction
        # delete removes it from history
        r = workspace.delete(f"/experiments/{rid}")
        assert r.status_code == 200
        assert all(rec["record_id"] != rid
                   for rec in workspace.get("/experiments").json()["records"])

    def test_retest_missing_column_422(self, workspace):
        run_id, state = self._run_annotated_graph(workspace)
        rid = state["record_id"]
        r = workspace.post(f"/experiments/{rid}/retest", json={
            "table": {"rows": ["x"], "columns": ["nope"], "values": [[1.0]],
                      "labels": ["flat"]}})
        assert r.status_code == 422
        assert "missing" in r.json()["message"]
