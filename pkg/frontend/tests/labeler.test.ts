import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { LabelerState, applyWindow } from "../src/labeler/state.js";
import type { RoiDoc } from "../src/types.js";

const roiDoc: RoiDoc = JSON.parse(readFileSync(new URL("../fixtures/roi.json", import.meta.url), "utf8"));

describe("LabelerState", () => {
  it("draw/submit body carries exactly the drawn vertices", () => {
    const s = new LabelerState();
    s.selectSeries("s1", "a");
    s.sliceIndex = 2;
    s.addVertex(8, 8);
    s.addVertex(16, 8);
    s.addVertex(16, 16);
    s.addVertex(8, 16);
    s.closePolygon();
    s.labels = { label: "malignant" };
    const body = s.submitBody();
    expect(body.series_id).toBe("a");
    expect(body.slices).toEqual([[2, [[8, 8], [16, 8], [16, 16], [8, 16]]]]);
    expect(body.labels).toEqual({ label: "malignant" });
  });

  it("round-trip against the stored service document is vertex-exact", () => {
    const s = new LabelerState();
    s.selectSeries("s1", roiDoc.series_id);
    for (const [z, verts] of roiDoc.slices) {
      s.sliceIndex = z;
      s.beginPolygon();
      for (const [x, y] of verts) {
        s.addVertex(x, y);
      }
      s.closePolygon();
    }
    expect(s.matchesStored(roiDoc)).toBe(true);
    // a nudged vertex no longer matches
    s.drafts[0]!.vertices[0] = [s.drafts[0]!.vertices[0]![0] + 0.5, s.drafts[0]!.vertices[0]![1]];
    expect(s.matchesStored(roiDoc)).toBe(false);
  });

  it("vertex editing mutates the draft in place", () => {
    const s = new LabelerState();
    s.addVertex(0, 0);
    s.addVertex(4, 0);
    s.addVertex(4, 4);
    s.moveVertex(2, 5, 5);
    const poly = s.closePolygon();
    expect(poly.vertices[2]).toEqual([5, 5]);
    expect(() => s.moveVertex(0, 1, 1)).toThrow(); // no open draft anymore
  });

  it("closing needs 3 vertices", () => {
    const s = new LabelerState();
    s.addVertex(0, 0);
    s.addVertex(1, 1);
    expect(() => s.closePolygon()).toThrow(/3 vertices/);
  });

  it("fit-boundary replaces the rough curve with the traced polygons", () => {
    const s = new LabelerState();
    s.selectSeries("s1", "a");
    s.sliceIndex = 2;
    s.addVertex(0, 0);
    s.addVertex(20, 0);
    s.addVertex(20, 20);
    s.closePolygon();
    const traced: [number, [number, number][]][] = [
      [2, [[9.5, 9.5], [14.5, 9.5], [14.5, 14.5], [9.5, 14.5]]],
    ];
    s.replaceWithTraced(traced);
    expect(s.submitBody().slices).toEqual(traced);
    // further manual editing still works on the traced result
    s.drafts[0]!.vertices[0] = [9.0, 9.0];
    expect(s.submitBody().slices[0]![1][0]).toEqual([9.0, 9.0]);
  });
});

describe("window level/width mapping", () => {
  it("maps the window span onto 0..255", () => {
    const out = applyWindow([-200, 0, 200], 0, 400);
    expect(Array.from(out)).toEqual([0, 128, 255]);
  });

  it("clamps outside the window", () => {
    const out = applyWindow([-1000, 1000], 0, 100);
    expect(Array.from(out)).toEqual([0, 255]);
  });

  it("rejects non-positive width", () => {
    expect(() => applyWindow([0], 0, 0)).toThrow();
    const s = new LabelerState();
    expect(() => s.setWindow(40, -5)).toThrow();
  });
});
