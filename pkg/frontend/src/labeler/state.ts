/**
 * Labeler state: slice navigation, window level/width display mapping,
 * polygon drafting with vertex editing, and the submit/reload round-trip.
 * Edits are local until submit; the submitted ROI is exactly the vertex
 * list on screen.
 */

import type { RoiDoc } from "../types.js";

export type Tool = "draw" | "edit-vertex" | "fit-boundary" | "copy-paste";

export interface DraftPolygon {
  z: number;
  vertices: [number, number][];
  closed: boolean;
}

export class LabelerState {
  studyId = "";
  seriesId = "";
  sliceIndex = 0;
  windowLevel = 0;
  windowWidth = 400;
  activeTool: Tool = "draw";
  draft: DraftPolygon | null = null;
  drafts: DraftPolygon[] = [];
  labels: Record<string, unknown> = {};

  selectSeries(studyId: string, seriesId: string): void {
    this.studyId = studyId;
    this.seriesId = seriesId;
    this.sliceIndex = 0;
    this.draft = null;
    this.drafts = [];
  }

  setWindow(level: number, width: number): void {
    if (width <= 0) {
      throw new Error("window width must be positive");
    }
    this.windowLevel = level;
    this.windowWidth = width;
  }

  beginPolygon(): void {
    this.draft = { z: this.sliceIndex, vertices: [], closed: false };
  }

  addVertex(x: number, y: number): void {
    if (!this.draft || this.draft.closed) {
      this.beginPolygon();
    }
    this.draft!.vertices.push([x, y]);
  }

  moveVertex(index: number, x: number, y: number): void {
    if (!this.draft || index < 0 || index >= this.draft.vertices.length) {
      throw new Error("no such vertex");
    }
    this.draft.vertices[index] = [x, y];
  }

  closePolygon(): DraftPolygon {
    if (!this.draft || this.draft.vertices.length < 3) {
      throw new Error("a polygon needs at least 3 vertices");
    }
    this.draft.closed = true;
    this.drafts.push(this.draft);
    const done = this.draft;
    this.draft = null;
    return done;
  }

  /** Fit Boundary: the traced polygons replace the rough curve for further
   * manual editing. */
  replaceWithTraced(slices: [number, [number, number][]][]): void {
    this.drafts = slices.map(([z, vertices]) => ({
      z,
      vertices: vertices.map(([x, y]) => [x, y] as [number, number]),
      closed: true,
    }));
    this.draft = null;
  }

  /** Body for POST /studies/{id}/rois; exactly the vertices on screen. */
  submitBody(): { series_id: string; slices: [number, [number, number][]][]; labels: Record<string, unknown> } {
    if (!this.drafts.length) {
      throw new Error("nothing to submit");
    }
    return {
      series_id: this.seriesId,
      slices: this.drafts.map((d) => [d.z, d.vertices.map(([x, y]) => [x, y] as [number, number])]),
      labels: { ...this.labels },
    };
  }

  /** Reload check: true iff the stored ROI's vertices equal the local ones. */
  matchesStored(doc: RoiDoc): boolean {
    if (doc.slices.length !== this.drafts.length) {
      return false;
    }
    return doc.slices.every(([z, verts], i) => {
      const d = this.drafts[i]!;
      return (
        z === d.z &&
        verts.length === d.vertices.length &&
        verts.every(([x, y], j) => x === d.vertices[j]![0] && y === d.vertices[j]![1])
      );
    });
  }
}

/**
 * Window level/width mapping over a raw slice buffer, client side: values at
 * level map to mid gray, the window spans [level - width/2, level + width/2].
 */
export function applyWindow(values: ArrayLike<number>, level: number, width: number): Uint8ClampedArray {
  if (width <= 0) {
    throw new Error("window width must be positive");
  }
  const lo = level - width / 2;
  const out = new Uint8ClampedArray(values.length);
  for (let i = 0; i < values.length; i++) {
    out[i] = Math.round(((values[i]! - lo) / width) * 255);
  }
  return out;
}
