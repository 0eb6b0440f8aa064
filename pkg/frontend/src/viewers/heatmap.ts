/**
 * Heatmap viewer: reorders the matrix by the server's leaf orders and lays
 * out the two dendrograms from the merge lists.  Cell values are payload
 * values verbatim; only the color mapping is client-side.
 */

import type { HeatmapDoc } from "../types.js";

export interface HeatmapView {
  rowLabels: string[];
  colLabels: string[];
  cells: number[][]; // reordered values, rows x cols
  rowDendrogram: DendrogramSegment[];
  colDendrogram: DendrogramSegment[];
}

export interface DendrogramSegment {
  a: number; // leaf-space position of the first child (0..n-1, fractional)
  b: number;
  height: number;
  childHeights: [number, number];
}

function dendrogramLayout(
  merges: [number, number, number, number][],
  leafOrder: number[],
): DendrogramSegment[] {
  const n = leafOrder.length;
  const position = new Map<number, number>();
  const height = new Map<number, number>();
  leafOrder.forEach((leaf, i) => {
    position.set(leaf, i);
    height.set(leaf, 0);
  });
  const segments: DendrogramSegment[] = [];
  merges.forEach(([a, b, h], step) => {
    const pa = position.get(a);
    const pb = position.get(b);
    if (pa === undefined || pb === undefined) {
      throw new Error(`merge ${step} references an unknown cluster`);
    }
    segments.push({
      a: Math.min(pa, pb),
      b: Math.max(pa, pb),
      height: h,
      childHeights: [height.get(a) ?? 0, height.get(b) ?? 0],
    });
    const id = n + step;
    position.set(id, (pa + pb) / 2);
    height.set(id, h);
  });
  return segments;
}

export function buildHeatmapView(doc: HeatmapDoc): HeatmapView {
  const cells = doc.row_order.map((r) => doc.col_order.map((c) => doc.values[r]![c]!));
  return {
    rowLabels: doc.row_order.map((r) => doc.rows[r]!),
    colLabels: doc.col_order.map((c) => doc.columns[c]!),
    cells,
    rowDendrogram: dendrogramLayout(doc.row_merges, doc.row_order),
    colDendrogram: dendrogramLayout(doc.col_merges, doc.col_order),
  };
}

/** Linear blue-white-red color scale over the view's value range. */
export function cellColor(value: number, min: number, max: number): string {
  const t = max > min ? (value - min) / (max - min) : 0.5;
  const r = Math.round(255 * Math.min(1, 2 * t));
  const b = Math.round(255 * Math.min(1, 2 * (1 - t)));
  const g = Math.round(255 * (1 - Math.abs(2 * t - 1)) * 0.9);
  return `rgb(${r},${g},${b})`;
}
