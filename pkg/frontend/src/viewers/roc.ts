/**
 * ROC viewer: a pure function of the metrics payload.  Every number shown is
 * the payload value verbatim (no client-side recomputation or rounding).
 */

import type { MetricsDoc } from "../types.js";

export interface RocView {
  points: { fpr: number; tpr: number; threshold: number | null }[];
  svgPath: string;
  aucText: string;
  apText: string;
  aucPText: string;
  apPText: string;
  accuracyText: string;
  sensitivityText: string;
  specificityText: string;
  confusion: { tp: number; fp: number; tn: number; fn: number };
  warnings: string[];
}

export function buildRocView(doc: MetricsDoc, size = 300): RocView {
  const points = doc.roc.map(([fpr, tpr, threshold]) => ({ fpr, tpr, threshold }));
  const svgPath = points
    .map((p, i) => `${i === 0 ? "M" : "L"}${(p.fpr * size).toFixed(2)},${((1 - p.tpr) * size).toFixed(2)}`)
    .join(" ");
  return {
    points,
    svgPath,
    aucText: String(doc.auc),
    apText: String(doc.ap),
    aucPText: String(doc.auc_p_value),
    apPText: String(doc.ap_p_value),
    accuracyText: String(doc.accuracy),
    sensitivityText: String(doc.sensitivity),
    specificityText: String(doc.specificity),
    confusion: doc.confusion,
    warnings: doc.warnings,
  };
}

export function renderRocSvg(view: RocView, size = 300): string {
  return [
    `<svg viewBox="0 0 ${size} ${size}" class="roc">`,
    `<line x1="0" y1="${size}" x2="${size}" y2="0" class="chance" />`,
    `<path d="${view.svgPath}" fill="none" class="curve" />`,
    `<text x="8" y="16">AUC ${view.aucText} (p ${view.aucPText})</text>`,
    `<text x="8" y="32">AP ${view.apText} (p ${view.apPText})</text>`,
    `</svg>`,
  ].join("");
}
