/** t-SNE scatter and selector-score views (pure payload -> view model). */

import type { TsneDoc } from "../types.js";

export interface ScatterPoint {
  row: string;
  x: number;
  y: number;
  label: string;
  classIndex: number;
}

export interface ScatterView {
  points: ScatterPoint[];
  classes: string[];
  klText: string;
}

export function buildScatterView(doc: TsneDoc): ScatterView {
  const classes = [...new Set(doc.labels)].sort();
  const points = doc.coords.map(([x, y], i) => ({
    row: doc.rows[i]!,
    x,
    y,
    label: doc.labels[i]!,
    classIndex: classes.indexOf(doc.labels[i]!),
  }));
  return { points, classes, klText: String(doc.kl_final) };
}

export interface ScoreRow {
  feature: string;
  scoreText: string;
  score: number;
  selected: boolean;
}

/** Selector score table: every score rendered verbatim, ranked descending
 * (ties by feature name). */
export function buildScoreTable(
  scores: Record<string, number>,
  selectedColumns: string[],
): ScoreRow[] {
  const selected = new Set(selectedColumns);
  return Object.entries(scores)
    .map(([feature, score]) => ({
      feature,
      score,
      scoreText: String(score),
      selected: selected.has(feature),
    }))
    .sort((a, b) => (b.score - a.score) || (a.feature < b.feature ? -1 : 1));
}

export interface CoefficientPathView {
  lambdas: number[];
  series: { feature: string; coefficients: number[] }[];
}

/** LASSO coefficient path: one polyline per feature over the lambda grid. */
export function buildCoefficientPath(
  lambdaPath: number[],
  coefficientPath: number[][],
  features: string[],
): CoefficientPathView {
  if (coefficientPath.length !== lambdaPath.length) {
    throw new Error("coefficient path length does not match the lambda grid");
  }
  const series = features.map((feature, j) => ({
    feature,
    coefficients: coefficientPath.map((step) => step[j]!),
  }));
  return { lambdas: lambdaPath, series };
}
