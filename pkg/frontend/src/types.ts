/** Wire types mirroring the service's JSON documents. */

export interface GraphNodeDoc {
  id: string;
  type: string;
  params: Record<string, unknown>;
}

export interface GraphDoc {
  version: string;
  nodes: GraphNodeDoc[];
  edges: [string, string, string][]; // [src, dst, port]
}

export interface PortSpec {
  name: string;
  kinds: string[];
  required: boolean;
  variadic: boolean;
}

export interface NodeTypeSpec {
  inputs: PortSpec[];
  output: string;
  required_params: string[];
}

export type PortTable = Record<string, NodeTypeSpec>;

export interface Diagnostic {
  code: string;
  node_id: string | null;
  message: string;
}

export interface MetricsDoc {
  roc: [number, number, number | null][]; // fpr, tpr, threshold (null = +inf)
  auc: number;
  ap: number;
  auc_p_value: number;
  ap_p_value: number;
  confusion: { tp: number; fp: number; tn: number; fn: number };
  accuracy: number;
  sensitivity: number;
  specificity: number;
  warnings: string[];
}

export interface HeatmapDoc {
  rows: string[];
  columns: string[];
  values: number[][];
  row_order: number[];
  col_order: number[];
  row_merges: [number, number, number, number][];
  col_merges: [number, number, number, number][];
}

export interface TsneDoc {
  rows: string[];
  coords: [number, number][];
  labels: string[];
  kl_final: number;
}

export interface RoiSliceDoc {
  z: number;
  vertices: [number, number][];
}

export interface RoiDoc {
  roi_id: string;
  series_id: string;
  slices: [number, [number, number][]][];
  labels: Record<string, unknown>;
  lesion_group_id: string | null;
}

export interface RunNodeStatus {
  status: string;
  duration: number;
  cached: boolean;
  error: string | null;
}

export interface RunStatusDoc {
  state: "running" | "done" | "failed";
  error: string | null;
  record_id?: string | null;
  nodes?: Record<string, RunNodeStatus>;
}

export interface NodeOutputDoc {
  status: string;
  kind?: string;
  error?: string | null;
  metrics?: MetricsDoc;
  table?: {
    rows: string[];
    columns: string[];
    values: number[][];
    labels: (string | null)[];
    split: string[];
  };
  scores?: Record<string, number>;
  info?: Record<string, unknown>;
  data?: unknown;
  model?: { kind: string; hyperparameters: Record<string, unknown>; feature_names: string[] };
}
