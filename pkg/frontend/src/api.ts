/**
 * Thin typed client over the service's HTTP endpoints.  The fetch function
 * is injectable so tests can run against recorded payloads.
 */

import type {
  Diagnostic,
  GraphDoc,
  MetricsDoc,
  NodeOutputDoc,
  PortTable,
  RoiDoc,
  RunStatusDoc,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details: unknown = {},
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    const doc = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, doc.code ?? "error", doc.message ?? "request failed", doc.details);
    }
    return doc as T;
  }

  portTypes(): Promise<PortTable> {
    return this.request("GET", "/graphs/port-types");
  }

  validateGraph(graph: GraphDoc): Promise<{ diagnostics: Diagnostic[] }> {
    return this.request("POST", "/graphs/validate", { graph });
  }

  startRun(graph: GraphDoc, options: { parallelism?: number; seed?: number } = {}): Promise<{ run_id: string }> {
    return this.request("POST", "/runs", { graph, ...options });
  }

  runStatus(runId: string): Promise<RunStatusDoc> {
    return this.request("GET", `/runs/${runId}`);
  }

  nodeOutput(runId: string, nodeId: string): Promise<NodeOutputDoc> {
    return this.request("GET", `/runs/${runId}/nodes/${nodeId}/output`);
  }

  getStudy(studyId: string): Promise<{ study_id: string; series: { series_id: string }[]; rois: RoiDoc[] }> {
    return this.request("GET", `/studies/${studyId}`);
  }

  submitRoi(
    studyId: string,
    body: { series_id: string; slices: [number, [number, number][]][]; labels?: Record<string, unknown> },
  ): Promise<{ roi_id: string; job: { job_id: string; state: string } }> {
    return this.request("POST", `/studies/${studyId}/rois`, body);
  }

  features(roiId: string): Promise<{ state: string; vector?: { names: string[]; values: number[] } }> {
    return this.request("GET", `/rois/${roiId}/features`);
  }

  linkRois(roiId: string, others: string[], labels?: Record<string, unknown>): Promise<{ group_id: string; members: RoiDoc[] }> {
    return this.request("POST", `/rois/${roiId}/link`, { roi_ids: others, labels });
  }

  regionGrow(body: {
    study_id: string;
    series_id: string;
    curve: { slices: [number, [number, number][]][] };
    polarity?: string;
    spread_3d?: boolean;
  }): Promise<{ slices: [number, [number, number][]][]; truncated: boolean; voxel_count: number }> {
    return this.request("POST", "/tools/region-grow", body);
  }

  copyRoi(roiId: string, targetSeries: string): Promise<{ roi: RoiDoc }> {
    return this.request("POST", `/rois/${roiId}/copy`, { target_series: targetSeries });
  }

  experiments(): Promise<{ records: { record_id: string; metrics: Record<string, { auc: number; ap: number }> }[] }> {
    return this.request("GET", "/experiments");
  }

  retest(recordId: string, table: unknown): Promise<{ metrics: MetricsDoc }> {
    return this.request("POST", `/experiments/${recordId}/retest`, { table });
  }
}
