/**
 * Browser shell: wires the palette, canvas, parameter panel, run monitor,
 * and result viewers to the service.  All numbers on screen come from
 * server payloads verbatim; this file only moves them into the DOM.
 */

import { ApiClient } from "./api.js";
import { CanvasGraph, EdgeRefusedError } from "./graph/canvas.js";
import { LabelerState, applyWindow } from "./labeler/state.js";
import { monitorRun } from "./monitor.js";
import type { NodeOutputDoc, PortTable } from "./types.js";
import { buildHeatmapView, cellColor } from "./viewers/heatmap.js";
import { buildRocView, renderRocSvg } from "./viewers/roc.js";
import { buildScatterView, buildScoreTable } from "./viewers/scatter.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id}`);
  }
  return node as T;
}

export async function startApp(baseUrl = ""): Promise<void> {
  const api = new ApiClient(baseUrl);
  const portTable: PortTable = await api.portTypes();
  const graph = new CanvasGraph(portTable);
  const labeler = new LabelerState();

  renderPalette(portTable, graph);
  wireRunButton(api, graph);
  (window as unknown as Record<string, unknown>).radbench = { api, graph, labeler, applyWindow };
}

function renderPalette(portTable: PortTable, graph: CanvasGraph): void {
  const palette = el<HTMLUListElement>("palette");
  for (const type of Object.keys(portTable)) {
    const item = document.createElement("li");
    item.textContent = type;
    item.draggable = true;
    item.addEventListener("dragend", (ev) => {
      const node = graph.addNode(type, ev.clientX, ev.clientY);
      drawNode(graph, node.id);
    });
    palette.appendChild(item);
  }
}

function drawNode(graph: CanvasGraph, id: string): void {
  const canvas = el<HTMLDivElement>("canvas");
  const node = graph.nodes.get(id)!;
  const box = document.createElement("div");
  box.className = "node";
  box.id = `node-${id}`;
  box.style.left = `${node.x}px`;
  box.style.top = `${node.y}px`;
  box.textContent = `${node.type} (${id})`;
  box.addEventListener("click", () => renderParamPanel(graph, id));
  canvas.appendChild(box);
}

function renderParamPanel(graph: CanvasGraph, id: string): void {
  const panel = el<HTMLDivElement>("params");
  const node = graph.nodes.get(id)!;
  panel.innerHTML = "";
  const title = document.createElement("h3");
  title.textContent = `${node.type} — ${id}`;
  panel.appendChild(title);
  const area = document.createElement("textarea");
  area.value = JSON.stringify(node.params, null, 2);
  area.addEventListener("change", () => {
    try {
      graph.setParams(id, JSON.parse(area.value));
      area.classList.remove("invalid");
    } catch {
      area.classList.add("invalid");
    }
  });
  panel.appendChild(area);
  for (const badge of node.badges) {
    const div = document.createElement("div");
    div.className = "badge";
    div.textContent = badge;
    panel.appendChild(div);
  }
}

function wireRunButton(api: ApiClient, graph: CanvasGraph): void {
  el<HTMLButtonElement>("run").addEventListener("click", async () => {
    const doc = graph.export();
    const { diagnostics } = await api.validateGraph(doc);
    graph.applyDiagnostics(diagnostics);
    if (diagnostics.length) {
      el<HTMLDivElement>("status").textContent = `${diagnostics.length} validation problem(s)`;
      return;
    }
    const { run_id } = await api.startRun(doc);
    monitorRun(api, run_id, (status) => {
      el<HTMLDivElement>("status").textContent = JSON.stringify(status.nodes ?? status.state);
    }).done.then(async (status) => {
      if (status.nodes) {
        for (const [nodeId, nodeStatus] of Object.entries(status.nodes)) {
          if (nodeStatus.status === "ok") {
            renderOutput(nodeId, await api.nodeOutput(run_id, nodeId));
          }
        }
      }
    });
  });
}

function renderOutput(nodeId: string, output: NodeOutputDoc): void {
  const results = el<HTMLDivElement>("results");
  const section = document.createElement("section");
  section.id = `out-${nodeId}`;
  if (output.metrics) {
    section.innerHTML = renderRocSvg(buildRocView(output.metrics));
  } else if (output.kind === "plot" && output.data && typeof output.data === "object") {
    const data = output.data as Record<string, unknown>;
    if ("row_order" in data) {
      const view = buildHeatmapView(data as never);
      const flat = view.cells.flat();
      const [min, max] = [Math.min(...flat), Math.max(...flat)];
      section.innerHTML = view.cells
        .map((row) => row.map((v) => `<i style="background:${cellColor(v, min, max)}"></i>`).join(""))
        .map((cells) => `<div class="hm-row">${cells}</div>`)
        .join("");
    } else if ("coords" in data) {
      const view = buildScatterView(data as never);
      section.textContent = `t-SNE (${view.points.length} points, KL ${view.klText})`;
    }
  } else if (output.scores) {
    const table = buildScoreTable(output.scores, []);
    section.innerHTML = table
      .slice(0, 30)
      .map((r) => `<div>${r.feature}: ${r.scoreText}</div>`)
      .join("");
  } else {
    section.textContent = output.status;
  }
  results.appendChild(section);
}
