/**
 * Client-side graph model behind the drag-and-drop canvas.
 *
 * Mirrors the server's GraphSpec plus node positions and per-node validation
 * badges.  Edge legality is enforced at drop time from the server's
 * port-type table (fetched once), so an edge the server would reject never
 * lands on the canvas; export strips positions and yields a document the
 * server validates identically to a hand-written one.
 */

import { canonicalGraphDoc } from "../canonical.js";
import type { Diagnostic, GraphDoc, PortTable } from "../types.js";

export interface CanvasNode {
  id: string;
  type: string;
  params: Record<string, unknown>;
  x: number;
  y: number;
  badges: string[]; // validation messages from the server, if any
}

export interface CanvasEdge {
  src: string;
  dst: string;
  port: string;
}

export class EdgeRefusedError extends Error {}

export class CanvasGraph {
  readonly nodes = new Map<string, CanvasNode>();
  readonly edges: CanvasEdge[] = [];
  dirty = false;
  private counter = 0;

  constructor(private readonly portTable: PortTable) {}

  /** Palette drop: create a node of the given type at a canvas position. */
  addNode(type: string, x = 0, y = 0, id?: string): CanvasNode {
    if (!(type in this.portTable)) {
      throw new Error(`unknown node type '${type}'`);
    }
    let nodeId = id ?? this.freshId(type);
    if (this.nodes.has(nodeId)) {
      throw new Error(`duplicate node id '${nodeId}'`);
    }
    const node: CanvasNode = { id: nodeId, type, params: {}, x, y, badges: [] };
    this.nodes.set(nodeId, node);
    this.dirty = true;
    return node;
  }

  private freshId(type: string): string {
    let candidate: string;
    do {
      this.counter += 1;
      candidate = `${type}-${this.counter}`;
    } while (this.nodes.has(candidate));
    return candidate;
  }

  removeNode(id: string): void {
    if (!this.nodes.delete(id)) {
      return;
    }
    for (let i = this.edges.length - 1; i >= 0; i--) {
      const e = this.edges[i]!;
      if (e.src === id || e.dst === id) {
        this.edges.splice(i, 1);
      }
    }
    this.dirty = true;
  }

  moveNode(id: string, x: number, y: number): void {
    const node = this.mustGet(id);
    node.x = x;
    node.y = y;
    // positions are cosmetic: the exported document is unchanged
  }

  setParam(id: string, key: string, value: unknown): void {
    this.mustGet(id).params[key] = value;
    this.dirty = true;
  }

  setParams(id: string, params: Record<string, unknown>): void {
    this.mustGet(id).params = { ...params };
    this.dirty = true;
  }

  /**
   * Mouse edge drawing.  Refused (throws EdgeRefusedError) when the port is
   * unknown, the payload kinds are incompatible, a single-edge port is
   * already wired, or the edge would close a cycle.
   */
  connect(src: string, dst: string, port: string): CanvasEdge {
    const srcNode = this.mustGet(src);
    const dstNode = this.mustGet(dst);
    const dstSpec = this.portTable[dstNode.type];
    const srcSpec = this.portTable[srcNode.type];
    if (!dstSpec || !srcSpec) {
      throw new EdgeRefusedError("node type missing from the port table");
    }
    const portSpec = dstSpec.inputs.find((p) => p.name === port);
    if (!portSpec) {
      throw new EdgeRefusedError(`node type '${dstNode.type}' has no input port '${port}'`);
    }
    if (!portSpec.kinds.includes(srcSpec.output)) {
      throw new EdgeRefusedError(
        `port '${port}' of '${dst}' accepts ${portSpec.kinds.join("|")}, ` +
          `but '${src}' outputs '${srcSpec.output}'`,
      );
    }
    if (!portSpec.variadic && this.edges.some((e) => e.dst === dst && e.port === port)) {
      throw new EdgeRefusedError(`port '${port}' of '${dst}' already has an edge`);
    }
    if (this.wouldCycle(src, dst)) {
      throw new EdgeRefusedError(`edge ${src} -> ${dst} would create a cycle`);
    }
    const edge: CanvasEdge = { src, dst, port };
    this.edges.push(edge);
    this.dirty = true;
    return edge;
  }

  disconnect(src: string, dst: string, port: string): void {
    const i = this.edges.findIndex((e) => e.src === src && e.dst === dst && e.port === port);
    if (i >= 0) {
      this.edges.splice(i, 1);
      this.dirty = true;
    }
  }

  private wouldCycle(src: string, dst: string): boolean {
    if (src === dst) {
      return true;
    }
    // can src be reached from dst by existing edges?
    const stack = [dst];
    const seen = new Set<string>();
    while (stack.length) {
      const cur = stack.pop()!;
      for (const e of this.edges) {
        if (e.src === cur && !seen.has(e.dst)) {
          if (e.dst === src) {
            return true;
          }
          seen.add(e.dst);
          stack.push(e.dst);
        }
      }
    }
    return false;
  }

  private mustGet(id: string): CanvasNode {
    const node = this.nodes.get(id);
    if (!node) {
      throw new Error(`no node '${id}' on the canvas`);
    }
    return node;
  }

  /** Export strips positions and badges; the result is a server GraphSpec. */
  export(): GraphDoc {
    return {
      version: "1",
      nodes: [...this.nodes.values()].map((n) => ({
        id: n.id,
        type: n.type,
        params: structuredClone(n.params),
      })),
      edges: this.edges.map((e) => [e.src, e.dst, e.port] as [string, string, string]),
    };
  }

  exportCanonical(): string {
    return canonicalGraphDoc(this.export());
  }

  /** Import a server document; fresh positions are assigned in a grid. */
  static import(doc: GraphDoc, portTable: PortTable): CanvasGraph {
    const graph = new CanvasGraph(portTable);
    let i = 0;
    for (const n of doc.nodes) {
      const node = graph.addNode(n.type, (i % 4) * 180, Math.floor(i / 4) * 120, n.id);
      node.params = structuredClone(n.params);
      i += 1;
    }
    for (const [src, dst, port] of doc.edges) {
      graph.connect(src, dst, port);
    }
    graph.dirty = false;
    return graph;
  }

  /** Surface server-side diagnostics inline on the offending nodes. */
  applyDiagnostics(diagnostics: Diagnostic[]): void {
    for (const node of this.nodes.values()) {
      node.badges = [];
    }
    for (const d of diagnostics) {
      if (d.node_id !== null) {
        this.nodes.get(d.node_id)?.badges.push(`${d.code}: ${d.message}`);
      }
    }
  }
}
