"""GraphSpec: the declarative pipeline document.

Wire format (JSON): {"version": ..., "nodes": [{"id", "type", "params"}],
"edges": [[src, dst, port], ...]}.  The canonical rendering sorts nodes by
id, edges by (src, dst, port), and object keys alphabetically, so two
equivalent documents are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SPEC_VERSION = "1"


class GraphSpecError(ValueError):
    pass


@dataclass(frozen=True)
class NodeSpec:
    node_id: str
    node_type: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class EdgeSpec:
    src: str
    dst: str
    port: str


@dataclass(frozen=True)
class GraphSpec:
    nodes: tuple[NodeSpec, ...]
    edges: tuple[EdgeSpec, ...]
    version: str = SPEC_VERSION

    def node(self, node_id: str) -> NodeSpec:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        raise KeyError(node_id)

    def incoming(self, node_id: str) -> list[EdgeSpec]:
        return [e for e in self.edges if e.dst == node_id]

    def outgoing(self, node_id: str) -> list[EdgeSpec]:
        return [e for e in self.edges if e.src == node_id]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def to_doc(spec: GraphSpec, canonical: bool = True) -> dict:
    nodes = [{"id": n.node_id, "type": n.node_type, "params": n.params} for n in spec.nodes]
    edges = [[e.src, e.dst, e.port] for e in spec.edges]
    if canonical:
        nodes.sort(key=lambda n: n["id"])
        edges.sort()
    return {"version": spec.version, "nodes": nodes, "edges": edges}


def render(spec: GraphSpec, canonical: bool = True) -> str:
    return canonical_json(to_doc(spec, canonical))


def from_doc(doc: dict) -> GraphSpec:
    if not isinstance(doc, dict):
        raise GraphSpecError("graph document must be an object")
    try:
        nodes = tuple(
            NodeSpec(str(n["id"]), str(n["type"]), dict(n.get("params", {})))
            for n in doc["nodes"]
        )
        edges = tuple(EdgeSpec(str(s), str(d), str(p)) for s, d, p in doc.get("edges", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphSpecError(f"malformed graph document: {exc}") from exc
    return GraphSpec(nodes=nodes, edges=edges, version=str(doc.get("version", SPEC_VERSION)))


def parse(text: str) -> GraphSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphSpecError(f"graph document is not valid JSON: {exc}") from exc
    return from_doc(doc)
