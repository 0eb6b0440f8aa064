"""Graph validation and execution.

Execution is topological with a configurable parallelism; a node error marks
the exact descendant closure skipped-upstream while independent branches
finish normally.  Results are cached by content digest so re-running an
unchanged graph recomputes nothing.
"""

from __future__ import annotations

import hashlib
import threading
import time
import traceback
import uuid
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field

from .nodes import REGISTRY, Payload, RunContext
from .spec import GraphSpec, canonical_json

ENGINE_VERSION = "1"

STATUS_PENDING = "pending"
STATUS_RUNNING = "running"
STATUS_OK = "ok"
STATUS_ERROR = "error"
STATUS_SKIPPED = "skipped-upstream"


@dataclass
class Diagnostic:
    code: str
    node_id: str | None
    message: str

    def to_doc(self):
        return {"code": self.code, "node_id": self.node_id, "message": self.message}


def validate(spec: GraphSpec, registry=None) -> list[Diagnostic]:
    """All violations at once; an empty list means the graph is runnable."""
    registry = registry or REGISTRY
    out: list[Diagnostic] = []
    seen = set()
    for n in spec.nodes:
        if n.node_id in seen:
            out.append(Diagnostic("duplicate-node-id", n.node_id,
                                  f"node id {n.node_id!r} appears more than once"))
        seen.add(n.node_id)

    ids = {n.node_id for n in spec.nodes}
    types = {}
    for n in spec.nodes:
        nt = registry.get(n.node_type)
        if nt is None:
            out.append(Diagnostic("unknown-node-type", n.node_id,
                                  f"unknown node type {n.node_type!r}"))
            continue
        types[n.node_id] = nt
        for p in nt.required_params:
            if p not in n.params:
                out.append(Diagnostic("missing-param", n.node_id,
                                      f"node type {n.node_type!r} requires parameter {p!r}"))

    for e in spec.edges:
        if e.src not in ids or e.dst not in ids:
            out.append(Diagnostic("dangling-edge", e.dst if e.src in ids else e.src,
                                  f"edge {e.src!r} -> {e.dst!r} references a missing node"))
            continue
        src_t = types.get(e.src)
        dst_t = types.get(e.dst)
        if src_t is None or dst_t is None:
            continue
        port = next((p for p in dst_t.inputs if p.name == e.port), None)
        if port is None:
            out.append(Diagnostic("unknown-port", e.dst,
                                  f"node type {dst_t.name!r} has no input port {e.port!r}"))
            continue
        if src_t.output not in port.kinds:
            out.append(Diagnostic(
                "port-kind-mismatch", e.dst,
                f"output kind {src_t.output!r} of {e.src!r} cannot feed port "
                f"{e.port!r} of {e.dst!r} (accepts {list(port.kinds)})"))

    for n in spec.nodes:
        nt = types.get(n.node_id)
        if nt is None:
            continue
        incoming = spec.incoming(n.node_id)
        for p in nt.inputs:
            hits = [e for e in incoming if e.port == p.name]
            if p.required and not hits:
                out.append(Diagnostic("missing-input", n.node_id,
                                      f"required port {p.name!r} has no incoming edge"))
            if not p.variadic and len(hits) > 1:
                out.append(Diagnostic("port-conflict", n.node_id,
                                      f"port {p.name!r} accepts one edge, got {len(hits)}"))

    # cycle detection (Kahn); report every node left on a cycle
    indeg = {n.node_id: 0 for n in spec.nodes}
    adj: dict[str, list[str]] = {n.node_id: [] for n in spec.nodes}
    for e in spec.edges:
        if e.src in ids and e.dst in ids:
            indeg[e.dst] += 1
            adj[e.src].append(e.dst)
    queue = sorted([i for i, d in indeg.items() if d == 0])
    done = 0
    while queue:
        cur = queue.pop(0)
        done += 1
        for nxt in adj[cur]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                queue.append(nxt)
    if done < len(indeg):
        for node_id in sorted(i for i, d in indeg.items() if d > 0):
            out.append(Diagnostic("cycle", node_id, f"node {node_id!r} is part of a cycle"))
    return out


@dataclass
class NodeResult:
    status: str = STATUS_PENDING
    payload: Payload | None = None
    error: str | None = None
    duration: float = 0.0
    cache_key: str = ""
    cached: bool = False

    def to_doc(self):
        return {
            "status": self.status,
            "error": self.error,
            "duration": self.duration,
            "cache_key": self.cache_key,
            "cached": self.cached,
            "payload_kind": self.payload.kind if self.payload else None,
            "payload_digest": self.payload.digest() if self.payload else None,
        }


@dataclass
class RunRecord:
    run_id: str
    spec: GraphSpec
    results: dict[str, NodeResult] = field(default_factory=dict)
    started_at: float = 0.0
    finished_at: float = 0.0

    def statuses(self) -> dict[str, str]:
        return {nid: r.status for nid, r in self.results.items()}


class ExecutionCache:
    """Digest-keyed payload cache shared across runs of one engine."""

    def __init__(self):
        self._lock = threading.Lock()
        self._data: dict[str, Payload] = {}

    def get(self, key: str) -> Payload | None:
        with self._lock:
            return self._data.get(key)

    def put(self, key: str, payload: Payload):
        with self._lock:
            self._data[key] = payload

    def __len__(self):
        return len(self._data)


def cache_key(node_type: str, params: dict, upstream_keys: list[str],
              extra: str = "") -> str:
    doc = {
        "engine": ENGINE_VERSION,
        "type": node_type,
        "params": params,
        "upstream": upstream_keys,
        "extra": extra,
    }
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def execute(spec: GraphSpec, ctx: RunContext | None = None, parallelism: int = 1,
            cache: ExecutionCache | None = None, registry=None) -> RunRecord:
    registry = registry or REGISTRY
    problems = validate(spec, registry)
    if problems:
        raise ValueError("invalid graph: " + "; ".join(d.message for d in problems))
    ctx = ctx or RunContext()
    record = RunRecord(run_id=uuid.uuid4().hex, spec=spec, started_at=time.time())
    results = {n.node_id: NodeResult() for n in spec.nodes}
    record.results = results
    lock = threading.Lock()

    children: dict[str, list[str]] = {n.node_id: [] for n in spec.nodes}
    pending_deps: dict[str, int] = {}
    for n in spec.nodes:
        pending_deps[n.node_id] = len(spec.incoming(n.node_id))
    for e in spec.edges:
        children[e.src].append(e.dst)

    keys: dict[str, str] = {}

    def node_inputs(node_id: str) -> dict[str, list[Payload]]:
        # edge order in the document defines the input order on each port
        inputs: dict[str, list[Payload]] = {}
        for e in spec.incoming(node_id):
            inputs.setdefault(e.port, []).append(results[e.src].payload)
        return inputs

    def run_node(node_id: str):
        node = spec.node(node_id)
        nt = registry[node.node_type]
        upstream = [keys[e.src] for e in spec.incoming(node_id)]
        extra = nt.key_extra(ctx, node.params) if nt.key_extra else ""
        key = cache_key(node.node_type, node.params, upstream, extra)
        keys[node_id] = key
        res = results[node_id]
        res.cache_key = key
        hit = cache.get(key) if cache is not None else None
        if hit is not None:
            res.payload = hit
            res.cached = True
            res.status = STATUS_OK
            res.duration = 0.0
            return
        res.status = STATUS_RUNNING
        start = time.time()
        try:
            payload = nt.runner(ctx, node.params, node_inputs(node_id))
            res.payload = payload
            res.status = STATUS_OK
            if cache is not None:
                cache.put(key, payload)
        except Exception as exc:  # error isolation: per-node status
            res.status = STATUS_ERROR
            res.error = f"{type(exc).__name__}: {exc}"
            res.traceback = traceback.format_exc()  # type: ignore[attr-defined]
        finally:
            res.duration = time.time() - start

    def mark_skipped(node_id: str):
        # descendant closure of an error/skip
        stack = [node_id]
        while stack:
            cur = stack.pop()
            for child in children[cur]:
                if results[child].status in (STATUS_PENDING, STATUS_SKIPPED):
                    if results[child].status != STATUS_SKIPPED:
                        results[child].status = STATUS_SKIPPED
                        stack.append(child)

    ready = [n.node_id for n in spec.nodes if pending_deps[n.node_id] == 0]
    in_flight: dict = {}
    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        while ready or in_flight:
            while ready:
                nid = ready.pop(0)
                if results[nid].status == STATUS_SKIPPED:
                    # children of a skipped node are handled by mark_skipped
                    continue
                in_flight[pool.submit(run_node, nid)] = nid
            if not in_flight:
                break
            done, _ = wait(list(in_flight), return_when=FIRST_COMPLETED)
            for fut in done:
                nid = in_flight.pop(fut)
                fut.result()  # runner never raises; surfaces engine bugs
                with lock:
                    if results[nid].status == STATUS_ERROR:
                        mark_skipped(nid)
                    for child in children[nid]:
                        pending_deps[child] -= 1
                        if pending_deps[child] == 0 and results[child].status != STATUS_SKIPPED:
                            ready.append(child)

    record.finished_at = time.time()
    return record
