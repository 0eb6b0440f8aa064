from .engine import (
    STATUS_ERROR,
    STATUS_OK,
    STATUS_PENDING,
    STATUS_SKIPPED,
    Diagnostic,
    ExecutionCache,
    NodeResult,
    RunRecord,
    cache_key,
    execute,
    validate,
)
from .nodes import REGISTRY, Payload, RunContext, port_type_table
from .records import ExperimentRecord, ExperimentStore, RecordError
from .spec import EdgeSpec, GraphSpec, GraphSpecError, NodeSpec, from_doc, parse, render, to_doc

__all__ = [
    "STATUS_ERROR", "STATUS_OK", "STATUS_PENDING", "STATUS_SKIPPED",
    "Diagnostic", "ExecutionCache", "NodeResult", "RunRecord",
    "cache_key", "execute", "validate",
    "REGISTRY", "Payload", "RunContext", "port_type_table",
    "ExperimentRecord", "ExperimentStore", "RecordError",
    "EdgeSpec", "GraphSpec", "GraphSpecError", "NodeSpec",
    "from_doc", "parse", "render", "to_doc",
]
