"""Node registry: typed ports, parameter contracts, and the runner behind
each node type.

Payload kinds: table, model, metrics, plot, scores, mask.  Table payloads
accumulate the fitted preprocessing chain in meta["chain"]; the classifier
node freezes that chain into the TrainedModel so saved experiments can be
retested without refitting.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from ..analytics import (
    DEFAULT_GRIDS,
    EnsembleModel,
    FeatureTable,
    Metrics,
    SearchBudget,
    TrainedModel,
    custom_transform,
    evaluate_model,
    grid_search_cv,
    heatmap_order,
    hyperparameter_search,
    kmeans,
    read_table,
    run_selector,
    scale,
    split_random,
    train_classifier,
    tsne_embed,
)
from ..analytics.metrics import auc_score
from ..analytics.models import _make_impl, stratified_folds
from .spec import canonical_json

PAYLOAD_KINDS = ("table", "model", "metrics", "plot", "scores", "mask")


@dataclass
class Payload:
    kind: str
    data: object
    meta: dict = field(default_factory=dict)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.kind.encode())
        if self.kind == "table":
            t: FeatureTable = self.data
            h.update(canonical_json([t.rows, t.columns, t.split]).encode())
            h.update(canonical_json([str(l) for l in t.labels]).encode())
            h.update(np.ascontiguousarray(t.values).tobytes())
        elif self.kind == "model":
            m = self.data
            kind = getattr(m, "kind", "ensemble")
            h.update(canonical_json({"kind": kind}).encode())
            table = self.meta.get("table")
            if table is not None:
                h.update(np.ascontiguousarray(m.predict_scores(table)).tobytes())
        elif self.kind == "metrics":
            h.update(canonical_json(self.data.to_doc()).encode())
        elif self.kind == "mask":
            h.update(np.packbits(self.data.bitmap).tobytes())
        else:
            h.update(canonical_json(self.data).encode())
        return h.hexdigest()


@dataclass
class RunContext:
    data_dir: Path | None = None
    seed: int | None = None
    extras: dict = field(default_factory=dict)  # e.g. service-side table sources

    def resolve(self, path: str) -> Path:
        p = Path(path)
        if not p.is_absolute() and self.data_dir is not None:
            p = self.data_dir / p
        return p


@dataclass(frozen=True)
class Port:
    name: str
    kinds: tuple[str, ...]
    required: bool = True
    variadic: bool = False


@dataclass(frozen=True)
class NodeType:
    name: str
    inputs: tuple[Port, ...]
    output: str
    runner: Callable
    required_params: tuple[str, ...] = ()
    key_extra: Callable | None = None  # extra cache-key material (data content)


class NodeError(RuntimeError):
    pass


def _single(inputs: dict, port: str) -> Payload:
    return inputs[port][0]


def _chained_table(payload: Payload) -> tuple[FeatureTable, list]:
    return payload.data, list(payload.meta.get("chain", []))


def _table_payload(table: FeatureTable, chain: list, **meta) -> Payload:
    return Payload("table", table, {"chain": chain, **meta})


# --- loaders -------------------------------------------------------------------


def _run_table_input(ctx: RunContext, params: dict, inputs) -> Payload:
    if "path" in params:
        table = read_table(ctx.resolve(params["path"]))
    elif "inline" in params:
        d = params["inline"]
        table = FeatureTable(rows=list(d["rows"]), columns=list(d["columns"]),
                             values=np.asarray(d["values"], dtype=np.float64),
                             labels=list(d.get("labels", [])),
                             split=list(d.get("split", [])))
    else:
        raise NodeError("table-input needs a 'path' or 'inline' parameter")
    if "split" in params:
        sp = params["split"]
        seed = sp.get("seed", ctx.seed if ctx.seed is not None else 0)
        table = split_random(table, sp.get("fraction", 0.8), seed,
                             sp.get("stratified", False))
    return _table_payload(table, chain=[])


def _key_table_input(ctx: RunContext, params: dict) -> str:
    if "path" in params:
        try:
            return hashlib.sha256(ctx.resolve(params["path"]).read_bytes()).hexdigest()
        except OSError:
            return "missing-file"
    return ""


def _run_annotated_input(ctx: RunContext, params: dict, inputs) -> Payload:
    source = ctx.extras.get("annotated_source")
    if source is None:
        raise NodeError("annotated-input is only available with the service's feature store")
    table = source(params)
    if "split" in params:
        sp = params["split"]
        seed = sp.get("seed", ctx.seed if ctx.seed is not None else 0)
        table = split_random(table, sp.get("fraction", 0.8), seed,
                             sp.get("stratified", False))
    return _table_payload(table, chain=[])


def _key_annotated_input(ctx: RunContext, params: dict) -> str:
    fingerprint = ctx.extras.get("annotated_fingerprint")
    return fingerprint(params) if fingerprint else ""


# --- preprocessing -------------------------------------------------------------


def _run_scaler(ctx, params, inputs) -> Payload:
    table, chain = _chained_table(_single(inputs, "table"))
    out, step = scale(table, params["kind"])
    return _table_payload(out, chain + [step])


def _run_custom_transform(ctx, params, inputs) -> Payload:
    table, chain = _chained_table(_single(inputs, "table"))
    out, step = custom_transform(table, params["expression"], params.get("columns"))
    return _table_payload(out, chain + [step])


def _run_selector_node(kind):
    def run(ctx, params, inputs) -> Payload:
        table, chain = _chained_table(_single(inputs, "table"))
        result = run_selector(table, kind, params)
        return _table_payload(result.table, chain + [result.step],
                              scores=result.scores, info=result.info)
    return run


def _run_select_stable(ctx, params, inputs) -> Payload:
    from ..analytics import select_stable

    table, chain = _chained_table(_single(inputs, "table"))
    result = select_stable(table, params["k"], params["selectors"])
    return _table_payload(result.table, chain + [result.step], scores=result.scores)


def _run_column_select(ctx, params, inputs) -> Payload:
    from ..analytics.selection import FittedSelect

    table, chain = _chained_table(_single(inputs, "table"))
    step = FittedSelect(list(params["columns"]))
    return _table_payload(step.apply(table), chain + [step])


# --- models ---------------------------------------------------------------------


def _cv_objective(table: FeatureTable, kind: str, folds: int, seed: int, r_max: float):
    """Search objective: mean CV AUC where resource r scales the per-fold
    training fraction (r = r_max uses every training row)."""
    sub = table.select_rows(table.fit_indices())
    y, _ = sub.binary_labels()
    fold_members = stratified_folds(y, folds, seed)

    def objective(config: dict, resource: float) -> float:
        frac = max(min(resource / r_max, 1.0), 0.05)
        aucs = []
        for f, val_members in enumerate(fold_members):
            tr = np.setdiff1d(np.arange(len(y)), val_members)
            # deterministic per-fold subsample: keep a class-balanced prefix
            keep = max(2, int(np.floor(frac * len(tr))))
            rng = np.random.default_rng(seed * 1000 + f)
            tr = tr[rng.permutation(len(tr))][:keep]
            if len(np.unique(y[tr])) < 2 or len(np.unique(y[val_members])) < 2:
                continue
            impl = _make_impl(kind, config).fit(sub.values[tr], y[tr])
            aucs.append(auc_score(y[val_members], impl.predict_scores(sub.values[val_members])))
        return float(np.mean(aucs)) if aucs else 0.0

    return objective


def _run_classifier(ctx, params, inputs) -> Payload:
    payload = _single(inputs, "table")
    table, chain = _chained_table(payload)
    kind = params["kind"]
    folds = params.get("folds", 5)
    seed = params.get("seed", ctx.seed if ctx.seed is not None else 0)
    meta: dict = {}

    if "tuning" in params:
        tn = dict(params["tuning"])
        budget = SearchBudget(
            strategy=tn.get("strategy", "random"),
            r_max=tn.get("r_max", 27),
            eta=tn.get("eta", 3),
            total_budget=tn.get("budget"),
            seed=tn.get("seed", seed),
        )
        space = tn.get("space") or tn.get("queue")
        if space is None:
            raise NodeError("tuning needs a 'space' (random/hyperband) or 'queue' (fifo)")
        objective = _cv_objective(table, kind, folds, seed, budget.r_max)
        result = hyperparameter_search(objective, space, budget)
        model = train_classifier(table, kind, result.best_config)
        meta["trials"] = [
            {"config": t.config, "resource": t.resource, "score": t.score,
             "bracket": t.bracket, "rung": t.rung}
            for t in result.trials
        ]
        meta["consumed"] = result.consumed
        meta["brackets"] = result.brackets
    elif params.get("grid") is not None or params.get("grid_search", True):
        model = grid_search_cv(table, kind, params.get("grid"), folds, seed)
        meta["cv_table"] = model.cv_table
    else:
        hp = dict(params.get("params", {}))
        hp.setdefault("seed", seed)
        model = train_classifier(table, kind, hp)
    model.chain = chain
    return Payload("model", model, {"table": table, **meta})


def _run_ensemble(ctx, params, inputs) -> Payload:
    members = [p.data for p in inputs["models"]]
    model = EnsembleModel(members, params.get("mode", "averaging"))
    table = inputs["models"][0].meta.get("table")
    return Payload("model", model, {"table": table})


def _run_metrics(ctx, params, inputs) -> Payload:
    model_payload = _single(inputs, "model")
    model = model_payload.data
    seed = params.get("permutation_seed", 0)
    if "test" in inputs and inputs["test"]:
        raw = inputs["test"][0].data
        table = model.apply_chain(raw)
        split = params.get("split", "test")
    else:
        table = model_payload.meta.get("table")
        if table is None:
            raise NodeError("metrics node needs a model with an attached table or a test input")
        split = params.get("split", "validation")
    metrics = evaluate_model(model, table, split, permutation_seed=seed)
    return Payload("metrics", metrics)


# --- visualization ---------------------------------------------------------------


def _run_heatmap(ctx, params, inputs) -> Payload:
    table, _ = _chained_table(_single(inputs, "table"))
    rows_d, cols_d = heatmap_order(table.values)
    data = {
        "rows": table.rows,
        "columns": table.columns,
        "values": table.values.tolist(),
        "row_order": rows_d.leaf_order,
        "col_order": cols_d.leaf_order,
        "row_merges": [list(m) for m in rows_d.merges],
        "col_merges": [list(m) for m in cols_d.merges],
    }
    return Payload("plot", data)


def _run_tsne(ctx, params, inputs) -> Payload:
    table, _ = _chained_table(_single(inputs, "table"))
    coords, kl = tsne_embed(
        table.values,
        perplexity=params.get("perplexity", 30),
        iterations=params.get("iterations", 1000),
        seed=params.get("seed", 0),
    )
    data = {
        "rows": table.rows,
        "coords": coords.tolist(),
        "labels": [str(l) for l in table.labels],
        "kl_final": kl[-1],
    }
    return Payload("plot", data)


def _run_kmeans(ctx, params, inputs) -> Payload:
    table, _ = _chained_table(_single(inputs, "table"))
    assign, inertia, _, _ = kmeans(table.values, params["k"], params.get("seed", 0))
    data = {"rows": table.rows, "assignments": assign.tolist(), "inertia": inertia}
    return Payload("scores", data)


_TABLE_IN = (Port("table", ("table",)),)

REGISTRY: dict[str, NodeType] = {}


def _register(nt: NodeType):
    REGISTRY[nt.name] = nt


_register(NodeType("table-input", (), "table", _run_table_input, (), _key_table_input))
_register(NodeType("annotated-input", (), "table", _run_annotated_input, (),
                   _key_annotated_input))
_register(NodeType("scaler", _TABLE_IN, "table", _run_scaler, ("kind",)))
_register(NodeType("custom-transform", _TABLE_IN, "table", _run_custom_transform,
                   ("expression",)))
_register(NodeType("variance-threshold", _TABLE_IN, "table",
                   _run_selector_node("variance-threshold")))
_register(NodeType("select-k-best", _TABLE_IN, "table",
                   _run_selector_node("select-k-best")))
_register(NodeType("select-from-model", _TABLE_IN, "table",
                   _run_selector_node("select-from-model")))
_register(NodeType("rfe", _TABLE_IN, "table", _run_selector_node("rfe")))
_register(NodeType("select-stable", _TABLE_IN, "table", _run_select_stable,
                   ("k", "selectors")))
_register(NodeType("column-select", _TABLE_IN, "table", _run_column_select, ("columns",)))
_register(NodeType("classifier", _TABLE_IN, "model", _run_classifier, ("kind",)))
_register(NodeType("ensemble", (Port("models", ("model",), variadic=True),),
                   "model", _run_ensemble))
_register(NodeType("metrics",
                   (Port("model", ("model",)),
                    Port("test", ("table",), required=False)),
                   "metrics", _run_metrics))
_register(NodeType("heatmap", _TABLE_IN, "plot", _run_heatmap))
_register(NodeType("tsne", _TABLE_IN, "plot", _run_tsne))
_register(NodeType("kmeans", _TABLE_IN, "scores", _run_kmeans, ("k",)))


def port_type_table() -> dict:
    """The UI's single source of truth for drop-time edge legality."""
    return {
        name: {
            "inputs": [
                {"name": p.name, "kinds": list(p.kinds), "required": p.required,
                 "variadic": p.variadic}
                for p in nt.inputs
            ],
            "output": nt.output,
            "required_params": list(nt.required_params),
        }
        for name, nt in sorted(REGISTRY.items())
    }
