"""Column scalers.  Fitted on train rows only, applied to all rows; apply
aligns columns by name so retest tables may permute columns."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .table import FeatureTable, TableError

SCALER_KINDS = ("max-abs", "min-max", "standard", "normalizer")


@dataclass
class FittedScaler:
    kind: str
    columns: list[str]
    params: dict[str, np.ndarray] = field(default_factory=dict)

    def apply(self, table: FeatureTable) -> FeatureTable:
        missing = [c for c in self.columns if c not in table.columns]
        if missing:
            raise TableError(f"scaler expects missing columns: {missing}")
        table = table.select_columns(self.columns)
        x = table.values
        if self.kind == "max-abs":
            scale = self.params["max_abs"]
            out = np.divide(x, scale, out=np.zeros_like(x), where=scale != 0)
        elif self.kind == "min-max":
            lo, hi = self.params["min"], self.params["max"]
            rng = hi - lo
            out = np.divide(x - lo, rng, out=np.zeros_like(x), where=rng != 0)
        elif self.kind == "standard":
            mu, sd = self.params["mean"], self.params["std"]
            out = np.divide(x - mu, sd, out=np.zeros_like(x), where=sd != 0)
        else:  # normalizer: per-row unit Euclidean norm, zero rows unchanged
            norms = np.linalg.norm(x, axis=1, keepdims=True)
            out = np.divide(x, norms, out=x.copy(), where=norms != 0)
        return table.with_values(out)


def fit_scaler(table: FeatureTable, kind: str) -> FittedScaler:
    if kind not in SCALER_KINDS:
        raise ValueError(f"unknown scaler kind {kind!r}; expected one of {SCALER_KINDS}")
    x = table.values[table.fit_indices()]
    params: dict[str, np.ndarray] = {}
    if kind == "max-abs":
        params["max_abs"] = np.abs(x).max(axis=0)
    elif kind == "min-max":
        params["min"] = x.min(axis=0)
        params["max"] = x.max(axis=0)
    elif kind == "standard":
        params["mean"] = x.mean(axis=0)
        params["std"] = x.std(axis=0)  # population sigma; 0 -> column maps to 0
    return FittedScaler(kind=kind, columns=list(table.columns), params=params)


def scale(table: FeatureTable, kind: str) -> tuple[FeatureTable, FittedScaler]:
    fitted = fit_scaler(table, kind)
    return fitted.apply(table), fitted
