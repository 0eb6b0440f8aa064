"""FeatureTable: the ROI x feature matrix flowing through pipelines.

Serialized as CSV with columns roi_id, label, split, then one column per
feature; float cells use repr() so round-trips are bit-exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

SPLITS = ("train", "validation", "test", "unassigned")


class TableError(ValueError):
    pass


@dataclass
class FeatureTable:
    rows: list[str]
    columns: list[str]
    values: np.ndarray  # (n_rows, n_cols) float64
    labels: list = field(default_factory=list)  # per-row class value, None if unlabeled
    split: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.rows), len(self.columns)):
            raise TableError(
                f"matrix shape {self.values.shape} != ({len(self.rows)}, {len(self.columns)})"
            )
        if len(set(self.rows)) != len(self.rows):
            raise TableError("duplicate row ids")
        if len(set(self.columns)) != len(self.columns):
            raise TableError("duplicate column names")
        if not self.labels:
            self.labels = [None] * len(self.rows)
        if not self.split:
            self.split = ["unassigned"] * len(self.rows)
        if len(self.labels) != len(self.rows) or len(self.split) != len(self.rows):
            raise TableError("labels/split length mismatch")
        bad = [s for s in self.split if s not in SPLITS]
        if bad:
            raise TableError(f"unknown split values: {sorted(set(bad))}")
        if not np.all(np.isfinite(self.values)):
            raise TableError("table contains non-finite values")

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    def split_indices(self, split: str) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.split) == split)

    def fit_indices(self) -> np.ndarray:
        """Rows used to fit scalers/selectors/models: the train rows, or all
        rows when nothing is assigned yet."""
        idx = self.split_indices("train")
        return idx if len(idx) else np.arange(self.n_rows)

    def with_values(self, values: np.ndarray, columns: list[str] | None = None) -> "FeatureTable":
        return FeatureTable(
            rows=list(self.rows),
            columns=list(columns if columns is not None else self.columns),
            values=values,
            labels=list(self.labels),
            split=list(self.split),
        )

    def select_columns(self, columns: list[str]) -> "FeatureTable":
        missing = [c for c in columns if c not in self.columns]
        if missing:
            raise TableError(f"missing columns: {missing}")
        idx = [self.columns.index(c) for c in columns]
        return self.with_values(self.values[:, idx], columns)

    def select_rows(self, indices) -> "FeatureTable":
        indices = np.asarray(indices, dtype=int)
        return FeatureTable(
            rows=[self.rows[i] for i in indices],
            columns=list(self.columns),
            values=self.values[indices],
            labels=[self.labels[i] for i in indices],
            split=[self.split[i] for i in indices],
        )

    def label_array(self) -> np.ndarray:
        if any(l is None for l in self.labels):
            raise TableError("table has unlabeled rows")
        return np.asarray(self.labels, dtype=object)

    def binary_labels(self) -> tuple[np.ndarray, list]:
        """0/1 vector plus the sorted class values; classes[1] is positive."""
        y = self.label_array()
        classes = sorted(set(y.tolist()), key=lambda v: (str(type(v)), v))
        if len(classes) != 2:
            raise TableError(f"need exactly 2 classes, got {classes}")
        return (y == classes[1]).astype(np.float64), classes


def split_random(table: FeatureTable, fraction: float, seed: int = 0,
                 stratified: bool = False) -> FeatureTable:
    """Assign unassigned rows to train/validation; train gets
    floor(fraction * n_unassigned) rows; manual assignments stay put."""
    if not (0.0 <= fraction <= 1.0):
        raise TableError(f"fraction must be in [0, 1], got {fraction}")
    rng = np.random.default_rng(seed)
    split = list(table.split)
    todo = table.split_indices("unassigned")
    n = len(todo)
    if n == 0:
        return replace(table, split=split)
    n_train = int(np.floor(fraction * n))

    if stratified:
        y = np.asarray([table.labels[i] for i in todo], dtype=object)
        classes = sorted(set(y.tolist()), key=lambda v: (str(type(v)), v))
        counts = {c: int((y == c).sum()) for c in classes}
        low = [c for c, k in counts.items() if k < 2]
        if low and 0 < fraction < 1:
            raise TableError(f"classes with < 2 samples cannot be stratified: {low}")
        quota = {c: int(np.floor(fraction * counts[c])) for c in classes}
        leftover = n_train - sum(quota.values())
        remainders = sorted(
            classes, key=lambda c: (-(fraction * counts[c] - quota[c]), str(c))
        )
        for c in remainders[:leftover]:
            quota[c] += 1
        for c in classes:
            members = todo[y == c]
            members = members[rng.permutation(len(members))]
            for j, i in enumerate(members):
                split[i] = "train" if j < quota[c] else "validation"
    else:
        order = todo[rng.permutation(n)]
        for j, i in enumerate(order):
            split[i] = "train" if j < n_train else "validation"
    return replace(table, split=split)


# --- CSV I/O ------------------------------------------------------------------


def _format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_table(table: FeatureTable, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["roi_id", "label", "split", *table.columns])
        for i, rid in enumerate(table.rows):
            w.writerow(
                [rid, _format_cell(table.labels[i]), table.split[i]]
                + [repr(float(v)) for v in table.values[i]]
            )


def read_table(path: str | Path) -> FeatureTable:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TableError(f"{path}: empty file") from None
        if header[:3] != ["roi_id", "label", "split"]:
            raise TableError(f"{path}: header must start with roi_id,label,split")
        columns = header[3:]
        rows, labels, split, data = [], [], [], []
        for rec in reader:
            if not rec:
                continue
            if len(rec) != len(header):
                raise TableError(f"{path}: row {len(rows) + 1} has {len(rec)} cells")
            rows.append(rec[0])
            labels.append(rec[1] if rec[1] != "" else None)
            split.append(rec[2] if rec[2] else "unassigned")
            data.append([float(v) for v in rec[3:]])
    values = np.asarray(data, dtype=np.float64).reshape(len(rows), len(columns))
    return FeatureTable(rows=rows, columns=columns, values=values, labels=labels, split=split)
