"""Hyperparameter search: random sampling, a FIFO queue, and hyperband.

The objective is a callable (config, resource) -> score to maximize;
`resource` is whatever unit the objective declares (CV training fraction,
boosting rounds, ...).  Every evaluation lands in the trial log with its
resource amount, so budget accounting is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class BudgetError(ValueError):
    pass


@dataclass
class SearchBudget:
    strategy: str  # random | fifo | hyperband
    r_max: float = 81.0  # max resource per configuration (R)
    eta: int = 3  # hyperband downsampling rate
    total_budget: float | None = None  # resource units; None = strategy default
    seed: int = 0

    def __post_init__(self):
        if self.strategy not in ("random", "fifo", "hyperband"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.r_max < 1:
            raise BudgetError("R must be >= 1")
        if self.eta < 2:
            raise BudgetError("eta must be >= 2")
        if self.total_budget is not None and self.total_budget < self.r_max:
            raise BudgetError(
                f"budget {self.total_budget} below one full-resource evaluation ({self.r_max})"
            )


@dataclass
class Trial:
    config_id: int
    config: dict
    resource: float
    score: float
    bracket: int | None = None
    rung: int | None = None


@dataclass
class SearchResult:
    best_config: dict
    best_score: float
    trials: list[Trial] = field(default_factory=list)
    consumed: float = 0.0
    brackets: list[dict] = field(default_factory=list)  # hyperband (s, n, r) table


def _sample_config(space: dict, rng: np.random.Generator) -> dict:
    out = {}
    for name, choices in sorted(space.items()):
        out[name] = choices[int(rng.integers(len(choices)))]
    return out


def hyperband_schedule(r_max: float, eta: int) -> list[dict]:
    """The bracket table [(s, n, r), ...] for brackets s_max..0 with
    n = ceil((s_max+1)/(s+1) * eta^s) and r = R * eta^-s."""
    s_max = int(math.floor(math.log(r_max) / math.log(eta) + 1e-12))
    table = []
    for s in range(s_max, -1, -1):
        n = int(math.ceil((s_max + 1) / (s + 1) * eta ** s))
        r = r_max * eta ** (-s)
        table.append({"s": s, "n": n, "r": r})
    return table


def hyperparameter_search(objective, space, budget: SearchBudget) -> SearchResult:
    """space: dict name -> choices (random/hyperband) or an ordered list of
    configs (fifo)."""
    rng = np.random.default_rng(budget.seed)
    trials: list[Trial] = []
    consumed = 0.0
    best: tuple[float, dict] | None = None
    next_id = 0

    def run(config, resource, bracket=None, rung=None):
        nonlocal consumed, best, next_id
        score = float(objective(config, resource))
        trials.append(Trial(next_id, dict(config), resource, score, bracket, rung))
        next_id += 1
        consumed += resource
        if resource >= budget.r_max and (best is None or score > best[0]):
            best = (score, dict(config))
        return score

    result_brackets: list[dict] = []

    if budget.strategy == "random":
        total = budget.total_budget if budget.total_budget is not None else 10 * budget.r_max
        n_configs = int(total // budget.r_max)
        if n_configs < 1:
            raise BudgetError("budget below one full-resource evaluation")
        for _ in range(n_configs):
            run(_sample_config(space, rng), budget.r_max)

    elif budget.strategy == "fifo":
        if not isinstance(space, (list, tuple)):
            raise ValueError("fifo needs an ordered list of configs")
        total = budget.total_budget if budget.total_budget is not None else math.inf
        for config in space:
            if consumed + budget.r_max > total:
                break
            run(dict(config), budget.r_max)
        if not trials:
            raise BudgetError("budget below one full-resource evaluation")

    else:  # hyperband
        schedule = hyperband_schedule(budget.r_max, budget.eta)
        total = budget.total_budget if budget.total_budget is not None else math.inf
        for bracket in schedule:
            s, n, r = bracket["s"], bracket["n"], bracket["r"]
            # successive-halving cost of this bracket
            cost = sum(
                math.floor(n * budget.eta ** (-i)) * (r * budget.eta ** i)
                for i in range(s + 1)
            )
            if consumed + cost > total:
                break
            configs = [_sample_config(space, rng) for _ in range(n)]
            executed_rungs = []
            for i in range(s + 1):
                n_i = int(math.floor(n * budget.eta ** (-i)))
                r_i = r * budget.eta ** i
                configs = configs[:n_i]
                scores = [run(c, r_i, bracket=s, rung=i) for c in configs]
                executed_rungs.append({"n": len(configs), "r": r_i})
                keep = int(math.floor(n_i / budget.eta))
                if keep >= 1 and i < s:
                    order = np.argsort([-sc for sc in scores], kind="stable")
                    configs = [configs[int(j)] for j in order[:keep]]
            result_brackets.append({"s": s, "n": n, "r": r, "rungs": executed_rungs})
        if not trials:
            raise BudgetError("budget below one hyperband bracket")

    if best is None:
        # hyperband: best at the highest resource seen per config
        by_resource: dict[int, Trial] = {}
        for t in trials:
            cur = by_resource.get(t.config_id)
            if cur is None or t.resource > cur.resource:
                by_resource[t.config_id] = t
        top = max(by_resource.values(), key=lambda t: (t.resource, t.score))
        best = (top.score, top.config)

    return SearchResult(best_config=best[1], best_score=best[0], trials=trials,
                        consumed=consumed, brackets=result_brackets)
