"""Exact multiple-choice knapsack solver for small instances, and gap studies.

The solver enumerates one level per model depth-first, pruning any branch
whose committed bitrate plus the minimum bitrate of the models still to be
decided exceeds the budget. It exists to check the greedy allocator, so it
is capped at a small number of models.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .allocator import InfeasibleBudget, allocate, as_number, baseline_quality, boundary_bound, w_min
from .generator import GeneratorParams, generate_instance, instance_rng
from .prioritizer import PrioritizationConfig, prioritize
from .scene import PrioritizedModel

DEFAULT_CAP = 12


class OracleCapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    optimal_quality: Fraction
    optimal_levels: tuple[int, ...]
    enumerated_count: int


def solve_exact(
    prioritized: Sequence[PrioritizedModel], budget: int, cap: int = DEFAULT_CAP
) -> OracleResult:
    """Maximize total quality over every feasible one-level-per-model choice.

    Among maximizers the lexicographically smallest level vector (in the
    given model order) is returned.
    """
    n = len(prioritized)
    if n > cap:
        raise OracleCapExceeded(f"{n} models exceeds the oracle cap of {cap}")
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    floor_total = w_min(prioritized)
    if budget < floor_total:
        raise InfeasibleBudget(budget, floor_total)

    # integer weights over a common denominator keep the inner loop exact and fast
    denom = math.lcm(*(pm.coefficient.denominator for pm in prioritized)) if n else 1
    weights = [int(pm.coefficient * denom) for pm in prioritized]
    ladders = [pm.model.ladder.levels for pm in prioritized]
    # suffix_min[i] = minimum bitrate still owed by models i..n-1
    suffix_min = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix_min[i] = suffix_min[i + 1] + ladders[i][-1]

    best_value = -1
    best_levels: tuple[int, ...] = ()
    count = 0
    chosen = [0] * n

    def search(i: int, spent: int, value: int) -> None:
        nonlocal best_value, best_levels, count
        if i == n:
            count += 1
            if value > best_value:
                best_value = value
                best_levels = tuple(chosen)
            return
        limit = budget - spent - suffix_min[i + 1]
        levels = ladders[i]
        w = weights[i]
        for k, b in enumerate(levels):
            if b > limit:
                continue
            chosen[i] = k
            search(i + 1, spent + b, value + w * b)

    search(0, 0, 0)
    return OracleResult(Fraction(best_value, denom), best_levels, count)


@dataclass(frozen=True)
class GapRow:
    trial: int
    n: int
    L: int
    W: int
    heuristic_q: Fraction
    optimal_q: Fraction
    baseline_q: Fraction
    bound_term: int

    @property
    def abs_gap(self) -> Fraction:
        return self.optimal_q - self.heuristic_q

    @property
    def rel_gap(self) -> Fraction:
        if self.optimal_q == 0:
            return Fraction(0)
        return self.abs_gap / self.optimal_q


@dataclass(frozen=True)
class GapReport:
    rows: tuple[GapRow, ...] = field(default_factory=tuple)

    def summary(self) -> dict:
        if not self.rows:
            return {"trials": 0}
        out = {"trials": len(self.rows)}
        for name in ("abs_gap", "rel_gap"):
            values = [getattr(r, name) for r in self.rows]
            out[name] = {
                "min": float(min(values)),
                "mean": float(sum(values) / len(values)),
                "max": float(max(values)),
            }
        out["optimal_hits"] = sum(1 for r in self.rows if r.abs_gap == 0)
        return out


def gap_row(trial: int, prioritized: Sequence[PrioritizedModel], budget: int, cap: int = DEFAULT_CAP) -> GapRow:
    heuristic = allocate(prioritized, budget)
    exact = solve_exact(prioritized, budget, cap)
    return GapRow(
        trial=trial,
        n=len(prioritized),
        L=prioritized[0].model.ladder.max_level,
        W=budget,
        heuristic_q=heuristic.total_quality,
        optimal_q=exact.optimal_quality,
        baseline_q=baseline_quality(prioritized),
        bound_term=boundary_bound(heuristic),
    )


def gap_report(
    params: GeneratorParams,
    trials: int,
    seed: int,
    config: Optional[PrioritizationConfig] = None,
    cap: int = DEFAULT_CAP,
) -> GapReport:
    """Compare greedy and exact quality on ``trials`` random feasible instances."""
    if params.n_range[1] > cap:
        raise OracleCapExceeded(f"n up to {params.n_range[1]} exceeds the oracle cap of {cap}")
    config = config or PrioritizationConfig(weights=params.weights)
    rows = []
    for t in range(trials):
        # per-trial seeds depend only on (seed, t)
        inst = generate_instance(params, instance_rng(seed, t), feasible_only=True)
        ordered = prioritize(inst.scene, inst.view, config)
        rows.append(gap_row(t, ordered, inst.budget, cap))
    return GapReport(tuple(rows))


GAP_COLUMNS = ["trial", "n", "L", "W", "heuristic_q", "optimal_q", "abs_gap", "rel_gap", "paper_bound_term"]


def gap_csv(report: GapReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(GAP_COLUMNS)
    for r in report.rows:
        writer.writerow(
            [r.trial, r.n, r.L, r.W, as_number(r.heuristic_q), as_number(r.optimal_q), as_number(r.abs_gap), as_number(r.rel_gap), r.bound_term]
        )
    return buf.getvalue()
