"""Greedy priority-ordered rate allocation.

Every model starts at its minimum acceptable level. Models are then upgraded
to full quality in priority order while the remaining budget allows; from the
first model that does not fit onward, each model gets the best level that
fits in what is left. Budget bookkeeping is delta-based: upgrading a model
costs ``chosen - floor`` because the floor is already paid for.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence, Union

from .scene import PointCloudModel, PrioritizedModel, PriorityClass, Scene


class InfeasibleBudget(ValueError):
    """Raised when the budget cannot carry every model at its minimum level."""

    def __init__(self, budget: int, w_min: int):
        self.budget = budget
        self.w_min = w_min
        super().__init__(f"budget W={budget} bps is below W_min={w_min} bps")


class AllocationEntry(NamedTuple):
    model_id: str
    klass: PriorityClass
    level: int
    bitrate: int
    coefficient: Fraction

    @property
    def quality(self) -> Fraction:
        return self.coefficient * self.bitrate


@dataclass(frozen=True)
class BudgetTrail:
    w_min: int
    # W_0 .. W_n, residual after each model in priority order
    w_sequence: tuple[int, ...]
    # first model (0-based, priority order) not upgraded to level 0; n if none
    boundary_index: int


@dataclass(frozen=True)
class Allocation:
    # stored column-wise, in priority order; ``entries`` assembles rows on demand
    models: tuple[PrioritizedModel, ...]
    level_indices: tuple[int, ...]
    bitrates: tuple[int, ...]
    budget: int
    total_bitrate: int
    total_quality: Fraction
    residual_budget: int
    trail: BudgetTrail

    @cached_property
    def entries(self) -> tuple[AllocationEntry, ...]:
        return tuple(
            AllocationEntry(pm.model.id, pm.klass, k, b, pm.coefficient)
            for pm, k, b in zip(self.models, self.level_indices, self.bitrates)
        )

    def levels(self) -> tuple[int, ...]:
        return self.level_indices

    def by_id(self) -> dict[str, AllocationEntry]:
        return {e.model_id: e for e in self.entries}


def w_min(models: Union[Scene, Iterable[PointCloudModel], Iterable[PrioritizedModel]]) -> int:
    """Sum of every model's minimum-level bitrate."""
    if isinstance(models, Scene):
        models = models.models
    total = 0
    for m in models:
        if isinstance(m, PrioritizedModel):
            m = m.model
        total += m.ladder.floor
    return total


def _weighted_sum(models: Sequence[PrioritizedModel], bitrates: Sequence[int]) -> Fraction:
    # Group by coefficient object: a handful of Fraction products instead of one per
    # model. Equal coefficients held in distinct objects just land in separate groups.
    sums: dict[int, list] = {}
    for pm, b in zip(models, bitrates):
        c = pm.coefficient
        slot = sums.get(id(c))
        if slot is None:
            sums[id(c)] = [c, b]
        else:
            slot[1] += b
    return sum((c * s for c, s in sums.values()), Fraction(0))


def allocate(prioritized: Sequence[PrioritizedModel], budget: int) -> Allocation:
    """Choose one representation level per model under ``budget`` (bps).

    ``prioritized`` must already be in priority order, as returned by
    ``prioritize``. Raises InfeasibleBudget if ``budget < w_min``.
    """
    if budget < 0:
        raise ValueError(f"budget must be >= 0, got {budget}")
    ladders = [pm.model.ladder.levels for pm in prioritized]
    floor_total = sum([levels[-1] for levels in ladders])
    if budget < floor_total:
        raise InfeasibleBudget(budget, floor_total)

    n = len(ladders)
    residual = budget - floor_total
    trail = [residual]
    chosen = [0] * n

    # full upgrades while they fit
    boundary = n
    for i, levels in enumerate(ladders):
        delta = levels[0] - levels[-1]
        if delta > residual:
            boundary = i
            break
        residual -= delta
        trail.append(residual)

    # from the boundary on: best (lowest-index) level that still fits
    for i in range(boundary, n):
        levels = ladders[i]
        floor = levels[-1]
        headroom = residual + floor
        k = 0
        while levels[k] > headroom:
            k += 1
        chosen[i] = k
        residual -= levels[k] - floor
        trail.append(residual)

    models = tuple(prioritized)
    bitrates = tuple([levels[k] for levels, k in zip(ladders, chosen)])
    return Allocation(
        models=models,
        level_indices=tuple(chosen),
        bitrates=bitrates,
        budget=budget,
        total_bitrate=budget - residual,
        total_quality=_weighted_sum(models, bitrates),
        residual_budget=residual,
        trail=BudgetTrail(floor_total, tuple(trail), boundary),
    )


def total_quality(allocation: Allocation) -> Fraction:
    """Recompute the priority-weighted quality of an allocation from its entries."""
    return sum((e.quality for e in allocation.entries), Fraction(0))


def baseline_quality(prioritized: Sequence[PrioritizedModel]) -> Fraction:
    """Quality of the all-minimum assignment."""
    return sum((pm.coefficient * pm.model.ladder.floor for pm in prioritized), Fraction(0))


def boundary_bound(allocation: Allocation) -> int:
    """Budget left over after the boundary model took its upgrade.

    That is W_{l-1} minus the upgrade chosen at the boundary model l; 0 when
    every model reached full quality. With coefficients at most 1, the gap to
    the optimum never exceeds this value.
    """
    trail = allocation.trail
    if trail.boundary_index >= len(allocation.level_indices):
        return 0
    return trail.w_sequence[trail.boundary_index + 1]


# ---------------------------------------------------------------------------
# report records


def as_number(q):
    """Exact integers stay integers; other fractions become floats for output."""
    if isinstance(q, Fraction):
        return q.numerator if q.denominator == 1 else float(q)
    return q


ALLOCATION_ROW_COLUMNS = ["id", "class", "level", "bitrate_bps", "quality"]


def allocation_to_dict(allocation: Allocation) -> dict:
    trail = allocation.trail
    return {
        "budget_bps": allocation.budget,
        "w_min_bps": trail.w_min,
        "total_bitrate_bps": allocation.total_bitrate,
        "total_quality": as_number(allocation.total_quality),
        "residual_bps": allocation.residual_budget,
        "boundary_index": trail.boundary_index,
        "budget_trail_bps": list(trail.w_sequence),
        "rows": [
            {
                "id": e.model_id,
                "class": e.klass.name,
                "level": e.level,
                "bitrate_bps": e.bitrate,
                "quality": as_number(e.quality),
            }
            for e in allocation.entries
        ],
    }
