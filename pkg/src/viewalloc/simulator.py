"""Trace-driven sessions: re-prioritize and re-allocate once per interval.

Intervals are independent. Unused budget does not carry over, and an
interval whose budget is below W_min is recorded as infeasible instead of
stopping the session.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence

from .allocator import Allocation, InfeasibleBudget, allocate, as_number, w_min
from .prioritizer import PrioritizationConfig, prioritize
from .scene import PriorityClass, Scene, ViewState


@dataclass(frozen=True)
class Interval:
    duration: float
    budget: int
    view: ViewState


@dataclass(frozen=True)
class SessionTrace:
    intervals: tuple[Interval, ...]

    def __post_init__(self):
        if not self.intervals:
            raise ValueError("a session trace needs at least one interval")
        for i, iv in enumerate(self.intervals):
            if not iv.duration > 0:
                raise ValueError(f"interval {i}: duration must be > 0")
            if iv.budget < 0:
                raise ValueError(f"interval {i}: budget must be >= 0")


@dataclass(frozen=True)
class IntervalResult:
    index: int
    duration: float
    budget: int
    w_min: int
    allocation: Optional[Allocation]

    @property
    def feasible(self) -> bool:
        return self.allocation is not None

    @property
    def quality(self) -> Optional[Fraction]:
        return None if self.allocation is None else self.allocation.total_quality


@dataclass(frozen=True)
class SessionReport:
    intervals: tuple[IntervalResult, ...]
    time_weighted_mean_quality: Optional[Fraction]
    mean_interval_quality: Optional[Fraction]
    class_mean_bitrate: dict[str, Optional[Fraction]]
    switch_counts: dict[str, int]
    infeasible_count: int


def summarize(results: Sequence[IntervalResult]) -> SessionReport:
    """Aggregate per-interval results; all totals are derived from ``results`` here."""
    feasible = [r for r in results if r.feasible]
    if feasible:
        # durations are floats; Fraction(float) is exact, so the means are too
        total_time = sum(Fraction(r.duration) for r in feasible)
        tw_mean = sum(Fraction(r.duration) * r.quality for r in feasible) / total_time
        plain_mean = sum(r.quality for r in feasible) / len(feasible)
    else:
        tw_mean = plain_mean = None

    # duration-weighted mean bitrate of every (interval, model) sample in each class
    weighted = {k.name: Fraction(0) for k in sorted(PriorityClass, reverse=True)}
    exposure = dict.fromkeys(weighted, Fraction(0))
    for r in feasible:
        d = Fraction(r.duration)
        for e in r.allocation.entries:
            weighted[e.klass.name] += d * e.bitrate
            exposure[e.klass.name] += d
    class_mean = {k: (weighted[k] / exposure[k] if exposure[k] else None) for k in weighted}

    switches: dict[str, int] = {}
    previous: Optional[dict[str, int]] = None
    for r in results:
        if not r.feasible:
            previous = None
            continue
        current = {e.model_id: e.level for e in r.allocation.entries}
        for model_id, level in current.items():
            switches.setdefault(model_id, 0)
            if previous is not None and previous.get(model_id) != level:
                switches[model_id] += 1
        previous = current

    return SessionReport(
        intervals=tuple(results),
        time_weighted_mean_quality=tw_mean,
        mean_interval_quality=plain_mean,
        class_mean_bitrate=class_mean,
        switch_counts=dict(sorted(switches.items())),
        infeasible_count=len(results) - len(feasible),
    )


def run_interval(scene: Scene, index: int, interval: Interval, config: PrioritizationConfig) -> IntervalResult:
    view = interval.view
    if config.near_distance_threshold is not None:
        view = replace(view, near_distance_threshold=config.near_distance_threshold)
    ordered = prioritize(scene, view, config)
    try:
        allocation = allocate(ordered, interval.budget)
    except InfeasibleBudget:
        allocation = None
    return IntervalResult(index, interval.duration, interval.budget, w_min(scene), allocation)


def run_session(scene: Scene, trace: SessionTrace, config: PrioritizationConfig) -> SessionReport:
    results = [run_interval(scene, i, iv, config) for i, iv in enumerate(trace.intervals)]
    return summarize(results)


# ---------------------------------------------------------------------------
# trace files

TRACE_COLUMNS = [
    "interval_index", "duration_s", "budget_bps",
    "cam_x", "cam_y", "cam_z",
    "fwd_x", "fwd_y", "fwd_z",
    "fov_half_deg", "near_threshold",
]


class TraceError(ValueError):
    pass


def load_trace(text: str) -> SessionTrace:
    """Parse a CSV trace with a header row of TRACE_COLUMNS."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != TRACE_COLUMNS:
        raise TraceError(f"trace header must be: {','.join(TRACE_COLUMNS)}")
    rows = []
    for line_no, row in enumerate(reader, start=2):
        try:
            values = {k.strip(): v.strip() for k, v in row.items()}
            index = int(values["interval_index"])
            fwd = [float(values[k]) for k in ("fwd_x", "fwd_y", "fwd_z")]
            view = ViewState.looking(
                [float(values[k]) for k in ("cam_x", "cam_y", "cam_z")],
                fwd,
                float(values["fov_half_deg"]),
                float(values["near_threshold"]),
            )
            rows.append((index, Interval(float(values["duration_s"]), int(values["budget_bps"]), view)))
        except (TypeError, ValueError, AttributeError) as exc:
            raise TraceError(f"line {line_no}: {exc}") from exc
    rows.sort(key=lambda r: r[0])
    indices = [r[0] for r in rows]
    if indices != list(range(len(rows))):
        raise TraceError("interval_index values must be 0..k-1 without gaps or repeats")
    try:
        return SessionTrace(tuple(iv for _, iv in rows))
    except ValueError as exc:
        raise TraceError(str(exc)) from exc


def dump_trace(trace: SessionTrace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for i, iv in enumerate(trace.intervals):
        v = iv.view
        writer.writerow(
            [i, repr(iv.duration), iv.budget, *map(repr, v.position), *map(repr, v.forward),
             repr(math.degrees(v.fov_half_angle)), repr(v.near_distance_threshold)]
        )
    return buf.getvalue()


# ---------------------------------------------------------------------------
# report output


INTERVAL_COLUMNS = ["interval_index", "duration_s", "budget_bps", "w_min_bps", "feasible",
                    "total_bitrate_bps", "total_quality", "residual_bps"]
ALLOCATION_COLUMNS = ["interval_index", "id", "class", "level", "bitrate_bps", "quality"]


def intervals_csv(report: SessionReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(INTERVAL_COLUMNS)
    for r in report.intervals:
        a = r.allocation
        writer.writerow([
            r.index, repr(r.duration), r.budget, r.w_min, int(r.feasible),
            "" if a is None else a.total_bitrate,
            "" if a is None else as_number(a.total_quality),
            "" if a is None else a.residual_budget,
        ])
    return buf.getvalue()


def allocations_csv(report: SessionReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ALLOCATION_COLUMNS)
    for r in report.intervals:
        if r.allocation is None:
            continue
        for e in r.allocation.entries:
            writer.writerow([r.index, e.model_id, e.klass.name, e.level, e.bitrate, as_number(e.quality)])
    return buf.getvalue()


def report_to_dict(report: SessionReport) -> dict:
    return {
        "intervals": len(report.intervals),
        "infeasible_intervals": report.infeasible_count,
        "time_weighted_mean_quality": as_number(report.time_weighted_mean_quality),
        "mean_interval_quality": as_number(report.mean_interval_quality),
        "interval_quality": [None if r.quality is None else as_number(r.quality) for r in report.intervals],
        "class_mean_bitrate_bps": {k: as_number(v) for k, v in report.class_mean_bitrate.items()},
        "switch_counts": report.switch_counts,
    }


def report_json(report: SessionReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"
