import csv
import io
import math
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from viewalloc.prioritizer import PrioritizationConfig, prioritize
from viewalloc.scene import (
    PointCloudModel,
    RepresentationLadder,
    Scene,
    ViewState,
    make_scene,
)

MBPS = 1_000_000
I1_LADDER = [10 * MBPS, 6 * MBPS, 3 * MBPS]


@pytest.fixture
def i1_scene():
    # A in front and near (C1), B in front and far (C2), C behind the camera (C3)
    return make_scene(
        [
            ("A", I1_LADDER, (0.0, 0.0, 5.0), 1.0),
            ("B", I1_LADDER, (0.0, 0.0, 20.0), 1.0),
            ("C", I1_LADDER, (0.0, 0.0, -5.0), 1.0),
        ]
    )


@pytest.fixture
def on_axis_view():
    return ViewState.looking((0, 0, 0), (0, 0, 1), 45.0, 10.0)


@pytest.fixture
def i1(i1_scene, on_axis_view):
    return prioritize(i1_scene, on_axis_view, PrioritizationConfig())


# ---------------------------------------------------------------------------
# hypothesis strategies

coords = st.floats(-100, 100, allow_nan=False, allow_infinity=False)
vec3 = st.tuples(coords, coords, coords)


@st.composite
def unit_vectors(draw):
    v = draw(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)))
    norm = math.sqrt(sum(c * c for c in v))
    if norm < 1e-3:
        return (0.0, 0.0, 1.0)
    return tuple(c / norm for c in v)


@st.composite
def views(draw):
    return ViewState(
        position=draw(vec3),
        forward=draw(unit_vectors()),
        fov_half_angle=draw(st.floats(0.05, math.pi - 0.05)),
        near_distance_threshold=draw(st.floats(0.1, 200)),
    )


@st.composite
def scenes(draw, max_models=6, max_L=3, max_bitrate=50_000_000):
    L = draw(st.integers(0, max_L))
    n = draw(st.integers(1, max_models))
    ids = draw(st.lists(st.text("abcdefgh", min_size=1, max_size=4), min_size=n, max_size=n, unique=True))
    models = []
    for name in ids:
        levels = draw(st.lists(st.integers(1, max_bitrate), min_size=L + 1, max_size=L + 1, unique=True))
        models.append(
            PointCloudModel(
                name,
                RepresentationLadder(tuple(sorted(levels, reverse=True))),
                draw(vec3),
                draw(st.floats(0, 20)),
            )
        )
    return Scene(tuple(models), L + 1)


def recompute_from_rows(intervals_text, allocations_text):
    """Rebuild aggregates from the serialized per-interval rows only."""
    intervals = list(csv.DictReader(io.StringIO(intervals_text)))
    allocs = list(csv.DictReader(io.StringIO(allocations_text)))
    feasible = [r for r in intervals if r["feasible"] == "1"]
    durations = {int(r["interval_index"]): Fraction(float(r["duration_s"])) for r in feasible}
    quality = {int(r["interval_index"]): Fraction(0) for r in feasible}
    for row in allocs:
        quality[int(row["interval_index"])] += Fraction(row["quality"])
    tw = sum(durations[i] * quality[i] for i in durations) / sum(durations.values()) if durations else None
    levels: dict[str, list] = {}
    for row in allocs:
        levels.setdefault(row["id"], []).append((int(row["interval_index"]), int(row["level"])))
    switches = {}
    for model_id, seq in levels.items():
        switches[model_id] = sum(
            1 for (i, a), (j, b) in zip(seq, seq[1:]) if j == i + 1 and a != b
        )
    return tw, quality, switches, len(intervals) - len(feasible)


# ---------------------------------------------------------------------------
# acceptance reporting

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record_criterion():
    def record(label: str, ok: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
