"""Domain types for multi-model point-cloud streaming and the JSON manifest format.

Bitrates are integers in bits per second. Ladders are ordered highest first:
``levels[0]`` is the full-quality representation and ``levels[-1]`` the
minimum acceptable one.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence, Union

Vec3 = tuple[float, float, float]

FORWARD_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RepresentationLadder:
    levels: tuple[int, ...]

    @property
    def top(self) -> int:
        return self.levels[0]

    @property
    def floor(self) -> int:
        return self.levels[-1]

    @property
    def max_level(self) -> int:
        """Index of the minimum acceptable representation."""
        return len(self.levels) - 1


@dataclass(frozen=True)
class PointCloudModel:
    id: str
    ladder: RepresentationLadder
    center: Vec3
    radius: float


@dataclass(frozen=True)
class Scene:
    models: tuple[PointCloudModel, ...]
    ladder_level_count: int

    def __len__(self) -> int:
        return len(self.models)


class PriorityClass(IntEnum):
    """Priority buckets; the integer value orders them so that C1 > C2 > C3."""

    C3 = 1
    C2 = 2
    C1 = 3


def _as_fraction(value: Union[int, float, str, Fraction]) -> Fraction:
    # str() first so that 0.6 becomes 3/5 rather than its binary expansion
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class PriorityWeights:
    c1: Fraction = Fraction(1)
    c2: Fraction = Fraction(3, 5)
    c3: Fraction = Fraction(3, 10)

    def __post_init__(self):
        for name in ("c1", "c2", "c3"):
            object.__setattr__(self, name, _as_fraction(getattr(self, name)))
        if not (1 >= self.c1 > self.c2 > self.c3 > 0):
            raise ValueError(
                "class weights must satisfy 1 >= C1 > C2 > C3 > 0, got "
                f"{self.c1}, {self.c2}, {self.c3}"
            )

    def of(self, klass: PriorityClass) -> Fraction:
        if klass is PriorityClass.C1:
            return self.c1
        if klass is PriorityClass.C2:
            return self.c2
        return self.c3

    @classmethod
    def parse(cls, text: str) -> "PriorityWeights":
        """Parse ``"c1,c2,c3"``, e.g. ``"1.0,0.6,0.3"`` or ``"1,3/5,3/10"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated weights, got {text!r}")
        return cls(*(Fraction(p) for p in parts))


def _norm(v: Sequence[float]) -> float:
    return math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])


@dataclass(frozen=True)
class ViewState:
    position: Vec3
    forward: Vec3
    fov_half_angle: float
    near_distance_threshold: float

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(x) for x in self.position))
        object.__setattr__(self, "forward", tuple(float(x) for x in self.forward))
        if len(self.position) != 3 or len(self.forward) != 3:
            raise ValueError("position and forward must be 3-vectors")
        if abs(_norm(self.forward) - 1.0) > FORWARD_TOLERANCE:
            raise ValueError(f"forward must be a unit vector, |forward| = {_norm(self.forward)!r}")
        if not 0.0 < self.fov_half_angle < math.pi:
            raise ValueError(f"fov_half_angle must lie in (0, pi), got {self.fov_half_angle!r}")
        if not self.near_distance_threshold > 0:
            raise ValueError("near_distance_threshold must be positive")

    @classmethod
    def looking(
        cls,
        position: Sequence[float],
        direction: Sequence[float],
        fov_half_deg: float,
        near: float,
    ) -> "ViewState":
        """Build a view from an arbitrary (non-zero) direction and a half-angle in degrees."""
        length = _norm(direction)
        if length == 0:
            raise ValueError("view direction must be non-zero")
        unit = tuple(float(c) / length for c in direction)
        return cls(tuple(position), unit, math.radians(fov_half_deg), near)


class PrioritizedModel(NamedTuple):
    model: PointCloudModel
    klass: PriorityClass
    coefficient: Fraction

    @property
    def q_max(self) -> Fraction:
        return self.coefficient * self.model.ladder.top


# ---------------------------------------------------------------------------
# validation


def validate_scene(scene: Scene) -> list[str]:
    """Return every violated invariant as a message; an empty list means valid."""
    errors = []
    if not scene.models:
        errors.append("at least one model required (n >= 1 required)")
    if scene.ladder_level_count < 1:
        errors.append(f"ladder_level_count must be >= 1, got {scene.ladder_level_count}")
    seen = set()
    for model in scene.models:
        if model.id in seen:
            errors.append(f"duplicate id {model.id}")
        seen.add(model.id)
        errors.extend(_model_errors(model, scene.ladder_level_count))
    return errors


def _model_errors(model: PointCloudModel, level_count: int) -> Iterable[str]:
    levels = model.ladder.levels
    if len(levels) != level_count:
        yield (
            f"model {model.id}: level-count mismatch, has {len(levels)} levels, "
            f"scene declares {level_count}"
        )
    if not levels:
        yield f"model {model.id}: ladder is empty"
    for b in levels:
        if isinstance(b, bool) or not isinstance(b, int):
            yield f"model {model.id}: bitrate {b!r} is not an integer"
        elif b <= 0:
            yield f"model {model.id}: bitrate {b} must be > 0"
    if any(not a > b for a, b in zip(levels, levels[1:])):
        yield f"model {model.id}: ladder {list(levels)} is not strictly decreasing"
    if not (model.radius >= 0):
        yield f"model {model.id}: radius must be >= 0, got {model.radius}"
    if len(model.center) != 3 or not all(math.isfinite(c) for c in model.center):
        yield f"model {model.id}: center must be a finite 3-vector"


# ---------------------------------------------------------------------------
# manifest I/O


class ManifestError(ValueError):
    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


_TOP_KEYS = {"ladder_levels", "models"}
_MODEL_KEYS = {"id", "levels_bps", "center", "radius"}


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _parse_model(raw, index: int, errors: list[str]) -> PointCloudModel | None:
    if not isinstance(raw, dict):
        errors.append(f"models[{index}]: expected an object")
        return None
    name = raw.get("id")
    label = f"model {name}" if isinstance(name, str) else f"models[{index}]"
    if not isinstance(name, str) or not name:
        errors.append(f"{label}: 'id' must be a non-empty string")
    for key in sorted(set(raw) - _MODEL_KEYS):
        errors.append(f"{label}: unknown key {key!r}")
    missing = [k for k in ("levels_bps", "center", "radius") if k not in raw]
    for key in missing:
        errors.append(f"{label}: missing key {key!r}")
    if missing:
        return None

    levels = raw["levels_bps"]
    center = raw["center"]
    radius = raw["radius"]
    ok = True
    if not isinstance(levels, list) or not all(
        isinstance(b, int) and not isinstance(b, bool) for b in levels
    ):
        errors.append(f"{label}: 'levels_bps' must be a list of integers")
        ok = False
    if not isinstance(center, list) or len(center) != 3 or not all(map(_is_number, center)):
        errors.append(f"{label}: 'center' must be a list of three numbers")
        ok = False
    if not _is_number(radius):
        errors.append(f"{label}: 'radius' must be a number")
        ok = False
    if not ok:
        return None
    return PointCloudModel(
        id=name,
        ladder=RepresentationLadder(tuple(levels)),
        center=tuple(float(c) for c in center),
        radius=float(radius),
    )


def parse_manifest(data) -> Scene:
    """Build a validated Scene from an already-decoded manifest object."""
    if not isinstance(data, dict):
        raise ManifestError(["manifest root must be an object"])
    errors = [f"unknown key {k!r}" for k in sorted(set(data) - _TOP_KEYS)]
    for key in sorted(_TOP_KEYS - set(data)):
        errors.append(f"missing key {key!r}")
    if errors:
        raise ManifestError(errors)
    count = data["ladder_levels"]
    if isinstance(count, bool) or not isinstance(count, int):
        raise ManifestError(["'ladder_levels' must be an integer"])
    raw_models = data["models"]
    if not isinstance(raw_models, list):
        raise ManifestError(["'models' must be a list"])
    models = [_parse_model(raw, i, errors) for i, raw in enumerate(raw_models)]
    if errors:
        raise ManifestError(errors)
    scene = Scene(tuple(models), count)
    problems = validate_scene(scene)
    if problems:
        raise ManifestError(problems)
    return scene


def load_manifest(source: Union[str, bytes]) -> Scene:
    """Parse a manifest document.

    Raises ManifestError; JSON syntax errors report line and column.
    """
    try:
        data = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ManifestError([f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from exc
    return parse_manifest(data)


def scene_to_dict(scene: Scene) -> dict:
    return {
        "ladder_levels": scene.ladder_level_count,
        "models": [
            {
                "id": m.id,
                "levels_bps": list(m.ladder.levels),
                "center": list(m.center),
                "radius": m.radius,
            }
            for m in scene.models
        ],
    }


def dump_manifest(scene: Scene) -> str:
    return json.dumps(scene_to_dict(scene), indent=2) + "\n"


def make_scene(entries: Iterable[tuple[str, Sequence[int], Sequence[float], float]]) -> Scene:
    """Convenience constructor from ``(id, levels, center, radius)`` tuples, validated."""
    models = tuple(
        PointCloudModel(name, RepresentationLadder(tuple(levels)), tuple(float(c) for c in center), float(r))
        for name, levels, center, r in entries
    )
    count = len(models[0].ladder.levels) if models else 0
    scene = Scene(models, count)
    problems = validate_scene(scene)
    if problems:
        raise ManifestError(problems)
    return scene
