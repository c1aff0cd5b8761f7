"""Viewport-based priority classes.

A model is visible when its bounding sphere intersects the view cone around
``forward``. Visible models within the near threshold get C1, visible models
beyond it get C2, everything else C3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .scene import (
    PointCloudModel,
    PrioritizedModel,
    PriorityClass,
    PriorityWeights,
    Scene,
    ViewState,
)


@dataclass(frozen=True)
class PrioritizationConfig:
    weights: PriorityWeights = field(default_factory=PriorityWeights)
    # copied into ViewState when a session or CLI view is built; None means "take it from the view"
    near_distance_threshold: Optional[float] = None

    def __post_init__(self):
        if self.near_distance_threshold is not None and not self.near_distance_threshold > 0:
            raise ValueError("near_distance_threshold must be positive")


def _offset(view: ViewState, model: PointCloudModel) -> tuple[tuple[float, float, float], float]:
    px, py, pz = view.position
    cx, cy, cz = model.center
    d = (cx - px, cy - py, cz - pz)
    return d, math.sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])


def distance(view: ViewState, model: PointCloudModel) -> float:
    return _offset(view, model)[1]


def visibility(view: ViewState, model: PointCloudModel) -> bool:
    """True iff the model's bounding sphere intersects the view cone."""
    d, dist = _offset(view, model)
    if dist <= model.radius:
        return True
    fx, fy, fz = view.forward
    cos_angle = (d[0] * fx + d[1] * fy + d[2] * fz) / dist
    angle = math.acos(max(-1.0, min(1.0, cos_angle)))
    return angle <= view.fov_half_angle + math.asin(min(1.0, model.radius / dist))


def classify(view: ViewState, model: PointCloudModel) -> PriorityClass:
    if not visibility(view, model):
        return PriorityClass.C3
    if distance(view, model) <= view.near_distance_threshold:
        return PriorityClass.C1
    return PriorityClass.C2


def prioritize(scene: Scene, view: ViewState, config: PrioritizationConfig) -> list[PrioritizedModel]:
    """Tag every model with its class and coefficient, highest priority first.

    Order is coefficient desc, then q_max desc, then id asc.
    """
    coefficient = {k: config.weights.of(k) for k in PriorityClass}
    rank = {k: -int(k) for k in PriorityClass}
    c1, c2, c3 = PriorityClass.C1, PriorityClass.C2, PriorityClass.C3
    px, py, pz = view.position
    fx, fy, fz = view.forward
    fov = view.fov_half_angle
    near = view.near_distance_threshold
    sqrt, acos, asin = math.sqrt, math.acos, math.asin
    tagged = []
    keys = []
    # same geometry as classify(), inlined: this loop runs once per model per interval
    for model in scene.models:
        cx, cy, cz = model.center
        dx, dy, dz = cx - px, cy - py, cz - pz
        dist = sqrt(dx * dx + dy * dy + dz * dz)
        r = model.radius
        if dist <= r:
            visible = True
        else:
            cos_angle = (dx * fx + dy * fy + dz * fz) / dist
            angle = acos(max(-1.0, min(1.0, cos_angle)))
            visible = angle <= fov + asin(min(1.0, r / dist))
        klass = (c1 if dist <= near else c2) if visible else c3
        tagged.append(PrioritizedModel(model, klass, coefficient[klass]))
        # Weights are strictly ordered by class, so class rank orders coefficients, and
        # within one class q_max = p * top orders like top. Integer keys keep the sort cheap.
        keys.append((rank[klass], -model.ladder.levels[0], model.id))
    order = sorted(range(len(tagged)), key=keys.__getitem__)
    return [tagged[i] for i in order]
