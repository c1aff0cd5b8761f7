"""Seeded random scenes, views and budgets for tests and benchmarks."""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .scene import (
    PointCloudModel,
    PriorityWeights,
    RepresentationLadder,
    Scene,
    ViewState,
)


@dataclass(frozen=True)
class GeneratorParams:
    n_range: tuple[int, int] = (2, 6)
    # range of L, the index of the minimum level; ladders have L + 1 levels
    level_range: tuple[int, int] = (1, 3)
    bitrate_range: tuple[int, int] = (100_000, 20_000_000)
    extent: float = 20.0
    radius_range: tuple[float, float] = (0.0, 3.0)
    fov_half_deg_range: tuple[float, float] = (20.0, 60.0)
    near_distance_threshold: float = 10.0
    infeasible_probability: float = 0.0
    weights: PriorityWeights = field(default_factory=PriorityWeights)

    def __post_init__(self):
        for name in ("n_range", "level_range", "bitrate_range", "radius_range", "fov_half_deg_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} is empty: {lo} > {hi}")
        if self.n_range[0] < 1:
            raise ValueError("n_range must start at >= 1")
        if self.level_range[0] < 0:
            raise ValueError("level_range must start at >= 0")
        lo, hi = self.bitrate_range
        if lo < 1:
            raise ValueError("bitrates must be >= 1 bps")
        if hi - lo + 1 < self.level_range[1] + 1:
            raise ValueError(
                f"bitrate_range {self.bitrate_range} has fewer than "
                f"{self.level_range[1] + 1} distinct values needed for L={self.level_range[1]}"
            )
        if self.radius_range[0] < 0:
            raise ValueError("radius_range must be non-negative")
        if not 0 < self.fov_half_deg_range[0] <= self.fov_half_deg_range[1] < 180:
            raise ValueError("fov_half_deg_range must lie in (0, 180)")
        if not self.near_distance_threshold > 0 or self.extent <= 0:
            raise ValueError("near_distance_threshold and extent must be positive")
        if not 0.0 <= self.infeasible_probability <= 1.0:
            raise ValueError("infeasible_probability must be in [0, 1]")


@dataclass(frozen=True)
class Instance:
    scene: Scene
    view: ViewState
    budget: int


def instance_rng(seed: int, index: int) -> random.Random:
    """RNG for the ``index``-th instance of a seeded stream; independent of other indices."""
    return random.Random(f"{seed}:{index}")


def random_unit(rng: random.Random) -> tuple[float, float, float]:
    while True:
        v = (rng.gauss(0, 1), rng.gauss(0, 1), rng.gauss(0, 1))
        norm = math.sqrt(sum(c * c for c in v))
        if norm > 1e-6:
            return tuple(c / norm for c in v)


def random_point(rng: random.Random, extent: float) -> tuple[float, float, float]:
    return tuple(rng.uniform(-extent, extent) for _ in range(3))


def random_ladder(rng: random.Random, levels: int, bitrate_range: tuple[int, int]) -> RepresentationLadder:
    lo, hi = bitrate_range
    return RepresentationLadder(tuple(sorted(rng.sample(range(lo, hi + 1), levels), reverse=True)))


def random_scene(rng: random.Random, params: GeneratorParams, n: Optional[int] = None, L: Optional[int] = None) -> Scene:
    n = rng.randint(*params.n_range) if n is None else n
    L = rng.randint(*params.level_range) if L is None else L
    models = tuple(
        PointCloudModel(
            id=f"m{i}",
            ladder=random_ladder(rng, L + 1, params.bitrate_range),
            center=random_point(rng, params.extent),
            radius=rng.uniform(*params.radius_range),
        )
        for i in range(n)
    )
    return Scene(models, L + 1)


def random_view(rng: random.Random, params: GeneratorParams) -> ViewState:
    return ViewState(
        position=random_point(rng, params.extent),
        forward=random_unit(rng),
        fov_half_angle=math.radians(rng.uniform(*params.fov_half_deg_range)),
        near_distance_threshold=params.near_distance_threshold,
    )


def random_budget(rng: random.Random, scene: Scene, infeasible_probability: float = 0.0) -> int:
    floor_total = sum(m.ladder.floor for m in scene.models)
    top_total = sum(m.ladder.top for m in scene.models)
    if floor_total > 0 and rng.random() < infeasible_probability:
        return rng.randint(0, floor_total - 1)
    return rng.randint(floor_total, top_total)


def generate_instance(params: GeneratorParams, rng: random.Random, feasible_only: bool = False) -> Instance:
    scene = random_scene(rng, params)
    view = random_view(rng, params)
    p = 0.0 if feasible_only else params.infeasible_probability
    return Instance(scene, view, random_budget(rng, scene, p))


def generate_instances(
    params: GeneratorParams, seed: int, count: Optional[int] = None
) -> Iterator[Instance]:
    """Deterministic stream of instances; infinite unless ``count`` is given."""
    indices = itertools.count() if count is None else range(count)
    for i in indices:
        yield generate_instance(params, instance_rng(seed, i))
