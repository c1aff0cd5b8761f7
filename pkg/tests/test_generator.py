import itertools

import pytest

from viewalloc.allocator import w_min
from viewalloc.generator import GeneratorParams, generate_instances
from viewalloc.scene import validate_scene


def test_same_seed_same_stream():
    params = GeneratorParams(infeasible_probability=0.2)
    a = list(generate_instances(params, seed=7, count=25))
    b = list(itertools.islice(generate_instances(params, seed=7), 25))
    assert a == b
    assert a != list(generate_instances(params, seed=8, count=25))


def test_pigeonhole_bitrate_range_rejected():
    with pytest.raises(ValueError, match="distinct"):
        GeneratorParams(level_range=(3, 3), bitrate_range=(1, 2))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_range": (3, 2)},
        {"n_range": (0, 2)},
        {"level_range": (-1, 2)},
        {"bitrate_range": (0, 10)},
        {"fov_half_deg_range": (10, 190)},
        {"infeasible_probability": 1.5},
        {"near_distance_threshold": 0},
    ],
)
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        GeneratorParams(**kwargs)


def test_shape_matches_request():
    params = GeneratorParams(n_range=(3, 3), level_range=(2, 2))
    for inst in generate_instances(params, seed=1, count=50):
        assert validate_scene(inst.scene) == []
        assert len(inst.scene) == 3
        assert inst.scene.ladder_level_count == 3


def test_budgets_in_range_and_infeasible_fraction():
    params = GeneratorParams(infeasible_probability=0.3)
    infeasible = 0
    for inst in generate_instances(params, seed=5, count=500):
        assert validate_scene(inst.scene) == []
        lo = w_min(inst.scene)
        hi = sum(m.ladder.top for m in inst.scene.models)
        assert 0 <= inst.budget <= hi
        infeasible += inst.budget < lo
    assert 100 < infeasible < 200


def test_default_params_never_infeasible():
    for inst in generate_instances(GeneratorParams(), seed=11, count=200):
        assert inst.budget >= w_min(inst.scene)
