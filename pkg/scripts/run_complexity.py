"""Wall time of prioritize + allocate as the model count grows.

    python scripts/run_complexity.py --sizes 25000 50000 100000 200000
"""
import argparse
import gc
import random
import time

from viewalloc.allocator import allocate, w_min
from viewalloc.generator import random_ladder
from viewalloc.prioritizer import PrioritizationConfig, prioritize
from viewalloc.scene import PointCloudModel, Scene, ViewState


def synthetic_scene(n, rng, levels=4):
    models = tuple(
        PointCloudModel(
            f"m{i}",
            random_ladder(rng, levels, (100_000, 20_000_000)),
            (rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)),
            rng.uniform(0, 3),
        )
        for i in range(n)
    )
    return Scene(models, levels)


def best_of(scene, view, repeats):
    config = PrioritizationConfig()
    budget = w_min(scene) + sum(m.ladder.top - m.ladder.floor for m in scene.models) // 2
    gc.collect()
    gc.disable()
    try:
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            ordered = prioritize(scene, view, config)
            t1 = time.perf_counter()
            allocate(ordered, budget)
            times.append((t1 - t0, time.perf_counter() - t1))
    finally:
        gc.enable()
    return min(times, key=sum)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[25_000, 50_000, 100_000, 200_000])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    view = ViewState.looking((0, 0, 0), (0, 0, 1), 45.0, 10.0)
    print(f"{'n':>8} {'prioritize':>11} {'allocate':>9} {'total':>7} {'vs prev':>8}")
    prev = None
    for n in args.sizes:
        tp, ta = best_of(synthetic_scene(n, rng), view, args.repeats)
        total = tp + ta
        ratio = f"{total / prev:.2f}x" if prev else ""
        print(f"{n:>8} {tp:>10.3f}s {ta:>8.3f}s {total:>6.3f}s {ratio:>8}")
        prev = total


if __name__ == "__main__":
    main()
