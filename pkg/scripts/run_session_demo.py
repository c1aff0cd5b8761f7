"""Replay a session trace and print per-interval allocations.

    python scripts/run_session_demo.py data/i1_manifest.json data/i1_trace.csv
"""
import argparse
from pathlib import Path

from viewalloc.allocator import as_number
from viewalloc.prioritizer import PrioritizationConfig
from viewalloc.scene import PriorityWeights, load_manifest
from viewalloc.simulator import load_trace, run_session


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("manifest", type=Path)
    ap.add_argument("trace", type=Path)
    ap.add_argument("--weights", default="1,0.6,0.3")
    args = ap.parse_args()

    scene = load_manifest(args.manifest.read_bytes())
    trace = load_trace(args.trace.read_text())
    report = run_session(scene, trace, PrioritizationConfig(PriorityWeights.parse(args.weights)))

    for r in report.intervals:
        if not r.feasible:
            print(f"[{r.index}] W={r.budget} infeasible (W_min={r.w_min})")
            continue
        a = r.allocation
        picks = " ".join(f"{e.model_id}:{e.klass.name}/R{e.level}" for e in a.entries)
        print(f"[{r.index}] W={r.budget} used={a.total_bitrate} q={float(a.total_quality):.0f}  {picks}")
    tw = report.time_weighted_mean_quality
    print(f"time-weighted mean quality: {as_number(tw) if tw is not None else 'n/a'}")
    print(f"switches: {report.switch_counts}  infeasible intervals: {report.infeasible_count}")


if __name__ == "__main__":
    main()
