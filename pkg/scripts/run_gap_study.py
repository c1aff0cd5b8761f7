"""Greedy vs exact quality over seeded random instances, swept over n.

    python scripts/run_gap_study.py --trials 1000 --seed 42 --out results/gap
"""
import argparse
import json
from pathlib import Path

from viewalloc.generator import GeneratorParams
from viewalloc.oracle import gap_csv, gap_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--max-n", type=int, default=8)
    ap.add_argument("--out", type=Path, default=Path("results/gap"))
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    print(f"{'n':>3} {'trials':>7} {'hits':>6} {'mean rel':>9} {'max rel':>9}")
    summaries = {}
    for n in range(2, args.max_n + 1):
        report = gap_report(GeneratorParams(n_range=(n, n), level_range=(1, 3)), args.trials, args.seed)
        s = report.summary()
        summaries[n] = s
        (args.out / f"gap_n{n}.csv").write_text(gap_csv(report))
        print(f"{n:>3} {s['trials']:>7} {s['optimal_hits']:>6} {s['rel_gap']['mean']:>9.4f} {s['rel_gap']['max']:>9.4f}")
    (args.out / "summary.json").write_text(json.dumps(summaries, indent=2) + "\n")


if __name__ == "__main__":
    main()
