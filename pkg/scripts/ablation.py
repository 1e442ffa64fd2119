"""Compare the constraint solver with the edge and random baselines.

Prints mean soft-constraint satisfaction per room fixture (random averaged
over --seeds runs) and whether every layout is collision-free.

    python3 scripts/ablation.py [--layouts tests/fixtures/layouts] [--seeds 50]
"""

import argparse
from pathlib import Path

import numpy as np

from roomgen.layout import hard_violations, load_problem_files, solve_dfs, solve_edge, solve_random


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--layouts", type=Path, default=Path("tests/fixtures/layouts"))
    ap.add_argument("--seeds", type=int, default=50)
    args = ap.parse_args(argv)

    print(f"{'room':<14} {'constraint':>10} {'edge':>6} {'random':>7}  collision-free")
    agg = {"constraint": [], "edge": [], "random": []}
    for d in sorted(p for p in args.layouts.iterdir() if (p / "room.txt").exists()):
        p = load_problem_files(d / "room.txt", d / "graph.txt")
        runs = {"constraint": [solve_dfs(p)], "edge": [solve_edge(p)],
                "random": [solve_random(p, seed=s) for s in range(args.seeds)]}
        clean = all(hard_violations(p.room, o.placements) == ([], []) for v in runs.values() for o in v)
        row = {k: float(np.mean([o.satisfaction for o in v])) for k, v in runs.items()}
        for k, v in row.items():
            agg[k].append(v)
        print(f"{d.name:<14} {row['constraint']:>10.3f} {row['edge']:>6.3f} {row['random']:>7.3f}  {clean}")
    mean = {k: float(np.mean(v)) for k, v in agg.items()}
    print(f"{'mean':<14} {mean['constraint']:>10.3f} {mean['edge']:>6.3f} {mean['random']:>7.3f}")


if __name__ == "__main__":
    main()
