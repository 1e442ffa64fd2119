"""Check the DFS solver and the bundled MILP solver against brute force.

Draws random small instances, solves each exhaustively with the numpy
oracle in tests/oracles.py and reports any disagreement.

    python3 scripts/oracle_check.py [--n 200] [--seed 0]
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from helpers import to_problem  # noqa: E402
from oracles import milp_optimum, optimum, random_instance  # noqa: E402

from roomgen.errors import Infeasible  # noqa: E402
from roomgen.layout import solve_dfs  # noqa: E402
from roomgen.milp import solve_problem  # noqa: E402


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-objects", type=int, default=3)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    t0 = time.monotonic()
    bad = milp_n = 0
    for i in range(args.n):
        inst = random_instance(rng, args.max_objects)
        p = to_problem(inst)
        want = optimum(inst)
        out = solve_dfs(p)
        got = out.score if out.complete else None
        if got != want:
            bad += 1
            print(f"dfs mismatch #{i}: solver {got}, oracle {want}\n{inst.graph_text()}")
        if len(inst.objects) <= 2:
            milp_n += 1
            m_want = milp_optimum(inst)
            try:
                m_got = solve_problem(p).milp_objective
            except Infeasible:
                m_got = None
            if m_got != m_want:
                bad += 1
                print(f"milp mismatch #{i}: solver {m_got}, oracle {m_want}\n{inst.graph_text()}")
    print(f"{args.n} instances ({milp_n} also via MILP), {bad} mismatches, {time.monotonic() - t0:.1f} s")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
