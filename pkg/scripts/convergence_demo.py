"""Step lengths of the x-iteration against the contraction bound q^k.

Draws contraction-A instances for each norm, runs the fixed-point iteration
and prints the observed rate next to the certified factor q.
"""

from __future__ import annotations

import argparse

import numpy as np

from gavekit.analysis import check_contraction_A
from gavekit.generator import GeneratorConfig, random_instance
from gavekit.solvers import fixed_point_x


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=3)
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()

    print(f"{'p':>4} {'seed':>4} {'q':>8} {'rate':>8} {'iters':>6} {'residual':>10}")
    for p in (1, 2, "inf"):
        for seed in range(args.seeds):
            inst = random_instance(GeneratorConfig(args.m, args.n, "contraction-A", p), seed)
            q = check_contraction_A(inst, None, p).witness["contraction_factor"]
            x, trace = fixed_point_x(inst, p=p)
            rate = trace.rate_estimate()
            print(f"{p!s:>4} {seed:>4} {q:8.4f} {rate if rate is not None else np.nan:8.4f} "
                  f"{trace.iterations:>6} {trace.residual_inf:10.2e}")


if __name__ == "__main__":
    main()
