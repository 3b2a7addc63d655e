"""Tour of the two built-in 2-variable benchmark problems.

Solves each with all three outer algorithms and prints a comparison table,
then contrasts the undamped parameter iteration with the damped one from a
deliberately bad starting point on the second problem: the undamped map gets
stuck bouncing between two parameter values, while backtracking shrinks the
step until the residual contracts.

Run:  python3 demos/builtin_showcase.py
"""

import argparse

import numpy as np

from sumratios import ALGORITHMS, SolverConfig, problem_one, problem_two, solve


def comparison_table(runs):
    print(f"{'problem':<10} {'algorithm':<10} {'status':<20} "
          f"{'f*':>12} {'outer':>6} {'solves':>7}")
    for name, alg, sol in runs:
        print(f"{name:<10} {alg:<10} {sol.status:<20} "
              f"{sol.f_star:>12.8f} {sol.outer_iters:>6} "
              f"{sol.total_subproblem_solves:>7}")


def residual_story(problem, y0, max_outer):
    print(f"\nstarting point {y0}:")
    for alg, label in (("n", "undamped"), ("mn", "damped")):
        sol = solve(problem, np.asarray(y0, float),
                    SolverConfig(algorithm=alg, max_outer=max_outer))
        tail = ", ".join(f"{r.psi_norm:.3g}" for r in sol.trace[:8])
        more = " ..." if len(sol.trace) > 8 else ""
        print(f"  {label:<9} ({alg:>2}) -> {sol.status:<16} "
              f"residuals: {tail}{more}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-outer", type=int, default=25,
                        help="iteration cap for the oscillation exhibit")
    args = parser.parse_args(argv)

    runs = []
    for name, factory in (("builtin-1", problem_one), ("builtin-2", problem_two)):
        for alg in ALGORITHMS:
            cap = 200 if alg == "proj" else 100
            sol = solve(factory(), cfg=SolverConfig(algorithm=alg, max_outer=cap))
            runs.append((name, alg, sol))
    comparison_table(runs)

    print("\nWhy damping matters on builtin-2 (optimum 0.8 at x = (0.5, 0.5)):")
    residual_story(problem_two(), (0.9, 0.1), args.max_outer)
    residual_story(problem_two(), (0.0, 0.0), args.max_outer)
    print("\nFrom the origin the plain parameter map lands on the answer in two "
          "evaluations; from the skewed start it cycles forever, and only the "
          "damped variant converges.")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
