"""Command-line front end: solve, generate, reproduce, bench."""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__
from .errors import DenominatorNonpositive, Infeasible, ParseError
from .generator import GenSpec, generate
from .problem_io import parse_problem_file, save_problem
from .reproduce import format_report, format_summary, run_reproduce
from .solver import SolverConfig, solve


def _parse_start(text, n):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise SystemExit(f"--start: could not parse {text!r} as comma-separated floats")
    if len(vals) != n:
        raise SystemExit(f"--start: got {len(vals)} coordinates, problem has n={n}")
    return np.array(vals)


def _parse_grid(text):
    try:
        ns_part, terms_part = text.lower().split("x")
        ns = tuple(int(v) for v in ns_part.split(","))
        terms = tuple(int(v) for v in terms_part.split(","))
    except ValueError:
        raise SystemExit(f"--grid: expected 'n1,n2xT1,T2,...', got {text!r}")
    return ns, terms


def write_trace(path, solution):
    """Iteration trace as CSV: k, psi_norm, lambda_k, solves, elapsed_s."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("k,psi_norm,lambda_k,solves,elapsed_s\n")
        for rec in solution.trace:
            fh.write(f"{rec.k},{rec.psi_norm:.9e},{rec.lambda_k:g},"
                     f"{rec.subproblem_solves_this_iter},{rec.elapsed:.6f}\n")


def _cmd_solve(args):
    problem = parse_problem_file(args.problem)
    cfg = SolverConfig(algorithm=args.algorithm, psi_tol=args.tol,
                       max_outer=args.max_outer, xi=args.xi, eps=args.eps,
                       lambda_proj=args.lambda_proj, seed=args.seed)
    y0 = _parse_start(args.start, problem.n) if args.start else None
    t0 = time.perf_counter()
    sol = solve(problem, y0, cfg)
    dt = time.perf_counter() - t0
    if args.trace:
        write_trace(args.trace, sol)
    xs = ", ".join(format(v, ".12g") for v in sol.x_star)
    print(f"status    {sol.status}")
    print(f"f_star    {sol.f_star:.12g}")
    print(f"x_star    [{xs}]")
    print(f"psi_norm  {sol.psi_norm:.6g}")
    print(f"outer     {sol.outer_iters}")
    print(f"solves    {sol.total_subproblem_solves}")
    print(f"time_s    {dt:.3f}")
    return 0 if sol.converged else 2


def _cmd_generate(args):
    spec = GenSpec(args.n, args.terms, args.seed, d_low=args.d_low,
                   d_high=args.d_high)
    problem = generate(spec)
    save_problem(problem, args.output)
    print(f"wrote {args.output} (n={args.n}, terms={args.terms}, seed={args.seed})")
    return 0


def _cmd_reproduce(args, include_time=False):
    grid = _parse_grid(args.grid) if args.grid else None
    reports = run_reproduce(args.which, runs=args.runs, seed=args.seed, grid=grid)
    if args.which.replace("-", "") == "paper3" or args.summary:
        text = format_summary(reports, args.format, include_time=include_time)
    else:
        text = "".join(format_report(r, args.format) for r in reports)
    print(text, end="")
    return 0


def _cmd_bench(args):
    args.which = "paper3"
    args.summary = True
    return _cmd_reproduce(args, include_time=True)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sumratios",
        description="Globally convergent sum-of-ratios solver "
                    "(parametric convex subproblems).")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a problem file or builtin id")
    p.add_argument("problem", help="JSON problem file, or builtin id "
                                   "(paper-1, paper-2)")
    p.add_argument("--algorithm", choices=["n", "mn", "proj"], default="mn")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="residual norm tolerance (default 1e-6)")
    p.add_argument("--max-outer", type=int, default=100)
    p.add_argument("--xi", type=float, default=0.5,
                   help="backtracking shrink factor (default 0.5)")
    p.add_argument("--eps", type=float, default=0.1,
                   help="sufficient-decrease fraction (default 0.1)")
    p.add_argument("--lambda-proj", type=float, default=0.1,
                   help="projection step size (default 0.1)")
    p.add_argument("--start", help="comma-separated starting point x1,x2,...")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", metavar="OUT.CSV",
                   help="write the iteration trace as CSV")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("generate", help="write a seeded random instance")
    p.add_argument("--n", type=int, required=True, help="dimension")
    p.add_argument("--terms", type=int, required=True, help="number of ratio terms")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d-low", type=float, default=1.0)
    p.add_argument("--d-high", type=float, default=10.0)
    p.add_argument("-o", "--output", required=True, help="output JSON path")
    p.set_defaults(func=_cmd_generate)

    for name, help_text in (("reproduce", "rerun the benchmark experiments"),
                            ("bench", "random-instance grid with timings")):
        p = sub.add_parser(name, help=help_text)
        if name == "reproduce":
            p.add_argument("which", choices=["paper1", "paper2", "paper3"])
            p.add_argument("--runs", type=int, default=100,
                           help="runs (paper1/2) or instances per cell (paper3)")
        else:
            p.add_argument("--runs", type=int, default=20,
                           help="instances per grid cell")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--grid", help="paper3 grid as 'n1,n2xT1,T2,...' "
                                      "(default 10,50x5,10,50)")
        p.add_argument("--format", choices=["table", "csv", "json-lines"],
                       default="table")
        p.add_argument("--summary", action="store_true",
                       help="one aggregated row per experiment instead of per run")
        p.set_defaults(func=_cmd_reproduce if name == "reproduce" else _cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, DenominatorNonpositive, Infeasible) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
