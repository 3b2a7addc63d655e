"""Experiment harness: seeded benchmark runs and deterministic reports.

Run seeds derive from (master seed, run index) — and for the random-instance
grid from (master seed, n, terms, instance index) — so reports are
reproducible run by run.  The csv and json-lines styles omit wall-time
columns on purpose: fixed (command, seed, config) then produce byte-identical
output; the table style shows timing.
"""

from __future__ import annotations

import io
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .benchmarks import problem_one, problem_two
from .generator import GenSpec, generate
from .solver import MODIFIED_NEWTON, NEWTON, SolverConfig, solve

#: reference optima (value, tolerance) used to score benchmark runs
REFERENCE_VALUES = {
    "paper-1": (0.5958, 1e-3),
    "paper-2": (0.8, 1e-4),
}

DEFAULT_GRID = ((10, 50), (5, 10, 50))  # n values x term counts

STYLES = ("table", "csv", "json-lines")


@dataclass
class RunSummary:
    run: int
    status: str
    f_value: float
    psi_norm: float
    outer: int
    total: int
    time_s: float
    success: bool


@dataclass
class RunReport:
    problem_id: str
    algorithm: str
    runs: int
    success_count: int
    mean_outer: float
    mean_total: float
    mean_time_s: float
    per_run: list = field(default_factory=list)
    n: int | None = None
    n_terms: int | None = None


def _run_once(problem, y0, cfg, reference):
    start = time.perf_counter()
    sol = solve(problem, y0, cfg)
    dt = time.perf_counter() - start
    success = sol.converged
    if reference is not None and success:
        ref, tol = reference
        success = abs(sol.f_star - ref) <= tol
    return sol, dt, success


def _report(problem_id, algorithm, summaries, n=None, n_terms=None):
    runs = len(summaries)
    return RunReport(
        problem_id=problem_id,
        algorithm=algorithm,
        runs=runs,
        success_count=sum(s.success for s in summaries),
        mean_outer=float(np.mean([s.outer for s in summaries])) if runs else 0.0,
        mean_total=float(np.mean([s.total for s in summaries])) if runs else 0.0,
        mean_time_s=float(np.mean([s.time_s for s in summaries])) if runs else 0.0,
        per_run=list(summaries),
        n=n,
        n_terms=n_terms,
    )


def _edge_start(seed, run):
    """Random point on the segment {x1 + x2 = 1, x >= 0}."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, run]))
    t = rng.random()
    return np.array([t, 1.0 - t])


def uniform_box_start(problem, rng):
    """Uniform sample from the box.

    The sample may violate the linear rows; that is fine — the solver uses the
    start only to form the initial ratio parameters, which merely need positive
    denominators, and every denominator is positive on the whole box for
    generated instances.
    """
    region = problem.region
    return region.box_lo + rng.random(problem.n) * (region.box_hi - region.box_lo)


def reproduce_benchmark(which, runs=100, seed=0, cfg_kwargs=None):
    """Origin-start and random-edge-start runs of one builtin, both algorithms."""
    make = {"paper-1": problem_one, "paper-2": problem_two}[which]
    reference = REFERENCE_VALUES[which]
    reports = []
    kw = dict(cfg_kwargs or {})
    for algorithm in (NEWTON, MODIFIED_NEWTON):
        problem = make()
        sol, dt, ok = _run_once(problem, np.zeros(2),
                                SolverConfig(algorithm=algorithm, seed=seed, **kw),
                                reference)
        summaries = [RunSummary(0, sol.status, sol.f_star, sol.psi_norm,
                                sol.outer_iters, sol.total_subproblem_solves,
                                dt, ok)]
        reports.append(_report(f"{which}:origin", algorithm, summaries, n=2,
                               n_terms=problem.n_terms))
    for algorithm in (NEWTON, MODIFIED_NEWTON):
        summaries = []
        for r in range(runs):
            problem = make()
            sol, dt, ok = _run_once(problem, _edge_start(seed, r),
                                    SolverConfig(algorithm=algorithm,
                                                 seed=seed, **kw),
                                    reference)
            summaries.append(RunSummary(r, sol.status, sol.f_star, sol.psi_norm,
                                        sol.outer_iters,
                                        sol.total_subproblem_solves, dt, ok))
        reports.append(_report(f"{which}:edge-random", algorithm, summaries, n=2,
                               n_terms=problem.n_terms))
    return reports


def reproduce_grid(ns=None, terms_list=None, instances=20, seed=0, cfg_kwargs=None):
    """Random-instance grid: one report per (n, terms, algorithm) cell."""
    ns = tuple(ns) if ns else DEFAULT_GRID[0]
    terms_list = tuple(terms_list) if terms_list else DEFAULT_GRID[1]
    kw = dict(cfg_kwargs or {})
    reports = []
    for n in ns:
        for n_terms in terms_list:
            cell = {NEWTON: [], MODIFIED_NEWTON: []}
            for k in range(instances):
                inst_seed = np.random.SeedSequence([seed, n, n_terms, k])
                child = inst_seed.generate_state(1)[0]
                problem = generate(GenSpec(n, n_terms, int(child)))
                rng = np.random.default_rng(
                    np.random.SeedSequence([seed, n, n_terms, k, 1]))
                y0 = uniform_box_start(problem, rng)
                for algorithm in (NEWTON, MODIFIED_NEWTON):
                    sol, dt, ok = _run_once(problem, y0,
                                            SolverConfig(algorithm=algorithm,
                                                         seed=seed, **kw),
                                            None)
                    cell[algorithm].append(
                        RunSummary(k, sol.status, sol.f_star, sol.psi_norm,
                                   sol.outer_iters, sol.total_subproblem_solves,
                                   dt, ok))
            for algorithm in (NEWTON, MODIFIED_NEWTON):
                reports.append(_report(f"paper-3[n={n},terms={n_terms}]",
                                       algorithm, cell[algorithm],
                                       n=n, n_terms=n_terms))
    return reports


def run_reproduce(which, runs=100, seed=0, grid=None):
    """Dispatch: 'paper1'/'paper2' benchmark runs or the 'paper3' grid.

    For paper3 ``runs`` means instances per grid cell.  Returns a list of
    RunReport rows.
    """
    key = which.replace("-", "")
    if key == "paper1":
        return reproduce_benchmark("paper-1", runs=runs, seed=seed)
    if key == "paper2":
        return reproduce_benchmark("paper-2", runs=runs, seed=seed)
    if key == "paper3":
        ns, terms_list = grid if grid else DEFAULT_GRID
        return reproduce_grid(ns, terms_list, instances=runs, seed=seed)
    raise ValueError(f"unknown experiment {which!r} "
                     "(expected paper1, paper2, or paper3)")


def _g6(x):
    return format(float(x), ".6g")


_RUN_COLUMNS = ("problem_id", "algorithm", "run", "status", "f_value",
                "psi_norm", "outer", "total", "success")


def _run_row(report, s):
    return (report.problem_id, report.algorithm, str(s.run), s.status,
            _g6(s.f_value), _g6(s.psi_norm), str(s.outer), str(s.total),
            str(int(s.success)))


def format_report(report, style="table"):
    """Render one report's per-run rows (csv / json-lines are byte-stable)."""
    if style not in STYLES:
        raise ValueError(f"style: {style!r} not in {STYLES}")
    if style == "csv":
        out = io.StringIO()
        out.write(",".join(_RUN_COLUMNS) + "\n")
        for s in report.per_run:
            out.write(",".join(_run_row(report, s)) + "\n")
        return out.getvalue()
    if style == "json-lines":
        lines = []
        for s in report.per_run:
            row = dict(zip(_RUN_COLUMNS, _run_row(report, s)))
            row["run"] = s.run
            row["outer"] = s.outer
            row["total"] = s.total
            row["success"] = bool(s.success)
            lines.append(json.dumps(row, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")
    widths = (28, 4, 5, 18, 12, 12, 6, 6, 8)
    header = ("problem", "alg", "run", "status", "f_value", "psi_norm",
              "outer", "total", "success")
    out = [" ".join(h.ljust(w) for h, w in zip(header, widths))]
    for s in report.per_run:
        row = _run_row(report, s)
        out.append(" ".join(v.ljust(w) for v, w in zip(row, widths)))
    out.append(f"# success {report.success_count}/{report.runs}"
               f"  mean outer {_g6(report.mean_outer)}"
               f"  mean total {_g6(report.mean_total)}"
               f"  mean time {_g6(report.mean_time_s)}s")
    return "\n".join(out) + "\n"


_SUMMARY_COLUMNS = ("problem_id", "algorithm", "n", "terms", "runs", "success",
                    "mean_outer", "mean_total")


def format_summary(reports, style="table", include_time=False):
    """One row per report (the grid / cell table shape)."""
    if style not in STYLES:
        raise ValueError(f"style: {style!r} not in {STYLES}")
    cols = _SUMMARY_COLUMNS + (("mean_time_s",) if include_time and style == "table"
                               else ())

    def row(r):
        vals = (r.problem_id, r.algorithm,
                str(r.n if r.n is not None else ""),
                str(r.n_terms if r.n_terms is not None else ""),
                str(r.runs), str(r.success_count),
                _g6(r.mean_outer), _g6(r.mean_total))
        if include_time and style == "table":
            vals += (_g6(r.mean_time_s),)
        return vals

    if style == "csv":
        out = [",".join(_SUMMARY_COLUMNS)]
        out.extend(",".join(row(r)) for r in reports)
        return "\n".join(out) + "\n"
    if style == "json-lines":
        lines = []
        for r in reports:
            d = dict(zip(_SUMMARY_COLUMNS, row(r)[:len(_SUMMARY_COLUMNS)]))
            d["runs"] = r.runs
            d["success"] = r.success_count
            d["n"] = r.n
            d["terms"] = r.n_terms
            lines.append(json.dumps(d, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")
    widths = (26, 4, 4, 6, 5, 8, 11, 11) + ((12,) if include_time else ())
    out = [" ".join(h.ljust(w) for h, w in zip(cols, widths))]
    out.extend(" ".join(v.ljust(w) for v, w in zip(row(r), widths))
               for r in reports)
    return "\n".join(out) + "\n"
