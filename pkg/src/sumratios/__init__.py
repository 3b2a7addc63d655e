"""Globally convergent solver for sum-of-ratios fractional programs.

Optimize sum_i f_i(x)/h_i(x) over a convex region by solving a sequence of
convex subproblems parameterized by per-term ratio levels and denominator
weights; the parameters are driven to a fixed point whose residual certifies
global optimality.
"""

__version__ = "0.1.0"

from .barrier import InnerConfig, SubproblemSolution, solve_subproblem, subproblem_value_grad
from .benchmarks import problem_one, problem_two
from .errors import (DenominatorNonpositive, DimensionMismatch, DimensionTooLarge,
                     EmptyGrid, GenerationFailed, Infeasible, LineSearchFailed,
                     MaxIterations, NonConvexDetected, ParseError, ZeroVector)
from .feasibility import find_feasible_point, interior_box_point
from .generator import GenSpec, generate, householder, orthogonal_factor
from .gridsearch import GridResult, grid_search
from .problem import (DEFAULT_U_FLOOR, MAX, MIN, CallbackTerm, FeasibleRegion,
                      ParamVector, Problem, QuadAffineTerm, RatioTerm,
                      ValidationReport, eval_objective, eval_term,
                      feasibility_residuals, min_denominator, term_values,
                      validate)
from .problem_io import (parse_problem_file, problem_from_dict, problem_to_dict,
                         save_problem)
from .reproduce import (RunReport, RunSummary, format_report, format_summary,
                        run_reproduce)
from .solver import (ALGORITHMS, CONVERGED, INNER_FAILED, LINE_SEARCH_FAILED,
                     MAX_OUTER, MODIFIED_NEWTON, NEWTON, PROJECTION,
                     IterationRecord, Solution, SolverConfig, init_alpha,
                     jacobian_diag, line_search, mn_update, newton_map,
                     projection_step, psi, solve)

__all__ = [
    "ALGORITHMS", "CONVERGED", "CallbackTerm", "DEFAULT_U_FLOOR",
    "DenominatorNonpositive", "DimensionMismatch", "DimensionTooLarge",
    "EmptyGrid", "FeasibleRegion", "GenSpec", "GenerationFailed", "GridResult",
    "INNER_FAILED", "Infeasible", "InnerConfig", "IterationRecord",
    "LINE_SEARCH_FAILED", "LineSearchFailed", "MAX", "MAX_OUTER", "MIN",
    "MODIFIED_NEWTON", "MaxIterations", "NEWTON", "NonConvexDetected",
    "PROJECTION", "ParamVector", "ParseError", "Problem", "QuadAffineTerm",
    "RatioTerm", "RunReport", "RunSummary", "Solution", "SolverConfig",
    "SubproblemSolution", "ValidationReport", "ZeroVector", "eval_objective",
    "eval_term", "feasibility_residuals", "find_feasible_point",
    "format_report", "format_summary", "generate", "grid_search", "householder",
    "init_alpha", "interior_box_point", "jacobian_diag", "line_search",
    "min_denominator", "mn_update", "newton_map", "orthogonal_factor",
    "parse_problem_file", "problem_from_dict", "problem_one", "problem_to_dict",
    "problem_two", "projection_step", "psi", "run_reproduce", "save_problem",
    "solve", "solve_subproblem", "subproblem_value_grad", "term_values",
    "validate",
]
