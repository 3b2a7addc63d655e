"""Outer parameter iterations driving the subproblem to ratio consistency.

The solver maintains per-term parameters (beta, u) in the box
Omega = {beta >= 0, u >= l > 0} and repeatedly solves the convex subproblem
at the current parameters.  The stacked residual

    psi(alpha) = (beta_i h_i(x) - f_i(x),  u_i h_i(x) - 1)_i,   x = x(alpha)

vanishes exactly when beta_i matches the ratio values and u_i the reciprocal
denominators at the subproblem solution, which certifies optimality.  Three
update rules are offered:

* ``n``    pure fixed-point updates beta <- f/h, u <- 1/h (the undamped
           Newton step on psi, whose Jacobian is diagonal and positive);
* ``mn``   the same step damped by a backtracking search on ||psi||;
* ``proj`` clamped gradient-style steps alpha <- clip(alpha - lambda psi).

Termination: Euclidean norm of psi below ``psi_tol``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .barrier import InnerConfig, solve_subproblem
from .errors import (DenominatorNonpositive, Infeasible, LineSearchFailed,
                     MaxIterations, NonConvexDetected)
from .feasibility import find_feasible_point
from .problem import (DEFAULT_U_FLOOR, ParamVector, eval_objective,
                      feasibility_residuals, term_values)

log = logging.getLogger(__name__)

NEWTON = "n"
MODIFIED_NEWTON = "mn"
PROJECTION = "proj"
ALGORITHMS = (NEWTON, MODIFIED_NEWTON, PROJECTION)

CONVERGED = "converged"
MAX_OUTER = "max_outer"
LINE_SEARCH_FAILED = "line_search_failed"
INNER_FAILED = "inner_failed"


@dataclass
class SolverConfig:
    """Outer-iteration knobs."""

    algorithm: str = MODIFIED_NEWTON
    psi_tol: float = 1e-6
    xi: float = 0.5              # backtracking shrink factor
    eps: float = 0.1             # sufficient-decrease fraction
    max_outer: int = 100
    max_backtracks: int = 30
    lambda_proj: float = 0.1
    inner: InnerConfig = field(default_factory=InnerConfig)
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm: {self.algorithm!r} not in {ALGORITHMS}")
        if not 0 < self.xi < 1:
            raise ValueError("xi must lie in (0, 1)")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if not 0 < self.lambda_proj <= 1:
            raise ValueError("lambda_proj must lie in (0, 1]")
        if self.max_outer < 1:
            raise ValueError("max_outer must be at least 1")
        if not self.psi_tol > self.inner.kkt_tol:
            raise ValueError(
                f"psi_tol ({self.psi_tol:g}) must exceed the inner kkt_tol "
                f"({self.inner.kkt_tol:g})")


@dataclass
class IterationRecord:
    """One outer iterate: parameters, subproblem solution, residual, cost."""

    k: int
    alpha: ParamVector
    x: np.ndarray
    psi_norm: float
    lambda_k: float
    subproblem_solves_this_iter: int
    elapsed: float               # cumulative seconds since solve() started
    flat_subproblem: bool = False


@dataclass
class Solution:
    x_star: np.ndarray
    f_star: float
    alpha_star: ParamVector
    status: str
    trace: list
    outer_iters: int
    total_subproblem_solves: int

    @property
    def converged(self):
        return self.status == CONVERGED

    @property
    def psi_norm(self):
        return self.trace[-1].psi_norm if self.trace else np.inf


@dataclass
class LineSearchStep:
    lambda_k: float
    alpha_next: ParamVector
    x_next: np.ndarray
    solves_used: int
    subproblem: object = None


def _ratio_params(problem, x, l):
    """(f_i/h_i, 1/h_i) at x, clamped into Omega (with a debug log on clamp)."""
    f, h = term_values(problem, x)
    beta_raw = f / h
    beta = np.maximum(beta_raw, 0.0)
    if (beta_raw < -1e-12).any():
        log.debug("clamped %d negative ratio parameters into Omega",
                  int((beta_raw < -1e-12).sum()))
    u = np.maximum(1.0 / h, l)
    return ParamVector(beta, u, l)


def init_alpha(problem, y0, l=DEFAULT_U_FLOOR):
    """Starting parameters from a feasible point: beta = f/h, u = 1/h at y0."""
    return _ratio_params(problem, np.asarray(y0, float), l)


def newton_map(problem, x_k, l=DEFAULT_U_FLOOR):
    """The undamped parameter update evaluated at a subproblem solution.

    Identical to one Newton step on psi (the Jacobian is diag(h, h)), and to
    the damped update with unit step.
    """
    return _ratio_params(problem, np.asarray(x_k, float), l)


def psi(problem, alpha, x_alpha):
    """Stacked residual (beta_i h_i - f_i, u_i h_i - 1) at x_alpha."""
    f, h = term_values(problem, x_alpha)
    return np.concatenate([alpha.beta * h - f, alpha.u * h - 1.0])


def jacobian_diag(problem, x_alpha):
    """Diagonal of the psi Jacobian: the denominators, repeated twice."""
    _, h = term_values(problem, x_alpha)
    return np.concatenate([h, h])


def mn_update(alpha_k, x_k, lambda_k, problem):
    """Damped update: convex combination of alpha_k and the undamped target."""
    target = newton_map(problem, x_k, alpha_k.l)
    beta = (1.0 - lambda_k) * alpha_k.beta + lambda_k * target.beta
    u = (1.0 - lambda_k) * alpha_k.u + lambda_k * target.u
    return ParamVector(beta, u, alpha_k.l).clamped()


def projection_step(alpha_k, psi_k, lam):
    """Gradient-style step alpha - lam * psi, clipped back into Omega."""
    psi_k = np.asarray(psi_k, float)
    half = psi_k.size // 2
    beta = alpha_k.beta - lam * psi_k[:half]
    u = alpha_k.u - lam * psi_k[half:]
    return ParamVector(beta, u, alpha_k.l).clamped()


def line_search(problem, alpha_k, x_k, cfg, x_interior=None, psi_norm_k=None):
    """Backtracking search on ||psi||: largest xi^i step with sufficient decrease.

    Every trial costs one subproblem solve; the accepted trial's solution is
    returned so the caller can reuse it as the next iterate.
    """
    if psi_norm_k is None:
        psi_norm_k = float(np.linalg.norm(psi(problem, alpha_k, x_k)))
    solves = 0
    for i in range(cfg.max_backtracks):
        lam = cfg.xi ** i
        trial = mn_update(alpha_k, x_k, lam, problem)
        sp = solve_subproblem(problem, trial, x_k, cfg.inner, x_interior)
        solves += 1
        trial_norm = float(np.linalg.norm(psi(problem, trial, sp.x)))
        if trial_norm <= (1.0 - cfg.eps * lam) * psi_norm_k:
            return LineSearchStep(lam, trial, sp.x, solves, sp)
    raise LineSearchFailed(
        f"no step in {cfg.max_backtracks} backtracks reduced ||psi|| "
        f"below (1 - eps*lambda) * {psi_norm_k:.6g}")


def solve(problem, y0=None, cfg=None):
    """Run the outer iteration from feasible start y0 (phase-one when absent)."""
    cfg = cfg or SolverConfig()
    anchor = find_feasible_point(problem.region)
    if anchor is None:
        raise Infeasible("problem region has no strictly feasible interior point")
    if y0 is None:
        y0 = anchor
    else:
        y0 = np.asarray(y0, float)
        try:
            term_values(problem, y0)
        except DenominatorNonpositive as exc:
            raise DenominatorNonpositive(
                "starting point gives a nonpositive denominator; cannot form "
                f"initial ratio parameters ({exc})") from None
        mx, _ = feasibility_residuals(problem, y0)
        if mx > 1e-6:
            log.debug("start violates the region by %.3g; only the initial "
                      "parameters are taken from it", mx)
    alpha = init_alpha(problem, y0)
    t0 = time.perf_counter()
    trace = []
    total = 0
    status = MAX_OUTER
    try:
        sp = solve_subproblem(problem, alpha, y0, cfg.inner, anchor)
    except (Infeasible, MaxIterations, NonConvexDetected) as exc:
        log.warning("initial subproblem failed: %s", exc)
        return Solution(np.asarray(y0, float), eval_objective(problem, y0), alpha,
                        INNER_FAILED, [], 0, 0)
    total += 1
    x = sp.x
    pending_solves, pending_lambda = 1, 1.0
    for k in range(cfg.max_outer):
        psi_vec = psi(problem, alpha, x)
        norm = float(np.linalg.norm(psi_vec))
        trace.append(IterationRecord(k, alpha.copy(), x.copy(), norm,
                                     pending_lambda, pending_solves,
                                     time.perf_counter() - t0,
                                     sp.flat_direction))
        if norm <= cfg.psi_tol:
            status = CONVERGED
            break
        if k == cfg.max_outer - 1:
            break
        try:
            if cfg.algorithm == NEWTON:
                alpha = newton_map(problem, x, alpha.l)
                sp = solve_subproblem(problem, alpha, x, cfg.inner, anchor)
                pending_solves, pending_lambda = 1, 1.0
            elif cfg.algorithm == MODIFIED_NEWTON:
                ls = line_search(problem, alpha, x, cfg, anchor, psi_norm_k=norm)
                alpha, sp = ls.alpha_next, ls.subproblem
                pending_solves, pending_lambda = ls.solves_used, ls.lambda_k
            else:  # PROJECTION
                alpha = projection_step(alpha, psi_vec, cfg.lambda_proj)
                sp = solve_subproblem(problem, alpha, x, cfg.inner, anchor)
                pending_solves, pending_lambda = 1, cfg.lambda_proj
        except LineSearchFailed as exc:
            log.info("line search failed at iteration %d: %s", k, exc)
            status = LINE_SEARCH_FAILED
            break
        except (Infeasible, MaxIterations, NonConvexDetected) as exc:
            log.warning("subproblem failed at iteration %d: %s", k, exc)
            status = INNER_FAILED
            break
        total += pending_solves
        x = sp.x
    return Solution(x, eval_objective(problem, x), alpha, status, trace,
                    len(trace), total)
