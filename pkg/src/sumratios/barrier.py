"""Log-barrier interior-point solver for the weighted parametric subproblem.

For parameters (beta, u) the subproblem optimizes

    sum_i u_i * (f_i(x) - beta_i * h_i(x))

over the feasible region: minimized for min-sense problems, maximized for
max-sense ones.  Internally everything is a minimization; max-sense problems
negate the objective.  Barrier stages multiply t by ``barrier_mu`` until the
duality gap m/t drops below ``kkt_tol``; each stage runs damped Newton steps
with a feasibility-capped Armijo backtracking line search.  The final stage
polishes the gradient so the reported KKT residual meets the tolerance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import Infeasible, MaxIterations, NonConvexDetected
from .feasibility import find_feasible_point
from .problem import MIN

log = logging.getLogger(__name__)

_MIN_START_SLACK = 1e-10   # below this, pull the warm start toward the interior
_PULL_FACTOR = 1e-3
_ARMIJO_C1 = 1e-4
_FLAT_EIG_RATIO = 1e-9     # near-zero curvature -> non-singleton optimal face


@dataclass
class InnerConfig:
    """Barrier solver knobs."""

    kkt_tol: float = 1e-9
    barrier_mu: float = 10.0
    initial_t: float = 1.0
    max_newton: int = 200          # Newton step cap per barrier stage
    fd_hessian_step: float = 1e-5  # central-difference step for missing Hessians

    def __post_init__(self):
        if not self.kkt_tol > 0:
            raise ValueError("kkt_tol must be positive")
        if not self.barrier_mu > 1:
            raise ValueError("barrier_mu must exceed 1")
        if not self.initial_t > 0:
            raise ValueError("initial_t must be positive")


@dataclass
class SubproblemSolution:
    """Result of one parametric subproblem solve."""

    x: np.ndarray
    objective: float               # weighted objective in the problem's own sense
    kkt_residual: float
    barrier_outer_iters: int
    newton_iters: int
    t_final: float
    multipliers: dict = field(default_factory=dict)
    stage_objectives: list = field(default_factory=list)
    flat_direction: bool = False   # near-zero curvature: optimal face may not be a point


def _fd_hessian(grad_fn, x, step):
    """Symmetric central-difference Hessian of a gradient field."""
    n = x.shape[0]
    H = np.empty((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = step
        H[:, k] = (grad_fn(x + e) - grad_fn(x - e)) / (2.0 * step)
    return 0.5 * (H + H.T)


class _SubproblemObjective:
    """Minimized objective sign * sum_i u_i (f_i - beta_i h_i) with derivatives."""

    def __init__(self, problem, alpha, fd_step):
        self.sign = 1.0 if problem.sense == MIN else -1.0
        self.fd_step = fd_step
        self._terms = problem.terms
        self._u = alpha.u
        self._beta = alpha.beta
        self._const_hess = None
        if problem.all_quad_affine:
            A0s, q0s, r0s, cs, ds = problem.quad_stacks()
            w = self.sign * alpha.u
            self._H = np.einsum("i,ijk->jk", w, A0s)
            self._q = w @ q0s - (w * alpha.beta) @ cs
            self._c0 = float(w @ r0s - (w * alpha.beta) @ ds)
            self._const_hess = self._H
            self._quad = True
        else:
            self._quad = False

    def value(self, x):
        if self._quad:
            return 0.5 * float(x @ self._H @ x) + float(self._q @ x) + self._c0
        total = 0.0
        for ui, bi, t in zip(self._u, self._beta, self._terms):
            total += ui * (t.f_value(x) - bi * t.h_value(x))
        return self.sign * total

    def grad(self, x):
        if self._quad:
            return self._H @ x + self._q
        g = np.zeros(x.shape[0])
        for ui, bi, t in zip(self._u, self._beta, self._terms):
            _, gf = t.f_value_grad(x)
            _, gh = t.h_value_grad(x)
            g += ui * (gf - bi * gh)
        return self.sign * g

    def hess(self, x):
        if self._const_hess is not None:
            return self._const_hess
        H = np.zeros((x.shape[0], x.shape[0]))
        for ui, bi, t in zip(self._u, self._beta, self._terms):
            Hf = t.f_hessian(x)
            Hh = t.h_hessian(x)
            if Hf is None or Hh is None:
                return _fd_hessian(self.grad, x, self.fd_step)
            H += ui * (np.asarray(Hf, float) - bi * np.asarray(Hh, float))
        return self.sign * H


class _Constraints:
    """Barrier bookkeeping for linear rows, finite box bounds, smooth rows."""

    def __init__(self, region, fd_step):
        self.region = region
        self.A = region.lin_A
        self.b = region.lin_b
        self.lo_idx = region.finite_lo
        self.lo_val = region.box_lo[region.finite_lo]
        self.hi_idx = region.finite_hi
        self.hi_val = region.box_hi[region.finite_hi]
        self.smooth = region.smooth_g
        self.fd_step = fd_step
        self.count = (self.b.size + self.lo_idx.size + self.hi_idx.size
                      + len(self.smooth))

    def slacks(self, x):
        parts = [self.b - self.A @ x,
                 x[self.lo_idx] - self.lo_val,
                 self.hi_val - x[self.hi_idx]]
        if self.smooth:
            parts.append(np.array([-float(g(x)[0]) for g in self.smooth]))
        return np.concatenate(parts)

    def min_slack(self, x):
        s = self.slacks(x)
        return float(s.min()) if s.size else np.inf

    def barrier_value(self, x):
        s = self.slacks(x)
        if s.size == 0:
            return 0.0
        if (s <= 0).any():
            return np.inf
        return -float(np.log(s).sum())

    def barrier_grad_hess(self, x, need_hess=True):
        n = x.shape[0]
        g = np.zeros(n)
        H = np.zeros((n, n)) if need_hess else None
        if self.b.size:
            s = self.b - self.A @ x
            g += self.A.T @ (1.0 / s)
            if need_hess:
                H += (self.A.T / (s * s)) @ self.A
        if self.lo_idx.size:
            s = x[self.lo_idx] - self.lo_val
            g[self.lo_idx] -= 1.0 / s
            if need_hess:
                H[self.lo_idx, self.lo_idx] += 1.0 / (s * s)
        if self.hi_idx.size:
            s = self.hi_val - x[self.hi_idx]
            g[self.hi_idx] += 1.0 / s
            if need_hess:
                H[self.hi_idx, self.hi_idx] += 1.0 / (s * s)
        for gc in self.smooth:
            out = gc(x)
            v = float(out[0])
            gr = np.asarray(out[1], float)
            s = -v
            g += gr / s
            if need_hess:
                Hg = (np.asarray(out[2], float) if len(out) > 2 and out[2] is not None
                      else _fd_hessian(lambda y, gc=gc: np.asarray(gc(y)[1], float),
                                       x, self.fd_step))
                H += np.outer(gr, gr) / (s * s) + Hg / s
        return g, H

    def constraint_grads(self, x):
        """Gradients of the constraint functions g_j(x) <= 0, slack order."""
        n = x.shape[0]
        rows = [self.A]
        lo = np.zeros((self.lo_idx.size, n))
        lo[np.arange(self.lo_idx.size), self.lo_idx] = -1.0
        rows.append(lo)
        hi = np.zeros((self.hi_idx.size, n))
        hi[np.arange(self.hi_idx.size), self.hi_idx] = 1.0
        rows.append(hi)
        if self.smooth:
            rows.append(np.array([np.asarray(g(x)[1], float) for g in self.smooth]))
        return np.vstack(rows)

    def max_linear_step(self, x, p):
        """Largest step along p keeping linear/box slacks positive (exact)."""
        t_max = np.inf
        if self.b.size:
            d = self.A @ p
            s = self.b - self.A @ x
            pos = d > 0
            if pos.any():
                t_max = min(t_max, float((s[pos] / d[pos]).min()))
        if self.lo_idx.size:
            d = -p[self.lo_idx]
            s = x[self.lo_idx] - self.lo_val
            pos = d > 0
            if pos.any():
                t_max = min(t_max, float((s[pos] / d[pos]).min()))
        if self.hi_idx.size:
            d = p[self.hi_idx]
            s = self.hi_val - x[self.hi_idx]
            pos = d > 0
            if pos.any():
                t_max = min(t_max, float((s[pos] / d[pos]).min()))
        return t_max


def _newton_direction(H, g):
    """Descent direction -H^{-1} g with PSD safeguarding."""
    n = H.shape[0]
    scale = max(1.0, float(np.abs(np.diag(H)).max()))
    for ridge in (0.0, 1e-12 * scale, 1e-9 * scale):
        try:
            cf = scipy.linalg.cho_factor(H + ridge * np.eye(n) if ridge else H,
                                         lower=True, check_finite=False)
            return -scipy.linalg.cho_solve(cf, g, check_finite=False)
        except scipy.linalg.LinAlgError:
            continue
    w = np.linalg.eigvalsh(H)
    if w[0] < -1e-8 * max(1.0, float(w[-1])):
        raise NonConvexDetected(
            f"subproblem Hessian has eigenvalue {w[0]:.3g} (most positive {w[-1]:.3g})")
    shift = abs(float(w[0])) + 1e-10 * scale
    return -np.linalg.solve(H + shift * np.eye(n), g)


def _stage_tol(t, phi_x):
    """Decrement tolerance for one barrier stage.

    A decrement of d means the stage center is ~d suboptimal in phi = t*obj
    units, i.e. d/t in objective units, so the tolerance scales with t; the
    phi term keeps it reachable when function values are large, the absolute
    floor when they are tiny.
    """
    return max(1e-12, 1e-13 * t, 1e-13 * abs(phi_x))


def _newton_stage(obj, cons, x, t, cfg):
    """Damped Newton on t*obj + barrier; returns (x, iterations taken)."""
    iters = 0

    def phi(y):
        return t * obj.value(y) + cons.barrier_value(y)

    while True:
        g = t * obj.grad(x) + cons.barrier_grad_hess(x, need_hess=False)[0]
        H = t * obj.hess(x) + cons.barrier_grad_hess(x)[1]
        p = _newton_direction(H, g)
        dec_half = max(0.0, -0.5 * float(g @ p))  # ~ phi(x) - min of quadratic model
        phi_x = phi(x)
        tol = _stage_tol(t, phi_x)
        if dec_half <= tol:
            break
        if iters >= cfg.max_newton:
            if dec_half <= 1e4 * tol:
                break
            raise MaxIterations(
                f"Newton stagnated after {iters} steps (decrement {dec_half:.3g})")
        step = min(1.0, 0.99 * cons.max_linear_step(x, p))
        phi_trial = np.inf
        # shrink into the strict interior of the smooth rows, then Armijo
        while step > 1e-16 and not np.isfinite(phi_trial := phi(x + step * p)):
            step *= 0.5
        while step > 1e-16 and phi_trial > phi_x - _ARMIJO_C1 * step * 2.0 * dec_half:
            step *= 0.5
            phi_trial = phi(x + step * p)
        if step <= 1e-13:
            if dec_half <= 1e4 * tol:
                break
            raise MaxIterations("Newton step collapsed before reaching tolerance")
        x = x + step * p
        iters += 1
    return x, iters


def _polish_stage(obj, cons, x, t, cfg, grad_target):
    """Drive the raw gradient norm of t*obj + barrier below ``grad_target``.

    Function values of the barrier objective carry O(t * eps_mach * scale)
    rounding noise near the center, so this phase backtracks on the gradient
    norm (meaningful to assembly precision) instead of on phi.
    """
    iters = 0
    best_gnorm = np.inf
    stall = 0

    def grad(y):
        return t * obj.grad(y) + cons.barrier_grad_hess(y, need_hess=False)[0]

    while iters < cfg.max_newton:
        g = grad(x)
        gnorm = float(np.linalg.norm(g))
        if gnorm <= grad_target:
            break
        if gnorm < 0.8 * best_gnorm:
            best_gnorm, stall = gnorm, 0
        else:
            stall += 1
            if stall >= 3:
                break  # floating-point noise floor for this t
        H = t * obj.hess(x) + cons.barrier_grad_hess(x)[1]
        p = _newton_direction(H, g)
        step = min(1.0, 0.99 * cons.max_linear_step(x, p))
        while step > 1e-16 and cons.min_slack(x + step * p) <= 0.0:
            step *= 0.5
        while (step > 1e-16
               and float(np.linalg.norm(grad(x + step * p)))
               > (1.0 - _ARMIJO_C1 * step) * gnorm):
            step *= 0.5
        if step <= 1e-14:
            break
        x = x + step * p
        iters += 1
    return x, iters


def _strictly_feasible_start(x0, cons, region, x_interior):
    """Warm start pulled toward the interior anchor until slacks are positive."""
    x0 = np.asarray(x0, float)
    if cons.min_slack(x0) > _MIN_START_SLACK:
        return x0.copy()
    anchor = x_interior if x_interior is not None else find_feasible_point(region)
    if anchor is None:
        raise Infeasible("region has no strictly feasible interior point")
    tau = _PULL_FACTOR
    while tau < 1.0:
        x = (1.0 - tau) * x0 + tau * anchor
        if cons.min_slack(x) > _MIN_START_SLACK:
            return x
        tau *= 10.0
    if cons.min_slack(anchor) > 0:
        return np.asarray(anchor, float).copy()
    raise Infeasible("interior anchor point lost strict feasibility")


def subproblem_value_grad(problem, alpha, x):
    """Weighted objective sum_i u_i (f_i - beta_i h_i) and gradient at x."""
    x = np.asarray(x, float)
    val = 0.0
    g = np.zeros(x.shape[0])
    for ui, bi, t in zip(alpha.u, alpha.beta, problem.terms):
        f, gf = t.f_value_grad(x)
        h, gh = t.h_value_grad(x)
        val += ui * (f - bi * h)
        g += ui * (gf - bi * gh)
    return float(val), g


def _refine_multipliers(g0, J, slacks, lam_barrier):
    """Multipliers minimizing the reported stationarity residual.

    The barrier's implied multipliers 1/(t*s_j) inherit the t-amplified
    rounding noise of the final iterate, so the raw residual stalls orders of
    magnitude above what x actually supports.  Nonnegative least squares on
    ||g0 + J^T lam|| recovers the sharp residual; the barrier multipliers stay
    as a fallback in case nnls does worse.  Returns (lam, stationarity,
    complementarity).
    """
    if J.shape[0] == 0:
        return lam_barrier, float(np.linalg.norm(g0)), 0.0
    try:
        lam_ls = scipy.optimize.nnls(J.T, -g0)[0]
    except Exception:
        log.debug("nnls multiplier refinement failed", exc_info=True)
        lam_ls = None
    best = None
    for lam in (lam_ls, lam_barrier):
        if lam is None:
            continue
        stationarity = float(np.linalg.norm(g0 + J.T @ lam))
        comp = float((lam * slacks).max())
        if best is None or max(stationarity, comp) < max(best[1], best[2]):
            best = (lam, stationarity, comp)
    return best


def solve_subproblem(problem, alpha, x_start, cfg=None, x_interior=None):
    """Solve the convex parametric subproblem at parameters ``alpha``.

    Returns a SubproblemSolution whose ``kkt_residual`` is the first-order
    optimality residual of the constrained program at x — the maximum of the
    Lagrangian stationarity norm and the worst complementarity product under
    the reported multipliers.  Deterministic for fixed inputs.
    """
    cfg = cfg or InnerConfig()
    obj = _SubproblemObjective(problem, alpha, cfg.fd_hessian_step)
    cons = _Constraints(problem.region, cfg.fd_hessian_step)
    x = _strictly_feasible_start(x_start, cons, problem.region, x_interior)
    m = cons.count
    t = cfg.initial_t
    stages = 0
    newton_total = 0
    stage_objectives = []
    while True:
        x, it = _newton_stage(obj, cons, x, t, cfg)
        stages += 1
        newton_total += it
        stage_objectives.append(obj.sign * obj.value(x))
        if m == 0 or m / t <= cfg.kkt_tol:
            break
        t *= cfg.barrier_mu
    # final polish: drive the raw gradient low enough that the translated
    # stationarity residual ||grad phi|| / t sits safely under the tolerance
    x, it = _polish_stage(obj, cons, x, t, cfg,
                          grad_target=0.5 * cfg.kkt_tol * t)
    newton_total += it
    slacks = cons.slacks(x)
    lam_barrier = 1.0 / (t * slacks) if m else np.zeros(0)
    lam, stationarity, comp = _refine_multipliers(
        obj.grad(x), cons.constraint_grads(x), slacks, lam_barrier)
    nb, nlo, nhi = cons.b.size, cons.lo_idx.size, cons.hi_idx.size
    multipliers = {
        "t": t,
        "lin": lam[:nb],
        "lo": lam[nb:nb + nlo],
        "hi": lam[nb + nlo:nb + nlo + nhi],
        "smooth": lam[nb + nlo + nhi:],
    }
    Hmin = obj.hess(x)
    w = np.linalg.eigvalsh(0.5 * (Hmin + Hmin.T))
    flat = bool(w[0] <= _FLAT_EIG_RATIO * max(1.0, float(abs(w[-1]))))
    return SubproblemSolution(
        x=x,
        objective=obj.sign * obj.value(x),
        kkt_residual=max(stationarity, comp),
        barrier_outer_iters=stages,
        newton_iters=newton_total,
        t_final=t,
        multipliers=multipliers,
        stage_objectives=stage_objectives,
        flat_direction=flat,
    )
