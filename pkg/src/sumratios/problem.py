"""Sum-of-ratios problem instances and their evaluation.

A problem bundles an optimization sense, N ratio terms f_i(x)/h_i(x), and a
convex feasible region (linear rows, box bounds, optional smooth constraint
callbacks).  Terms come in two families: explicit quadratic-numerator /
affine-denominator data, and general differentiable callbacks for anything
that shape cannot express.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DenominatorNonpositive, DimensionMismatch

log = logging.getLogger(__name__)

MIN = "min"
MAX = "max"

#: Default lower bound of the parameter box for the reciprocal-denominator
#: weights.  They track 1/h_i(x), which stays bounded away from zero on a
#: compact feasible set, so a tiny floor never binds in practice.
DEFAULT_U_FLOOR = 1e-8


def _as_vector(x, n=None, name="x"):
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch(f"{name}: expected a 1-d array, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise DimensionMismatch(f"{name}: length {v.shape[0]} != {n}")
    return v


class RatioTerm:
    """One fractional term f(x)/h(x) of the objective."""

    def f_value_grad(self, x):
        """Return (f(x), grad f(x))."""
        raise NotImplementedError

    def h_value_grad(self, x):
        """Return (h(x), grad h(x))."""
        raise NotImplementedError

    def f_value(self, x):
        return self.f_value_grad(x)[0]

    def h_value(self, x):
        return self.h_value_grad(x)[0]

    def f_hessian(self, x):
        """Hessian of the numerator, or None when only gradients exist."""
        return None

    def h_hessian(self, x):
        return None

    def f_values(self, pts):
        """Numerator on a (m, n) batch of points; default loops per point."""
        return np.array([self.f_value(p) for p in np.asarray(pts, float)])

    def h_values(self, pts):
        return np.array([self.h_value(p) for p in np.asarray(pts, float)])


class QuadAffineTerm(RatioTerm):
    """f(x) = 0.5 x'A0 x + q0'x + r0 over an affine h(x) = c'x + d."""

    def __init__(self, A0, q0, r0=0.0, c=None, d=0.0):
        q0 = _as_vector(q0, name="q0")
        n = q0.shape[0]
        if A0 is None:
            A0 = np.zeros((n, n))
        A0 = np.asarray(A0, dtype=float)
        if A0.shape != (n, n):
            raise DimensionMismatch(f"A0: shape {A0.shape} != ({n}, {n})")
        if c is None:
            raise DimensionMismatch("c: the affine denominator requires a coefficient vector")
        self.A0 = 0.5 * (A0 + A0.T)  # evaluation assumes symmetry
        self.q0 = q0
        self.r0 = float(r0)
        self.c = _as_vector(c, n, name="c")
        self.d = float(d)
        self.n = n

    def f_value(self, x):
        x = np.asarray(x, float)
        return 0.5 * float(x @ self.A0 @ x) + float(self.q0 @ x) + self.r0

    def f_value_grad(self, x):
        x = np.asarray(x, float)
        Ax = self.A0 @ x
        return 0.5 * float(x @ Ax) + float(self.q0 @ x) + self.r0, Ax + self.q0

    def h_value(self, x):
        return float(self.c @ np.asarray(x, float)) + self.d

    def h_value_grad(self, x):
        return self.h_value(x), self.c.copy()

    def f_hessian(self, x):
        return self.A0

    def h_hessian(self, x):
        return np.zeros((self.n, self.n))

    def f_values(self, pts):
        pts = np.asarray(pts, float)
        return 0.5 * np.einsum("ij,jk,ik->i", pts, self.A0, pts) + pts @ self.q0 + self.r0

    def h_values(self, pts):
        return np.asarray(pts, float) @ self.c + self.d


class CallbackTerm(RatioTerm):
    """Ratio term backed by user evaluators.

    Each evaluator maps x to (value, gradient) or (value, gradient, hessian).
    ``convexity_tag`` declares the curvature family of the numerator:
    "convex" (min-sense problems, concave denominator expected) or "concave"
    (max-sense problems, convex denominator expected).  Optional ``f_batch`` /
    ``h_batch`` callables evaluate values on an (m, n) block for grid scans.
    """

    def __init__(self, f, h, convexity_tag="convex", f_batch=None, h_batch=None):
        if convexity_tag not in ("convex", "concave"):
            raise ValueError(f"convexity_tag: {convexity_tag!r} not in ('convex', 'concave')")
        self._f = f
        self._h = h
        self.convexity_tag = convexity_tag
        self._f_batch = f_batch
        self._h_batch = h_batch

    def f_value_grad(self, x):
        out = self._f(np.asarray(x, float))
        return float(out[0]), np.asarray(out[1], float)

    def h_value_grad(self, x):
        out = self._h(np.asarray(x, float))
        return float(out[0]), np.asarray(out[1], float)

    def f_hessian(self, x):
        out = self._f(np.asarray(x, float))
        if len(out) > 2 and out[2] is not None:
            return np.asarray(out[2], float)
        return None

    def h_hessian(self, x):
        out = self._h(np.asarray(x, float))
        if len(out) > 2 and out[2] is not None:
            return np.asarray(out[2], float)
        return None

    def f_values(self, pts):
        if self._f_batch is not None:
            return np.asarray(self._f_batch(np.asarray(pts, float)), float)
        return super().f_values(pts)

    def h_values(self, pts):
        if self._h_batch is not None:
            return np.asarray(self._h_batch(np.asarray(pts, float)), float)
        return super().h_values(pts)


class FeasibleRegion:
    """Convex region {x : lin_A x <= lin_b, box_lo <= x <= box_hi, g_j(x) <= 0}.

    ``smooth_g`` is a sequence of callables mapping x to (value, gradient) or
    (value, gradient, hessian).  Box entries may be +-inf for one-sided or
    absent bounds.
    """

    def __init__(self, lin_A=None, lin_b=None, box_lo=None, box_hi=None,
                 smooth_g=(), n=None):
        if lin_A is None:
            if n is None and box_lo is None:
                raise DimensionMismatch("region dimension cannot be inferred")
            dim = n if n is not None else len(np.atleast_1d(box_lo))
            lin_A = np.zeros((0, dim))
            lin_b = np.zeros(0)
        self.lin_A = np.atleast_2d(np.asarray(lin_A, dtype=float))
        self.lin_b = _as_vector(lin_b if lin_b is not None else [], name="lin_b")
        if self.lin_A.shape[0] != self.lin_b.shape[0]:
            raise DimensionMismatch(
                f"lin_A has {self.lin_A.shape[0]} rows but lin_b has {self.lin_b.shape[0]}")
        self.n = self.lin_A.shape[1] if n is None else int(n)
        if self.lin_A.shape[1] != self.n:
            raise DimensionMismatch(f"lin_A: {self.lin_A.shape[1]} columns != n={self.n}")
        self.box_lo = (np.full(self.n, -np.inf) if box_lo is None
                       else _as_vector(box_lo, self.n, name="box_lo"))
        self.box_hi = (np.full(self.n, np.inf) if box_hi is None
                       else _as_vector(box_hi, self.n, name="box_hi"))
        self.smooth_g = tuple(smooth_g)
        self.finite_lo = np.flatnonzero(np.isfinite(self.box_lo))
        self.finite_hi = np.flatnonzero(np.isfinite(self.box_hi))

    @property
    def constraint_count(self):
        return (self.lin_b.shape[0] + self.finite_lo.size + self.finite_hi.size
                + len(self.smooth_g))

    def violations(self, x):
        """Per-constraint violations, <= 0 meaning satisfied.

        Row order: linear rows, finite lower bounds, finite upper bounds,
        smooth constraints.
        """
        x = _as_vector(x, self.n)
        parts = [self.lin_A @ x - self.lin_b,
                 self.box_lo[self.finite_lo] - x[self.finite_lo],
                 x[self.finite_hi] - self.box_hi[self.finite_hi]]
        if self.smooth_g:
            parts.append(np.array([float(g(x)[0]) for g in self.smooth_g]))
        return np.concatenate(parts)

    def max_violation(self, x):
        v = self.violations(x)
        return float(v.max()) if v.size else -np.inf

    def contains(self, x, tol=1e-9):
        return self.max_violation(x) <= tol


@dataclass
class Problem:
    """A sum-of-ratios instance: optimize sum_i f_i(x)/h_i(x) over a region."""

    sense: str
    terms: list
    region: FeasibleRegion
    n: int

    def __post_init__(self):
        if self.sense not in (MIN, MAX):
            raise ValueError(f"sense: {self.sense!r} not in ('{MIN}', '{MAX}')")
        if not self.terms:
            raise ValueError("a problem needs at least one ratio term")
        self.terms = list(self.terms)
        if self.region.n != self.n:
            raise DimensionMismatch(f"region dimension {self.region.n} != n={self.n}")
        for i, t in enumerate(self.terms):
            if isinstance(t, QuadAffineTerm) and t.n != self.n:
                raise DimensionMismatch(f"terms[{i}]: dimension {t.n} != n={self.n}")
        self._quad_stack = None

    @property
    def n_terms(self):
        return len(self.terms)

    @property
    def all_quad_affine(self):
        return all(isinstance(t, QuadAffineTerm) for t in self.terms)

    def quad_stacks(self):
        """Stacked (A0, q0, r0, c, d) arrays for all-quadratic instances."""
        if not self.all_quad_affine:
            raise TypeError("quad_stacks() requires every term to be quad-affine")
        if self._quad_stack is None:
            self._quad_stack = (
                np.stack([t.A0 for t in self.terms]),
                np.stack([t.q0 for t in self.terms]),
                np.array([t.r0 for t in self.terms]),
                np.stack([t.c for t in self.terms]),
                np.array([t.d for t in self.terms]),
            )
        return self._quad_stack


@dataclass
class ParamVector:
    """Outer-iteration parameters: per-term ratio levels and denominator weights.

    Lives in the box Omega = {beta >= 0, u >= l > 0}.
    """

    beta: np.ndarray
    u: np.ndarray
    l: float = DEFAULT_U_FLOOR

    def __post_init__(self):
        self.beta = np.atleast_1d(np.asarray(self.beta, dtype=float)).copy()
        self.u = np.atleast_1d(np.asarray(self.u, dtype=float)).copy()
        if self.beta.shape != self.u.shape:
            raise DimensionMismatch(
                f"beta shape {self.beta.shape} != u shape {self.u.shape}")
        if not self.l > 0:
            raise ValueError(f"parameter floor l must be positive, got {self.l}")

    @property
    def n_terms(self):
        return self.beta.shape[0]

    def stacked(self):
        """Concatenated (beta, u) as one 2N vector."""
        return np.concatenate([self.beta, self.u])

    @classmethod
    def from_stacked(cls, vec, l=DEFAULT_U_FLOOR):
        vec = _as_vector(vec, name="stacked parameters")
        if vec.size % 2:
            raise DimensionMismatch(f"stacked parameter vector has odd length {vec.size}")
        half = vec.size // 2
        return cls(vec[:half], vec[half:], l)

    def in_omega(self):
        return bool((self.beta >= 0).all() and (self.u >= self.l).all())

    def clamped(self):
        """Projection onto Omega (componentwise clip)."""
        return ParamVector(np.maximum(self.beta, 0.0), np.maximum(self.u, self.l), self.l)

    def copy(self):
        return ParamVector(self.beta.copy(), self.u.copy(), self.l)


def eval_term(term, x):
    """Evaluate one term: (f, h, grad_f, grad_h); raises if h(x) <= 0."""
    f, gf = term.f_value_grad(x)
    h, gh = term.h_value_grad(x)
    if h <= 0:
        raise DenominatorNonpositive(f"denominator h(x) = {h:.6g} <= 0")
    return f, h, gf, gh


def term_values(problem, x):
    """Arrays (f_1..f_N, h_1..h_N) at x; raises if any denominator <= 0."""
    f = np.empty(problem.n_terms)
    h = np.empty(problem.n_terms)
    for i, t in enumerate(problem.terms):
        f[i] = t.f_value(x)
        h[i] = t.h_value(x)
    if (h <= 0).any():
        i = int(np.argmax(h <= 0))
        raise DenominatorNonpositive(f"denominator {i} is {h[i]:.6g} <= 0 at x={np.asarray(x)}")
    return f, h


def eval_objective(problem, x):
    """The sum of ratios sum_i f_i(x)/h_i(x)."""
    f, h = term_values(problem, x)
    return float(np.sum(f / h))


def min_denominator(problem, x):
    """Smallest denominator value at x (certificate scaling)."""
    _, h = term_values(problem, x)
    return float(h.min())


def feasibility_residuals(problem, x):
    """(max_violation, per_constraint) for x; <= 0 everywhere means feasible."""
    per = problem.region.violations(x)
    mx = float(per.max()) if per.size else -np.inf
    return mx, per


@dataclass
class ValidationCheck:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def add(self, name, ok, detail=""):
        self.checks.append(ValidationCheck(name, bool(ok), detail))


def validate(problem, probe_points):
    """Feasible-instance sanity report on caller-supplied probe points.

    Spot checks only (no symbolic verification): numerator sign, denominator
    positivity, gradient availability, midpoint curvature consistent with the
    problem sense, and an interior-point existence probe.
    """
    from .feasibility import find_feasible_point  # local import, no cycle

    report = ValidationReport()
    probes = [np.asarray(p, float) for p in probe_points]
    for i, term in enumerate(problem.terms):
        bad_f, bad_h = [], []
        missing_grad = False
        for p in probes:
            try:
                f, gf = term.f_value_grad(p)
                h, gh = term.h_value_grad(p)
            except Exception as exc:  # noqa: BLE001 - report, do not raise
                report.add(f"term[{i}].evaluates", False, f"raised {exc!r}")
                break
            if gf is None or np.shape(gf) != (problem.n,):
                missing_grad = True
            if gh is None or np.shape(gh) != (problem.n,):
                missing_grad = True
            if f < -1e-12:
                bad_f.append((p, f))
            if h <= 0:
                bad_h.append((p, h))
        report.add(f"term[{i}].numerator_nonnegative", not bad_f,
                   "" if not bad_f else f"f={bad_f[0][1]:.6g} at {bad_f[0][0]}")
        report.add(f"term[{i}].denominator_positive", not bad_h,
                   "" if not bad_h else f"h={bad_h[0][1]:.6g} at {bad_h[0][0]}")
        report.add(f"term[{i}].gradients_present", not missing_grad)
        report.checks.extend(_curvature_checks(problem, term, i, probes))
    pt = find_feasible_point(problem.region)
    report.add("region.interior_point", pt is not None,
               "" if pt is not None else "phase-one search found no strict interior")
    return report


def _curvature_checks(problem, term, i, probes):
    """Midpoint curvature spot checks for one term (sampled, not a proof)."""
    checks = []
    # min-sense wants convex f / concave h; max-sense the reverse
    want_f_convex = problem.sense == MIN
    if isinstance(term, QuadAffineTerm):
        w = np.linalg.eigvalsh(term.A0)
        scale = max(1.0, float(np.abs(w).max()))
        ok = w[0] >= -1e-10 * scale if want_f_convex else w[-1] <= 1e-10 * scale
        checks.append(ValidationCheck(
            f"term[{i}].curvature", ok,
            f"A0 eigenvalues in [{w[0]:.3g}, {w[-1]:.3g}]"))
        return checks
    ok = True
    detail = ""
    for a, b in zip(probes[:-1], probes[1:]):
        mid = 0.5 * (a + b)
        try:
            fm = term.f_value(mid)
            fa, fb = term.f_value(a), term.f_value(b)
            hm = term.h_value(mid)
            ha, hb = term.h_value(a), term.h_value(b)
        except Exception:  # noqa: BLE001 - covered by the evaluates check
            return checks
        tol = 1e-9 * max(1.0, abs(fa) + abs(fb))
        f_gap = fm - 0.5 * (fa + fb)       # <= 0 for convex f
        h_gap = hm - 0.5 * (ha + hb)       # >= 0 for concave h
        if want_f_convex:
            bad = f_gap > tol or h_gap < -tol
        else:
            bad = f_gap < -tol or h_gap > tol
        if bad:
            ok = False
            detail = f"midpoint curvature off between {a} and {b}"
            break
    checks.append(ValidationCheck(f"term[{i}].curvature", ok, detail))
    return checks
