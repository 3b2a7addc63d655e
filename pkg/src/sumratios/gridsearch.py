"""Brute-force grid oracle for low-dimensional cross-checks.

Enumerates an axis-aligned grid anchored at the lower bounds, filters by
feasibility, and returns the best objective value.  Intended as an
independent reference for solver results, not as a solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DenominatorNonpositive, DimensionTooLarge, EmptyGrid
from .problem import MIN

_MAX_DIM = 3
_FEAS_TOL = 1e-9
_CHUNK = 200_000


@dataclass
class GridResult:
    best_x: np.ndarray
    best_value: float
    resolution: float
    points_evaluated: int


def _finite_bounds(region):
    """Per-axis finite bounds, tightening from linear rows where the box is open.

    One-directional interval propagation: a row sum a'x <= b caps coordinate i
    above (a_i > 0) or below (a_i < 0) once every other coordinate's
    contribution is bounded.  A few passes suffice for the regions this oracle
    is used on; raises ValueError if some axis stays unbounded.
    """
    lo = region.box_lo.copy()
    hi = region.box_hi.copy()
    for _ in range(3):
        for a, b in zip(region.lin_A, region.lin_b):
            contrib_min = np.where(a > 0, a * lo, a * hi)  # per-coordinate minima
            if not np.isfinite(contrib_min).all():
                continue
            total = contrib_min.sum()
            for i in range(region.n):
                if a[i] > 0:
                    hi[i] = min(hi[i], (b - (total - contrib_min[i])) / a[i])
                elif a[i] < 0:
                    lo[i] = max(lo[i], (b - (total - contrib_min[i])) / a[i])
    if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
        raise ValueError("grid bounds are not finite and cannot be derived "
                         "from the linear rows")
    return lo, hi


def _axis(lo, hi, res):
    count = int(np.floor((hi - lo) / res + 1e-9)) + 1
    return lo + res * np.arange(count)


def grid_search(problem, resolution):
    """Best feasible grid point at the given resolution.

    Ties are broken toward the lexicographically smallest grid index (C-order
    scan).  ``points_evaluated`` counts feasible points whose objective was
    computed.
    """
    if problem.n > _MAX_DIM:
        raise DimensionTooLarge(
            f"grid search enumerates at most {_MAX_DIM} dimensions, got {problem.n}")
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    lo, hi = _finite_bounds(problem.region)
    if (lo > hi + 1e-12).any():
        raise EmptyGrid("derived bounds leave no grid points")
    axes = [_axis(lo[i], hi[i], resolution) for i in range(problem.n)]
    tail = axes[1:]
    tail_grid = (np.stack([m.ravel() for m in np.meshgrid(*tail, indexing="ij")], axis=1)
                 if tail else np.zeros((1, 0)))
    block_rows = max(1, _CHUNK // max(1, tail_grid.shape[0]))
    sense_key = 1.0 if problem.sense == MIN else -1.0
    best_key = np.inf
    best_x = None
    evaluated = 0
    row_len = tail_grid.shape[0]
    for start in range(0, axes[0].size, block_rows):
        lead = axes[0][start:start + block_rows]
        pts = np.empty((lead.size * row_len, problem.n))
        pts[:, 0] = np.repeat(lead, row_len)
        if tail:
            pts[:, 1:] = np.tile(tail_grid, (lead.size, 1))
        mask = np.ones(pts.shape[0], dtype=bool)
        if problem.region.lin_b.size:
            mask &= (pts @ problem.region.lin_A.T
                     <= problem.region.lin_b + _FEAS_TOL).all(axis=1)
        for g in problem.region.smooth_g:
            mask &= np.array([float(g(p)[0]) <= _FEAS_TOL for p in pts])
        if not mask.any():
            continue
        feas = pts[mask]
        total = np.zeros(feas.shape[0])
        for term in problem.terms:
            h = term.h_values(feas)
            if (h <= 0).any():
                j = int(np.argmax(h <= 0))
                raise DenominatorNonpositive(
                    f"denominator {h[j]:.6g} <= 0 at feasible grid point {feas[j]}")
            total += term.f_values(feas) / h
        evaluated += feas.shape[0]
        keys = sense_key * total
        j = int(np.argmin(keys))  # first minimum = smallest index within block
        if keys[j] < best_key:
            best_key = float(keys[j])
            best_x = feas[j].copy()
    if best_x is None:
        raise EmptyGrid(f"no feasible grid point at resolution {resolution}")
    return GridResult(best_x, sense_key * best_key, resolution, evaluated)
