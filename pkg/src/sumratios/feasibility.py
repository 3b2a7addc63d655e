"""Phase-one search for strictly interior feasible points.

Minimizes the maximum constraint violation over the box with a projected
subgradient descent from the box center.  Box bounds are enforced by clipping
into a slightly shrunken box so that the returned point always has positive
slack on every finite bound.
"""

from __future__ import annotations

import numpy as np

_MARGIN_REQUIRED = 1e-6  # strict-feasibility certificate on non-box rows


def interior_box_point(lo, hi):
    """A point strictly inside [lo, hi] (midpoint; unit offset if one-sided)."""
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    x = np.zeros(lo.shape)
    both = np.isfinite(lo) & np.isfinite(hi)
    x[both] = 0.5 * (lo[both] + hi[both])
    lo_only = np.isfinite(lo) & ~np.isfinite(hi)
    x[lo_only] = lo[lo_only] + 1.0
    hi_only = ~np.isfinite(lo) & np.isfinite(hi)
    x[hi_only] = hi[hi_only] - 1.0
    return x


def _shrunken_box(lo, hi):
    """Pull finite bounds inward so clipped iterates keep positive box slack."""
    lo = np.asarray(lo, float).copy()
    hi = np.asarray(hi, float).copy()
    width = hi - lo
    eps = np.where(np.isfinite(width), np.minimum(1e-3 * width, 0.1), 1e-3)
    lo_s = np.where(np.isfinite(lo), lo + eps, lo)
    hi_s = np.where(np.isfinite(hi), hi - eps, hi)
    return lo_s, hi_s


def _worst_row(region, x):
    """(max violation, a subgradient of the max) over linear + smooth rows."""
    best_v = -np.inf
    best_g = np.zeros(region.n)
    if region.lin_b.size:
        vals = region.lin_A @ x - region.lin_b
        j = int(np.argmax(vals))
        best_v = float(vals[j])
        best_g = region.lin_A[j]
    for g in region.smooth_g:
        out = g(x)
        if float(out[0]) > best_v:
            best_v = float(out[0])
            best_g = np.asarray(out[1], float)
    return best_v, best_g


def find_feasible_point(region, margin_goal=1e-2, max_iter=2000):
    """Strictly feasible point of the region, or None when none is found.

    The returned point satisfies every finite box bound with positive slack
    and every linear/smooth row with margin at least 1e-6.  Deterministic.
    """
    lo_s, hi_s = _shrunken_box(region.box_lo, region.box_hi)
    if (lo_s > hi_s).any():
        return None  # empty or zero-width box: no strict interior
    x = interior_box_point(lo_s, hi_s)
    if not region.lin_b.size and not region.smooth_g:
        return x
    widths = (hi_s - lo_s)[np.isfinite(hi_s - lo_s)]
    step0 = max(1.0, 0.25 * float(np.median(widths))) if widths.size else 1.0
    best_x, best_v = x.copy(), _worst_row(region, x)[0]
    for k in range(max_iter):
        v, sub = _worst_row(region, x)
        if v < best_v:
            best_v, best_x = v, x.copy()
        if best_v <= -margin_goal:
            break
        norm = float(np.linalg.norm(sub))
        if norm == 0.0:
            break  # flat worst row: no direction can improve it
        x = np.clip(x - (step0 / np.sqrt(k + 1.0)) * sub / norm, lo_s, hi_s)
    return best_x if best_v <= -_MARGIN_REQUIRED else None
