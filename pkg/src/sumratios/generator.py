"""Seeded random quadratic-over-affine benchmark instances.

Each term i = 1..N gets a numerator Hessian A0_i = U_i D0_i U_i' where U_i is
a product of three Householder reflections with seeded direction vectors and
D0_i is diagonal with entries uniform in [i*d_low, i*d_high] — the index
scaling keeps each term's curvature commensurate with its affine coefficients
(which also grow with i), so outer iteration counts stay flat as terms are
added.  Denominators are affine with positive coefficients, so every term is
nonnegative over the box.  The region is five random linear rows over the box
[1, 5]^n; instances whose region has no strict interior are resampled from
the same stream.

Draw order per instance (one numpy default_rng(seed) stream): for each term
i = 1..N in index order — omega1(n), omega2(n), omega3(n), D0 diagonal(n),
c_i(n), q0_i(n) — then the linear rows A row-major (5 x n), then b(5).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import GenerationFailed, ZeroVector
from .feasibility import find_feasible_point
from .problem import MIN, FeasibleRegion, Problem, QuadAffineTerm

log = logging.getLogger(__name__)

_N_ROWS = 5  # linear rows per generated region


@dataclass
class GenSpec:
    """Size, seed, and spectrum bounds of one random instance.

    Term i's numerator Hessian has eigenvalues uniform in [i*d_low, i*d_high].
    """

    n: int
    n_terms: int
    seed: int
    d_low: float = 1.0
    d_high: float = 10.0
    max_resample: int = 50

    def __post_init__(self):
        if self.n < 1 or self.n_terms < 1:
            raise ValueError("n and n_terms must be positive")
        if not 0 < self.d_low <= self.d_high:
            raise ValueError("need 0 < d_low <= d_high")


def householder(omega):
    """Reflection I - 2 omega omega' / ||omega||^2 (orthogonal, symmetric)."""
    omega = np.asarray(omega, dtype=float)
    nrm2 = float(omega @ omega)
    if nrm2 == 0.0:
        raise ZeroVector("reflection vector must be nonzero")
    return np.eye(omega.shape[0]) - (2.0 / nrm2) * np.outer(omega, omega)


def orthogonal_factor(rng, term_index, n):
    """Product of three seeded Householder reflections for term ``term_index``.

    Consumes exactly 3n uniform draws from ``rng`` in documented order.
    """
    i = float(term_index)
    q1 = householder(-i + rng.random(n))
    q2 = householder(-2.0 * i + 2.0 * rng.random(n))
    q3 = householder(-3.0 * i + 3.0 * rng.random(n))
    return q1 @ q2 @ q3


def _draw_instance(rng, spec):
    terms = []
    for i in range(1, spec.n_terms + 1):
        U = orthogonal_factor(rng, i, spec.n)
        dvals = i * rng.uniform(spec.d_low, spec.d_high, spec.n)
        A0 = (U * dvals) @ U.T
        c = i - i * rng.random(spec.n)       # entries in (0, i]
        q0 = i + i * rng.random(spec.n)      # entries in [i, 2i)
        terms.append(QuadAffineTerm(A0, q0, 0.0, c, 0.0))
    A = -1.0 + 2.0 * rng.random((_N_ROWS, spec.n))
    b = 2.0 + 3.0 * rng.random(_N_ROWS)
    region = FeasibleRegion(A, b, np.ones(spec.n), 5.0 * np.ones(spec.n))
    return Problem(MIN, terms, region, spec.n)


def generate(spec):
    """Random min-sense instance per ``spec``; deterministic in the seed.

    Raises GenerationFailed when ``max_resample`` consecutive draws all lack a
    strictly feasible interior.
    """
    rng = np.random.default_rng(spec.seed)
    for attempt in range(1, spec.max_resample + 1):
        problem = _draw_instance(rng, spec)
        if find_feasible_point(problem.region) is not None:
            if attempt > 1:
                log.info("instance (n=%d, terms=%d, seed=%d) needed %d draws",
                         spec.n, spec.n_terms, spec.seed, attempt)
            return problem
    raise GenerationFailed(
        f"no feasible instance in {spec.max_resample} draws "
        f"(n={spec.n}, terms={spec.n_terms}, seed={spec.seed})")
