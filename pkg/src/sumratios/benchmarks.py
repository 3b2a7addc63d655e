"""Built-in two-dimensional benchmark instances.

Both maximize a two-term ratio sum over the simplex-like region
{x >= 0, x1 + x2 <= 1}; numerators are linear and denominators convex
quadratics, so the callback family carries them (an affine denominator is the
only quadratic the file format stores).
"""

from __future__ import annotations

import numpy as np

from .problem import MAX, CallbackTerm, FeasibleRegion, Problem


def _coordinate_numerator(i):
    def f(x):
        g = np.zeros(x.shape[0])
        g[i] = 1.0
        return float(x[i]), g, np.zeros((x.shape[0], x.shape[0]))

    return f


def _simplex_region():
    return FeasibleRegion([[1.0, 1.0]], [1.0], [0.0, 0.0], [np.inf, np.inf])


def problem_one():
    """max x1/(x1^2 + x2^2 + 1) + x2/(x1 + x2 + 1) over the unit simplex."""

    def h1(x):
        return (float(x[0] ** 2 + x[1] ** 2 + 1.0),
                np.array([2.0 * x[0], 2.0 * x[1]]),
                2.0 * np.eye(2))

    def h2(x):
        return float(x[0] + x[1] + 1.0), np.array([1.0, 1.0]), np.zeros((2, 2))

    terms = [
        CallbackTerm(_coordinate_numerator(0), h1, "concave",
                     f_batch=lambda X: X[:, 0],
                     h_batch=lambda X: X[:, 0] ** 2 + X[:, 1] ** 2 + 1.0),
        CallbackTerm(_coordinate_numerator(1), h2, "concave",
                     f_batch=lambda X: X[:, 1],
                     h_batch=lambda X: X[:, 0] + X[:, 1] + 1.0),
    ]
    return Problem(MAX, terms, _simplex_region(), 2)


def problem_two():
    """max x1/(x1^2 + 1) + x2/(x2^2 + 1) over the unit simplex.

    Optimum (1/2, 1/2) with value 4/5; the separable structure makes the
    undamped parameter iteration oscillate from asymmetric starts.
    """

    def h_sep(i):
        def h(x):
            g = np.zeros(x.shape[0])
            g[i] = 2.0 * x[i]
            H = np.zeros((x.shape[0], x.shape[0]))
            H[i, i] = 2.0
            return float(x[i] ** 2 + 1.0), g, H

        return h

    terms = [
        CallbackTerm(_coordinate_numerator(0), h_sep(0), "concave",
                     f_batch=lambda X: X[:, 0],
                     h_batch=lambda X: X[:, 0] ** 2 + 1.0),
        CallbackTerm(_coordinate_numerator(1), h_sep(1), "concave",
                     f_batch=lambda X: X[:, 1],
                     h_batch=lambda X: X[:, 1] ** 2 + 1.0),
    ]
    return Problem(MAX, terms, _simplex_region(), 2)


#: CLI / loader ids for the builtins (canonical and undashed aliases).
BUILTINS = {
    "paper-1": problem_one,
    "paper-2": problem_two,
    "paper1": problem_one,
    "paper2": problem_two,
}
