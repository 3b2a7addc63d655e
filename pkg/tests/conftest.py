"""Shared fixtures and the acceptance-line reporter.

Acceptance tests record one human-readable result line each; the lines are
echoed in the pytest terminal summary so they remain visible even though
pytest captures per-test stdout.
"""

import numpy as np
import pytest

from sumratios import GenSpec, generate, problem_one, problem_two

_ACCEPTANCE_LINES = []


def record_acceptance(line):
    """Register one acceptance-criterion result line for the final summary."""
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def p_one():
    return problem_one()


@pytest.fixture
def p_two():
    return problem_two()


@pytest.fixture
def small_instance():
    """A 3-variable, 2-term random instance used by oracle cross-checks."""
    return generate(GenSpec(n=3, n_terms=2, seed=11))


@pytest.fixture
def fd_gradient():
    """Central-difference gradient of a scalar function."""

    def fd(fn, x, h=1e-6):
        x = np.asarray(x, float)
        g = np.zeros(x.size)
        for j in range(x.size):
            e = np.zeros(x.size)
            e[j] = h
            g[j] = (fn(x + e) - fn(x - e)) / (2.0 * h)
        return g

    return fd
