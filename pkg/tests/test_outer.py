"""Outer iteration: the parameter map, damped updates, and full solves."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sumratios import (CONVERGED, LINE_SEARCH_FAILED, MAX_OUTER, MIN,
                       FeasibleRegion, ParamVector, Problem, QuadAffineTerm,
                       SolverConfig, eval_objective, init_alpha, jacobian_diag,
                       min_denominator, mn_update, newton_map, projection_step,
                       psi, solve, term_values)

# Fixed point of the outer map on the first builtin, confirmed independently
# by exhaustive grid search at resolution 2e-4.
_F1 = 0.5958012927
_X1 = np.array([0.638897, 0.361103])


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(algorithm="simplex")
    with pytest.raises(ValueError):
        SolverConfig(xi=1.0)
    with pytest.raises(ValueError):
        SolverConfig(eps=0.0)
    with pytest.raises(ValueError):
        SolverConfig(lambda_proj=1.5)
    with pytest.raises(ValueError):
        SolverConfig(max_outer=0)
    with pytest.raises(ValueError):
        SolverConfig(psi_tol=1e-10)  # must exceed the inner kkt tolerance


def test_init_alpha_takes_ratio_values(p_two):
    alpha = init_alpha(p_two, np.array([0.25, 0.5]))
    f, h = term_values(p_two, np.array([0.25, 0.5]))
    assert_allclose(alpha.beta, f / h)
    assert_allclose(alpha.u, 1.0 / h)


def test_init_alpha_clamps_negative_ratios():
    term = QuadAffineTerm(None, [-1.0], 0.0, c=[1.0], d=2.0)
    prob = Problem(MIN, [term], FeasibleRegion(None, None, [0.0], [1.0]), 1)
    alpha = init_alpha(prob, np.array([0.5]))  # f = -0.5 < 0
    assert alpha.beta[0] == 0.0
    assert alpha.in_omega()


def test_psi_and_jacobian_shapes(p_two):
    x = np.array([0.3, 0.4])
    alpha = init_alpha(p_two, x)
    r = psi(p_two, alpha, x)
    assert r.shape == (4,)
    assert_allclose(r, 0.0, atol=1e-15)  # alpha built from x is the map's target
    J = jacobian_diag(p_two, x)
    _, h = term_values(p_two, x)
    assert_allclose(J, np.concatenate([h, h]))
    assert (J > 0).all()


def test_newton_step_equals_parameter_map(p_one, p_two):
    """One Newton step on psi (diagonal Jacobian) lands exactly on the map."""
    for prob, y0 in ((p_one, np.zeros(2)), (p_two, np.array([0.7, 0.3]))):
        sol = solve(prob, y0, SolverConfig(algorithm="n", max_outer=8))
        for rec in sol.trace:
            residual = psi(prob, rec.alpha, rec.x)
            step = rec.alpha.stacked() - residual / jacobian_diag(prob, rec.x)
            target = newton_map(prob, rec.x).stacked()
            assert_allclose(step, target, rtol=1e-12, atol=1e-12)


def test_mn_update_interpolates_toward_map(p_two):
    x = np.array([0.2, 0.6])
    alpha = init_alpha(p_two, np.array([0.5, 0.1]))
    target = newton_map(p_two, x)
    half = mn_update(alpha, x, 0.5, p_two)
    assert_allclose(half.beta, 0.5 * (alpha.beta + target.beta))
    assert_allclose(half.u, 0.5 * (alpha.u + target.u))
    full = mn_update(alpha, x, 1.0, p_two)
    assert_allclose(full.stacked(), target.stacked())


def test_projection_step_clips_into_omega():
    alpha = ParamVector([0.2, 0.0], [0.5, 1e-8])
    stepped = projection_step(alpha, np.array([5.0, -1.0, 5.0, -1.0]), 0.1)
    assert stepped.in_omega()
    assert_allclose(stepped.beta, [0.0, 0.1])
    assert_allclose(stepped.u, [1e-8, 0.1 + 1e-8], atol=1e-12)


def test_first_builtin_converges_to_known_optimum(p_one):
    for algorithm in ("n", "mn"):
        sol = solve(p_one, np.zeros(2), SolverConfig(algorithm=algorithm))
        assert sol.status == CONVERGED
        assert sol.psi_norm <= 1e-6
        assert sol.f_star == pytest.approx(_F1, abs=1e-6)
        assert_allclose(sol.x_star, _X1, atol=1e-4)
        assert sol.outer_iters == len(sol.trace)
        assert sol.total_subproblem_solves >= sol.outer_iters


def test_second_builtin_origin_run_follows_hand_iteration(p_two):
    """From the origin the whole trajectory is computable by hand.

    The first subproblem maximizes x1 + x2 on the simplex (a flat face); the
    deterministic barrier path selects the face midpoint (0.5, 0.5), giving
    residual (-0.5, -0.5, 0.25, 0.25) with norm sqrt(0.625).  The updated
    parameters (0.4, 0.4, 0.8, 0.8) already solve the fixed-point equation.
    """
    sol = solve(p_two, np.zeros(2), SolverConfig(algorithm="n"))
    assert sol.status == CONVERGED
    assert sol.outer_iters == 2
    assert sol.trace[0].psi_norm == pytest.approx(np.sqrt(0.625), abs=1e-7)
    assert_allclose(sol.alpha_star.beta, [0.4, 0.4], atol=1e-7)
    assert_allclose(sol.alpha_star.u, [0.8, 0.8], atol=1e-7)
    assert_allclose(sol.x_star, [0.5, 0.5], atol=1e-7)
    assert sol.f_star == pytest.approx(0.8, abs=1e-9)


def test_damped_iterates_satisfy_sufficient_decrease(p_one, p_two):
    cfg = SolverConfig(algorithm="mn")
    for prob, y0 in ((p_one, np.zeros(2)), (p_two, np.array([0.9, 0.1]))):
        sol = solve(prob, y0, cfg)
        assert sol.status == CONVERGED
        for prev, cur in zip(sol.trace, sol.trace[1:]):
            bound = (1.0 - cfg.eps * cur.lambda_k) * prev.psi_norm
            assert cur.psi_norm <= bound + 10.0 * cfg.inner.kkt_tol


def test_projection_algorithm_converges_slowly(p_one):
    sol = solve(p_one, np.zeros(2), SolverConfig(algorithm="proj", max_outer=200))
    assert sol.status == CONVERGED
    assert sol.f_star == pytest.approx(_F1, abs=1e-6)
    newton_rows = solve(p_one, np.zeros(2), SolverConfig(algorithm="n")).outer_iters
    assert sol.outer_iters > 2 * newton_rows  # first-order outer map


def test_outer_cap_reports_max_outer(p_one):
    sol = solve(p_one, np.zeros(2), SolverConfig(algorithm="n", max_outer=3))
    assert sol.status == MAX_OUTER
    assert not sol.converged
    assert sol.outer_iters == 3


def test_single_backtrack_budget_fails_on_oscillating_start(p_two):
    sol = solve(p_two, np.array([0.9, 0.1]),
                SolverConfig(algorithm="mn", max_backtracks=1, max_outer=30))
    assert sol.status == LINE_SEARCH_FAILED
    assert sol.outer_iters == 1  # undamped target rejected at the first update


def test_start_outside_region_only_seeds_parameters(p_two):
    sol = solve(p_two, np.array([0.9, 0.3]), SolverConfig(algorithm="mn"))
    assert sol.status == CONVERGED
    assert sol.f_star == pytest.approx(0.8, abs=1e-4)


def test_start_with_nonpositive_denominator_rejected(small_instance):
    with pytest.raises(ValueError, match="denominator"):
        solve(small_instance, np.zeros(3))


def test_trace_records_are_consistent(p_one):
    sol = solve(p_one, np.zeros(2), SolverConfig(algorithm="mn"))
    ks = [rec.k for rec in sol.trace]
    assert ks == list(range(len(sol.trace)))
    elapsed = [rec.elapsed for rec in sol.trace]
    assert all(b >= a for a, b in zip(elapsed, elapsed[1:]))
    assert sol.trace[-1].psi_norm <= 1e-6
    solves = sum(rec.subproblem_solves_this_iter for rec in sol.trace)
    assert solves == sol.total_subproblem_solves


def test_converged_runs_carry_value_certificate(p_one, p_two, small_instance):
    """|objective - sum of ratio levels| <= terms * tol / min denominator."""
    for prob in (p_one, p_two, small_instance):
        sol = solve(prob, cfg=SolverConfig(algorithm="mn"))
        assert sol.status == CONVERGED
        delta = min_denominator(prob, sol.x_star)
        gap = abs(eval_objective(prob, sol.x_star) - float(sol.alpha_star.beta.sum()))
        assert gap <= prob.n_terms * 1e-6 / delta
