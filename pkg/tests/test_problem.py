"""Model layer: terms, regions, parameter vectors, and evaluation helpers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from sumratios import (MAX, MIN, CallbackTerm, DenominatorNonpositive,
                       DimensionMismatch, FeasibleRegion, ParamVector, Problem,
                       QuadAffineTerm, eval_objective, eval_term,
                       feasibility_residuals, min_denominator, term_values,
                       validate)


def _quad_term():
    A0 = np.array([[2.0, 0.5], [0.5, 1.0]])
    return QuadAffineTerm(A0, [1.0, -2.0], 3.0, c=[1.0, 2.0], d=4.0)


def test_quad_affine_values_match_hand_expansion():
    t = _quad_term()
    x = np.array([1.0, 2.0])
    # 0.5*(2*1 + 2*0.5*1*2 + 1*4) + (1 - 4) + 3 = 4 - 3 + 3
    assert_allclose(t.f_value(x), 4.0)
    assert_allclose(t.h_value(x), 1.0 + 4.0 + 4.0)


def test_quad_affine_gradients_match_finite_differences(fd_gradient):
    t = _quad_term()
    rng = np.random.default_rng(3)
    for _ in range(10):
        x = rng.normal(size=2)
        _, gf = t.f_value_grad(x)
        _, gh = t.h_value_grad(x)
        assert_allclose(gf, fd_gradient(t.f_value, x), rtol=1e-6, atol=1e-8)
        assert_allclose(gh, fd_gradient(t.h_value, x), rtol=1e-6, atol=1e-8)
    assert_allclose(t.f_hessian(x), t.A0)
    assert_allclose(t.h_hessian(x), np.zeros((2, 2)))


def test_quad_affine_symmetrizes_hessian():
    t = QuadAffineTerm([[1.0, 4.0], [0.0, 2.0]], [0.0, 0.0], c=[1.0, 1.0], d=1.0)
    assert_allclose(t.A0, [[1.0, 2.0], [2.0, 2.0]])


def test_quad_affine_batch_matches_pointwise():
    t = _quad_term()
    pts = np.random.default_rng(5).normal(size=(7, 2))
    assert_allclose(t.f_values(pts), [t.f_value(p) for p in pts])
    assert_allclose(t.h_values(pts), [t.h_value(p) for p in pts])


def test_quad_affine_shape_errors():
    with pytest.raises(DimensionMismatch):
        QuadAffineTerm(np.eye(3), [1.0, 2.0], c=[1.0, 1.0])
    with pytest.raises(DimensionMismatch):
        QuadAffineTerm(None, [1.0, 2.0], c=[1.0, 2.0, 3.0])
    with pytest.raises(DimensionMismatch):
        QuadAffineTerm(None, [1.0, 2.0], c=None)


def test_callback_term_passthrough_and_batch_fallback():
    def f(x):
        return float(x[0] ** 2), np.array([2.0 * x[0], 0.0]), 2.0 * np.eye(2)

    def h(x):
        return float(x[0] + 2.0), np.array([1.0, 0.0])

    t = CallbackTerm(f, h, "convex")
    x = np.array([3.0, 1.0])
    assert_allclose(t.f_value(x), 9.0)
    assert_allclose(t.f_hessian(x), 2.0 * np.eye(2))
    assert t.h_hessian(x) is None  # two-tuple evaluator has no hessian
    pts = np.array([[1.0, 0.0], [2.0, 5.0]])
    assert_allclose(t.f_values(pts), [1.0, 4.0])
    assert_allclose(t.h_values(pts), [3.0, 4.0])
    with pytest.raises(ValueError):
        CallbackTerm(f, h, "wiggly")


def test_region_violation_order_and_contains():
    region = FeasibleRegion([[1.0, 1.0]], [1.0], [0.0, 0.0], [2.0, np.inf])
    x = np.array([1.5, 0.25])
    v = region.violations(x)
    # rows: linear, finite lows (both), finite highs (x1 only)
    assert v.shape == (4,)
    assert_allclose(v, [0.75, -1.5, -0.25, -0.5])
    assert not region.contains(x)
    assert region.contains([0.25, 0.25])
    assert region.constraint_count == 4


def test_region_dimension_inference_and_errors():
    region = FeasibleRegion(None, None, [0.0, 0.0, 0.0], None)
    assert region.n == 3
    assert region.lin_A.shape == (0, 3)
    with pytest.raises(DimensionMismatch):
        FeasibleRegion([[1.0, 0.0]], [1.0, 2.0])
    with pytest.raises(DimensionMismatch):
        FeasibleRegion(None, None, None, None)


def test_region_smooth_rows_enter_violations():
    disc = lambda x: (float(x @ x - 1.0), 2.0 * x)
    region = FeasibleRegion(None, None, [-2.0, -2.0], [2.0, 2.0], smooth_g=[disc])
    assert region.max_violation(np.array([1.0, 1.0])) == pytest.approx(1.0)
    assert region.contains(np.zeros(2))


def test_problem_validation_errors(p_one):
    with pytest.raises(ValueError):
        Problem("best", p_one.terms, p_one.region, 2)
    with pytest.raises(ValueError):
        Problem(MAX, [], p_one.region, 2)
    with pytest.raises(DimensionMismatch):
        Problem(MAX, p_one.terms, p_one.region, 3)
    bad_term = QuadAffineTerm(None, [1.0, 0.0, 0.0], c=[1.0, 1.0, 1.0])
    with pytest.raises(DimensionMismatch):
        Problem(MIN, [bad_term], p_one.region, 2)


def test_quad_stacks_requires_quad_terms(p_one, small_instance):
    A0, q0, r0, c, d = small_instance.quad_stacks()
    assert A0.shape == (2, 3, 3) and q0.shape == (2, 3)
    assert c.shape == (2, 3) and r0.shape == (2,) and d.shape == (2,)
    assert not p_one.all_quad_affine
    with pytest.raises(TypeError):
        p_one.quad_stacks()


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2 ** 31))
def test_param_vector_stacking_round_trips(n, seed):
    rng = np.random.default_rng(seed)
    alpha = ParamVector(rng.random(n), 0.1 + rng.random(n))
    back = ParamVector.from_stacked(alpha.stacked())
    assert_allclose(back.beta, alpha.beta, rtol=0, atol=0)
    assert_allclose(back.u, alpha.u, rtol=0, atol=0)


def test_param_vector_validation_and_clamping():
    with pytest.raises(DimensionMismatch):
        ParamVector([1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        ParamVector([1.0], [1.0], l=0.0)
    with pytest.raises(DimensionMismatch):
        ParamVector.from_stacked([1.0, 2.0, 3.0])
    alpha = ParamVector([-0.5, 2.0], [1e-12, 3.0], l=1e-8)
    assert not alpha.in_omega()
    clamped = alpha.clamped()
    assert clamped.in_omega()
    assert_allclose(clamped.beta, [0.0, 2.0])
    assert_allclose(clamped.u, [1e-8, 3.0])
    copy = alpha.copy()
    copy.beta[0] = 7.0
    assert alpha.beta[0] == -0.5


def test_objective_and_denominator_helpers(p_two):
    # two symmetric terms, each 0.5 / 1.25, at the known optimum
    x = np.array([0.5, 0.5])
    assert_allclose(eval_objective(p_two, x), 0.8)
    assert_allclose(min_denominator(p_two, x), 1.25)
    f, h = term_values(p_two, x)
    assert_allclose(f, [0.5, 0.5])
    assert_allclose(h, [1.25, 1.25])
    mx, per = feasibility_residuals(p_two, x)
    assert mx == pytest.approx(0.0)
    assert per.shape == (3,)


def test_nonpositive_denominator_raises():
    t = QuadAffineTerm(None, [1.0], c=[1.0], d=0.0)
    region = FeasibleRegion(None, None, [-1.0], [1.0])
    prob = Problem(MIN, [t], region, 1)
    with pytest.raises(DenominatorNonpositive):
        term_values(prob, np.array([-0.5]))
    with pytest.raises(DenominatorNonpositive):
        eval_term(t, np.array([0.0]))


def test_validate_reports_clean_instance(p_one):
    report = validate(p_one, [np.array([0.2, 0.3]), np.array([0.4, 0.1])])
    assert report.ok, [c.name for c in report.failures()]
    names = {c.name for c in report.checks}
    assert "region.interior_point" in names


def test_validate_flags_wrong_curvature():
    # concave numerator on a min-sense problem
    t = QuadAffineTerm(-np.eye(2), [5.0, 5.0], c=[1.0, 1.0], d=1.0)
    prob = Problem(MIN, [t], FeasibleRegion(None, None, [0.0, 0.0], [1.0, 1.0]), 2)
    report = validate(prob, [np.zeros(2), np.ones(2)])
    assert not report.ok
    assert any("curvature" in c.name for c in report.failures())
