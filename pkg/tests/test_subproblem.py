"""Tests for the ball-constrained solver, Cauchy search, and decrease checks."""

import numpy as np
import pytest

from rtopt import (
    CorrectedModel,
    ScalarOracle,
    SufficientDecreaseParams,
    cauchy_point,
    check_sufficient_decrease,
    estimate_beta,
    get_problem,
    solve_subproblem,
)


def sphere_model(dim=2):
    return ScalarOracle(lambda u: float(np.dot(u, u)), lambda u: 2.0 * u, dim)


def linear_model(c):
    c = np.asarray(c, dtype=float)
    return ScalarOracle(lambda u: float(c @ u), lambda u: c.copy(), c.size)


class TestCauchyPoint:
    def test_sphere_boundary_minimum(self):
        cm = CorrectedModel(sphere_model(), [0.0, 0.0], anchor=[1.0, 0.0])
        point, t = cauchy_point(cm, [1.0, 0.0], 0.5)
        assert point == pytest.approx([0.5, 0.0], abs=1e-7)
        assert t == pytest.approx(0.25, abs=1e-8)

    def test_zero_gradient_stays_at_anchor(self):
        cm = CorrectedModel(sphere_model(), [0.0, 0.0], anchor=[0.0, 0.0])
        point, t = cauchy_point(cm, [0.0, 0.0], 1.0)
        assert np.array_equal(point, [0.0, 0.0])
        assert t == 0.0

    def test_linear_model_reaches_boundary(self):
        cm = CorrectedModel(linear_model([3.0, 4.0]), [0.0, 0.0], anchor=[0.0, 0.0])
        point, t = cauchy_point(cm, [0.0, 0.0], 1.0)
        assert point == pytest.approx([-0.6, -0.8], abs=1e-9)
        assert t == pytest.approx(0.2, abs=1e-9)

    def test_wide_radius_finds_exact_ray_minimizer(self):
        # 1-d strictly convex quadratic: ray from anchor 1 passes through 0
        cm = CorrectedModel(sphere_model(1), [0.0], anchor=[1.0])
        point, t = cauchy_point(cm, [1.0], 100.0)
        assert abs(point[0]) <= 1e-8
        assert t == pytest.approx(0.5, abs=1e-8)

    def test_improves_on_anchor_when_gradient_nonzero(self):
        rng = np.random.default_rng(11)
        for pid in ("P1", "P2", "P3", "P4"):
            p = get_problem(pid)
            for _ in range(10):
                anchor = rng.uniform(-3, 3, size=p.dimension)
                lam = p.plant_gradient(anchor) - p.model_gradient(anchor)
                cm = CorrectedModel(p.model, lam, anchor=anchor)
                if np.linalg.norm(cm.gradient(anchor)) == 0.0:
                    continue
                point, t = cauchy_point(cm, anchor, rng.uniform(0.1, 3.0))
                assert cm.value_change(point) < 0.0

    def test_scan_catches_far_dip_on_nonconvex_ray(self):
        # two dips along the descent ray; the nearer one is shallower
        def poly(u):
            x = u[0]
            return float((x * (x + 1.0) * (x + 2.2)) ** 2 + 0.05 * x)

        def poly_grad(u):
            x = u[0]
            p = x * (x + 1.0) * (x + 2.2)
            dp = 3.0 * x**2 + 6.4 * x + 2.2
            return np.array([2.0 * p * dp + 0.05])

        oracle = ScalarOracle(poly, poly_grad, 1)
        cm = CorrectedModel(oracle, [0.0], anchor=[0.0])
        radius = 3.0
        point, _ = cauchy_point(cm, [0.0], radius)
        # independent oracle: dense scan of the ray segment
        ts = np.linspace(0.0, radius / abs(cm.gradient([0.0])[0]), 20001)
        ray_values = [cm.value_change([-t * cm.gradient([0.0])[0]]) for t in ts]
        assert cm.value_change(point) <= min(ray_values) + 1e-6
        assert point[0] == pytest.approx(-2.2, abs=0.1)

    def test_nonpositive_radius_rejected(self):
        cm = CorrectedModel(sphere_model(), [0.0, 0.0], anchor=[0.0, 0.0])
        with pytest.raises(ValueError, match="radius"):
            cauchy_point(cm, [0.0, 0.0], 0.0)


class TestSolveSubproblem:
    def test_interior_minimizer_found(self):
        # corrected sphere with unconstrained minimizer (1, 1) inside the ball
        cm = CorrectedModel(sphere_model(), [-2.0, -2.0], anchor=[0.0, 0.0])
        result = solve_subproblem(cm, [0.0, 0.0], 10.0)
        assert result.candidate == pytest.approx([1.0, 1.0], abs=1e-6)
        assert not result.cauchy_override_applied

    def test_boundary_minimizer_found(self):
        cm = CorrectedModel(sphere_model(), [-2.0, -2.0], anchor=[0.0, 0.0])
        result = solve_subproblem(cm, [0.0, 0.0], 0.5)
        expected = 0.5 / np.sqrt(2.0)
        assert result.candidate == pytest.approx([expected, expected], abs=1e-6)

    def test_anisotropic_interior_minimizer(self):
        oracle = ScalarOracle(
            lambda u: float(u[0] ** 2 + 10.0 * u[1] ** 2),
            lambda u: np.array([2.0 * u[0], 20.0 * u[1]]),
            2,
        )
        cm = CorrectedModel(oracle, [-1.0, -5.0], anchor=[0.0, 0.0])
        result = solve_subproblem(cm, [0.0, 0.0], 5.0)
        assert result.candidate == pytest.approx([0.5, 0.25], abs=1e-6)

    def test_override_fires_on_stuck_descent(self):
        # descent pinned to the anchor cannot beat the cauchy point
        cm = CorrectedModel(sphere_model(), [-2.0, -2.0], anchor=[0.0, 0.0])
        result = solve_subproblem(cm, [0.0, 0.0], 1.0, budget=1, start=[0.0, 0.0])
        assert result.cauchy_override_applied
        assert np.array_equal(result.candidate, result.cauchy_point)

    def test_candidate_never_worse_than_cauchy_point(self):
        rng = np.random.default_rng(23)
        for pid in ("P1", "P2", "P3", "P4"):
            p = get_problem(pid)
            for _ in range(10):
                anchor = rng.uniform(-3, 3, size=p.dimension)
                lam = p.plant_gradient(anchor) - p.model_gradient(anchor)
                cm = CorrectedModel(p.model, lam, anchor=anchor)
                radius = rng.uniform(0.05, 4.0)
                result = solve_subproblem(cm, anchor, radius)
                dist = np.linalg.norm(result.candidate - anchor)
                assert dist <= radius * (1.0 + 1e-12) + 1e-12
                assert (
                    cm.value_change(result.candidate)
                    <= cm.value_change(result.cauchy_point) + 1e-12
                )

    def test_concave_model_runs_to_boundary(self):
        p = get_problem("P2")
        anchor = [1.0]
        lam = p.plant_gradient(anchor) - p.model_gradient(anchor)
        cm = CorrectedModel(p.model, lam, anchor=anchor)
        result = solve_subproblem(cm, anchor, 1.0)
        assert result.candidate == pytest.approx([0.0], abs=1e-9)

    def test_invalid_budget_rejected(self):
        cm = CorrectedModel(sphere_model(), [0.0, 0.0], anchor=[0.0, 0.0])
        with pytest.raises(ValueError, match="budget"):
            solve_subproblem(cm, [0.0, 0.0], 1.0, budget=0)


class TestSufficientDecrease:
    def test_hand_computed_quadratic_case(self):
        # 1-d quadratic from anchor 1 with radius 0.5: decrease 0.75
        params = SufficientDecreaseParams(kappa=0.5, beta=2.0)
        assert check_sufficient_decrease(1.0, 0.25, 2.0, 0.5, params)

    def test_zero_gradient_is_vacuous(self):
        params = SufficientDecreaseParams(kappa=0.5, beta=2.0)
        assert check_sufficient_decrease(1.0, 1.0, 0.0, 0.5, params)

    def test_insufficient_decrease_fails(self):
        params = SufficientDecreaseParams(kappa=0.5, beta=2.0)
        assert not check_sufficient_decrease(1.0, 0.9, 2.0, 0.5, params)

    def test_invalid_params_rejected(self):
        with pytest.raises(ValueError, match="kappa"):
            SufficientDecreaseParams(kappa=1.0, beta=2.0)
        with pytest.raises(ValueError, match="beta"):
            SufficientDecreaseParams(kappa=0.5, beta=1.0)


class TestEstimateBeta:
    def test_quadratic_curvature(self):
        cm = CorrectedModel(sphere_model(1), [1.0], anchor=[1.0])
        assert estimate_beta(cm, [1.0], 1.0) == pytest.approx(2.0, abs=1e-3)

    def test_linear_model_floors_just_above_one(self):
        cm = CorrectedModel(linear_model([3.0]), [0.0], anchor=[0.0])
        assert estimate_beta(cm, [0.0], 1.0) == pytest.approx(1.0 + 1e-6, abs=1e-9)

    def test_concave_curvature_magnitude(self):
        p = get_problem("P2")
        anchor = [1.0]
        lam = p.plant_gradient(anchor) - p.model_gradient(anchor)
        cm = CorrectedModel(p.model, lam, anchor=anchor)
        assert estimate_beta(cm, anchor, 1.0) == pytest.approx(2.0, abs=1e-3)

    def test_always_strictly_above_one(self):
        cm = CorrectedModel(sphere_model(), [0.0, 0.0], anchor=[0.0, 0.0])
        assert estimate_beta(cm, [0.0, 0.0], 1.0) > 1.0
