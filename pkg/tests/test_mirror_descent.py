import numpy as np
import pytest

from femin import (
    ComplexityPenalty,
    FiniteDistribution,
    FlooringWarning,
    FreeEnergyProblem,
    LossVector,
    ObjectiveOracle,
    ZeroCoordinate,
    euclidean_gd_step,
    make_oracle,
    minimize_closed_form,
    neg_step,
    project_to_simplex,
    run_descent,
    total_variation,
    validate_gradient,
)


class TestEuclideanStep:
    def test_zero_gradient_is_stationary(self):
        x = np.array([0.4, 0.6])
        assert np.array_equal(euclidean_gd_step(x, np.zeros(2), 0.5), x)

    def test_direct_arithmetic(self):
        out = euclidean_gd_step(np.array([1.0, 0.0]), np.array([1.0, -1.0]), 0.5)
        assert np.allclose(out, [0.5, 0.5], atol=1e-15)

    def test_zero_step_size(self):
        x = np.array([0.3, 0.7])
        assert np.array_equal(euclidean_gd_step(x, np.array([2.0, -1.0]), 0.0), x)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            euclidean_gd_step(np.zeros(2), np.zeros(3), 0.1)


class TestNegStep:
    def test_constant_gradient_leaves_q_unchanged(self):
        q = FiniteDistribution([0.3, 0.7])
        out = neg_step(q, np.array([2.0, 2.0]), 0.7)
        assert total_variation(out, q) <= 1e-15

    def test_direct_arithmetic(self):
        out = neg_step(FiniteDistribution.uniform(2), np.array([0.0, 1.0]), np.log(3.0))
        assert np.allclose(out.probs, [0.75, 0.25], atol=1e-14)

    def test_matches_kl_penalized_closed_form(self):
        rng = np.random.default_rng(41)
        for _ in range(25):
            n = int(rng.integers(2, 6))
            q = FiniteDistribution(rng.dirichlet(np.ones(n)) * 0.9 + 0.1 / n)
            grad = rng.normal(scale=2.0, size=n)
            alpha = float(rng.uniform(0.1, 3.0))
            stepped = neg_step(q, grad, alpha)
            fe = FreeEnergyProblem(
                LossVector(grad), 1.0 / alpha, ComplexityPenalty.kl_to_prior(q)
            )
            assert total_variation(stepped, minimize_closed_form(fe).q_opt) <= 1e-12

    def test_zero_coordinate_rejected(self):
        with pytest.raises(ZeroCoordinate):
            neg_step(FiniteDistribution([1.0, 0.0]), np.zeros(2), 0.1)


class TestProjection:
    def test_already_on_simplex(self):
        q = project_to_simplex(np.array([0.2, 0.3, 0.5]))
        assert np.allclose(q.probs, [0.2, 0.3, 0.5], atol=1e-12)

    def test_projects_outside_points(self):
        q = project_to_simplex(np.array([1.5, -0.5]))
        assert np.allclose(q.probs, [1.0, 0.0], atol=1e-12)


class TestOracles:
    def test_builtin_oracles_pass_gradient_validation(self):
        make_oracle("linear", [0.0, 1.0, -0.5])
        make_oracle("quadratic-to-target", [0.2, 0.3, 0.5])
        make_oracle("entropy-regularized-linear", [0.0, 1.0], 0.2)

    def test_wrong_gradient_is_caught(self):
        def evaluate(x):
            return float(x @ x), 3.0 * x  # gradient should be 2x

        with pytest.raises(ValueError):
            validate_gradient(ObjectiveOracle(3, evaluate, "broken"))

    def test_unknown_descriptor(self):
        with pytest.raises(ValueError):
            make_oracle("no-such-oracle")


class TestRunDescent:
    def test_linear_neg_closed_recursion(self):
        # multiplicative updates on g(q) = q(2) from uniform with alpha=1:
        # q_i(1) = 1 / (1 + exp(-i))
        oracle = make_oracle("linear", [0.0, 1.0])
        trace = run_descent(
            oracle, FiniteDistribution.uniform(2), method="neg", step_size=1.0, max_iter=30, tol=0.0
        )
        assert len(trace.iterates) == 31
        for i, point in enumerate(trace.iterates):
            assert point.probs[0] == pytest.approx(1.0 / (1.0 + np.exp(-i)), abs=1e-9)
        assert np.all(np.diff(trace.values) < 0)

    def test_both_methods_reach_interior_quadratic_optimum(self):
        target = np.array([0.5, 0.3, 0.2])
        oracle = make_oracle("quadratic-to-target", target)
        for method in ("neg", "euclidean"):
            trace = run_descent(
                oracle,
                FiniteDistribution.uniform(3),
                method=method,
                step_size=0.5,
                max_iter=10_000,
                tol=1e-16,
            )
            assert np.abs(trace.iterates[-1].probs - target).max() <= 1e-6

    def test_stationary_start_gives_unit_trace(self):
        target = np.array([0.25, 0.25, 0.5])
        oracle = make_oracle("quadratic-to-target", target)
        for method in ("neg", "euclidean"):
            trace = run_descent(oracle, FiniteDistribution(target), method=method, step_size=0.5)
            assert len(trace.iterates) == 1
            assert trace.step_sizes.size == 0

    def test_neg_iterates_stay_on_simplex_and_positive(self):
        oracle = make_oracle("linear", [0.3, -0.2, 0.8])
        trace = run_descent(
            oracle, FiniteDistribution.uniform(3), method="neg", step_size=0.5, max_iter=200, tol=0.0
        )
        for point in trace.iterates:
            assert abs(point.probs.sum() - 1.0) <= 1e-9
            assert np.all(point.probs > 0)

    def test_descent_property_at_safe_step(self):
        # quadratic has gradient Lipschitz constant 1; alpha = 1 is safe
        oracle = make_oracle("quadratic-to-target", [0.6, 0.3, 0.1])
        for method in ("neg", "euclidean"):
            trace = run_descent(
                oracle, FiniteDistribution.uniform(3), method=method, step_size=1.0, max_iter=500, tol=0.0
            )
            assert np.all(np.diff(trace.values) <= 1e-10)

    def test_schedules(self):
        oracle = make_oracle("quadratic-to-target", [0.5, 0.5])
        for schedule in ("constant", "inv_sqrt", "backtracking"):
            trace = run_descent(
                oracle,
                FiniteDistribution([0.9, 0.1]),
                method="euclidean",
                step_size=1.0,
                schedule=schedule,
                max_iter=300,
                tol=1e-14,
            )
            assert trace.values[-1] <= trace.values[0]
            assert np.abs(trace.iterates[-1].probs - 0.5).max() <= 1e-4

    def test_inv_sqrt_steps_recorded(self):
        oracle = make_oracle("linear", [0.0, 1.0])
        trace = run_descent(
            oracle,
            FiniteDistribution.uniform(2),
            method="neg",
            step_size=1.0,
            schedule="inv_sqrt",
            max_iter=4,
            tol=0.0,
        )
        assert np.allclose(trace.step_sizes, 1.0 / np.sqrt([1, 2, 3, 4]), atol=1e-15)

    def test_long_multiplicative_run_floors_coordinates(self):
        oracle = make_oracle("linear", [0.0, 1.0])
        with pytest.warns(FlooringWarning):
            trace = run_descent(
                oracle,
                FiniteDistribution.uniform(2),
                method="neg",
                step_size=1.0,
                max_iter=800,
                tol=0.0,
            )
        assert np.all(trace.iterates[-1].probs > 0)

    def test_zero_start_rejected_for_neg(self):
        oracle = make_oracle("linear", [0.0, 1.0])
        with pytest.raises(ZeroCoordinate):
            run_descent(oracle, FiniteDistribution([1.0, 0.0]), method="neg")

    def test_argument_validation(self):
        oracle = make_oracle("linear", [0.0, 1.0])
        with pytest.raises(ValueError):
            run_descent(oracle, FiniteDistribution.uniform(2), method="newton")
        with pytest.raises(ValueError):
            run_descent(oracle, FiniteDistribution.uniform(2), schedule="warmup")
