"""Local optimization over the probability simplex.

Two geometries: plain Euclidean gradient steps (followed by Euclidean
projection back onto the simplex, so the comparison with the multiplicative
method is fair), and the normalized exponentiated gradient update

    q'(x) proportional to q(x) * exp(-alpha * grad_x),

which is the KL-penalized free-energy minimizer with loss = grad and
T = 1/alpha, i.e. mirror descent in the KL geometry.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import FlooringWarning, NonFinite, ZeroCoordinate
from .free_energy import _projection_pivot
from .simplex import FiniteDistribution, log_sum_exp

# Smallest representable iterate coordinate for the multiplicative method.
LOG_FLOOR = np.log(1e-300)


@dataclass(frozen=True)
class ObjectiveOracle:
    """Differentiable objective on (a neighborhood of) the simplex.

    evaluate(x) returns (value, gradient). Build through make_oracle or
    validate with validate_gradient so the gradient is checked against
    central finite differences before use.
    """

    dimension: int
    evaluate: Callable
    descriptor: str


def validate_gradient(oracle: ObjectiveOracle, n_points: int = 20, h: float = 1e-6, rel_tol: float = 1e-4, seed: int = 0) -> None:
    """Check the oracle's gradient against central finite differences at
    random interior simplex points; raises ValueError on mismatch."""
    rng = np.random.default_rng(seed)
    for _ in range(int(n_points)):
        x = rng.dirichlet(np.full(oracle.dimension, 5.0))
        x = 0.9 * x + 0.1 / oracle.dimension  # keep safely interior
        _, grad = oracle.evaluate(x)
        fd = np.empty(oracle.dimension)
        for i in range(oracle.dimension):
            bump = np.zeros(oracle.dimension)
            bump[i] = h
            fd[i] = (oracle.evaluate(x + bump)[0] - oracle.evaluate(x - bump)[0]) / (2.0 * h)
        scale = max(np.abs(grad).max(), np.abs(fd).max(), 1.0)
        err = np.abs(np.asarray(grad) - fd).max() / scale
        if err > rel_tol:
            raise ValueError(
                f"oracle {oracle.descriptor!r}: gradient disagrees with finite differences "
                f"(relative error {err:.2e} > {rel_tol:.0e})"
            )


def _linear_oracle(l) -> ObjectiveOracle:
    l = np.asarray(l, dtype=float)

    def evaluate(x):
        return float(l @ x), l.copy()

    return ObjectiveOracle(l.size, evaluate, "linear")


def _quadratic_to_target_oracle(target) -> ObjectiveOracle:
    target = np.asarray(target, dtype=float)

    def evaluate(x):
        diff = np.asarray(x, dtype=float) - target
        return float(0.5 * (diff @ diff)), diff

    return ObjectiveOracle(target.size, evaluate, "quadratic-to-target")


def _entropy_regularized_linear_oracle(l, reg=0.1) -> ObjectiveOracle:
    # Needs strictly positive points; intended for the multiplicative method.
    l = np.asarray(l, dtype=float)
    reg = float(reg)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        value = float(l @ x + reg * (x * np.log(x)).sum())
        return value, l + reg * (1.0 + np.log(x))

    return ObjectiveOracle(l.size, evaluate, "entropy-regularized-linear")


_ORACLE_BUILDERS = {
    "linear": _linear_oracle,
    "quadratic-to-target": _quadratic_to_target_oracle,
    "entropy-regularized-linear": _entropy_regularized_linear_oracle,
}


def register_oracle(name: str, builder: Callable) -> None:
    _ORACLE_BUILDERS[name] = builder


def make_oracle(descriptor: str, *args, **kwargs) -> ObjectiveOracle:
    """Build a registry oracle by name and validate its gradient."""
    if descriptor not in _ORACLE_BUILDERS:
        raise ValueError(f"unknown oracle {descriptor!r}; known: {sorted(_ORACLE_BUILDERS)}")
    oracle = _ORACLE_BUILDERS[descriptor](*args, **kwargs)
    validate_gradient(oracle)
    return oracle


def euclidean_gd_step(x, grad, alpha: float):
    """x - alpha * grad, the unconstrained gradient update."""
    x = np.asarray(x, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if x.shape != grad.shape:
        raise ValueError(f"x has shape {x.shape}, grad has shape {grad.shape}")
    return x - float(alpha) * grad


def project_to_simplex(v) -> FiniteDistribution:
    """Euclidean projection: clip at the pivot threshold and renormalize."""
    v = np.asarray(v, dtype=float)
    tau = _projection_pivot(v)
    return FiniteDistribution.normalized(np.clip(v - tau, 0.0, None))


def neg_step(q: FiniteDistribution, grad, alpha: float) -> FiniteDistribution:
    """Normalized exponentiated gradient update, computed in log space.

    Coincides with the KL-penalized closed-form minimizer at prior q,
    loss grad, and temperature 1/alpha.
    """
    if np.any(q.probs <= 0):
        raise ZeroCoordinate("multiplicative updates need a strictly positive iterate")
    grad = np.asarray(grad, dtype=float)
    if grad.shape != q.probs.shape:
        raise ValueError(f"grad has shape {grad.shape}, expected {q.probs.shape}")
    log_w = np.log(q.probs) - float(alpha) * grad
    log_w -= log_sum_exp(log_w)
    return FiniteDistribution.normalized(np.exp(log_w))


@dataclass(frozen=True)
class DescentTrace:
    iterates: tuple  # FiniteDistribution per accepted iterate, x0 first
    values: np.ndarray
    step_sizes: np.ndarray  # one per accepted step


def _step_size(schedule: str, base: float, iteration: int) -> float:
    if schedule == "constant":
        return base
    if schedule == "inv_sqrt":
        return base / np.sqrt(iteration)
    raise ValueError(f"unknown schedule {schedule!r}")


def run_descent(
    oracle: ObjectiveOracle,
    x0: FiniteDistribution,
    method: str = "neg",
    step_size: float = 0.1,
    schedule: str = "constant",
    max_iter: int = 1000,
    tol: float = 1e-10,
) -> DescentTrace:
    """Iterate the chosen update until the objective moves by less than tol.

    Both methods stay on the simplex: the multiplicative method by
    construction (log-weights, renormalized and floored at 1e-300 each
    step), the Euclidean method via projection after each step. The
    backtracking schedule halves the step until it achieves sufficient
    decrease. A candidate that fails to move the value by tol is discarded,
    so a start at a stationary point leaves a trace of length 1.
    """
    if method not in ("neg", "euclidean"):
        raise ValueError(f"method must be 'neg' or 'euclidean', got {method!r}")
    if schedule not in ("constant", "inv_sqrt", "backtracking"):
        raise ValueError(f"unknown schedule {schedule!r}")
    if method == "neg" and np.any(x0.probs <= 0):
        raise ZeroCoordinate("the multiplicative method needs a strictly positive start")

    current = x0
    value, grad = oracle.evaluate(current.probs)
    if not (np.isfinite(value) and np.all(np.isfinite(grad))):
        raise NonFinite("objective is non-finite at the starting point")
    iterates = [current]
    values = [float(value)]
    step_sizes = []
    floored = False

    def advance(point: FiniteDistribution, g, alpha: float) -> FiniteDistribution:
        nonlocal floored
        if method == "euclidean":
            return project_to_simplex(point.probs - alpha * g)
        log_w = np.log(point.probs) - alpha * g
        log_w -= log_sum_exp(log_w)
        if np.any(log_w < LOG_FLOOR):
            floored = True
            log_w = np.maximum(log_w, LOG_FLOOR)
        return FiniteDistribution.normalized(np.exp(log_w))

    for iteration in range(1, int(max_iter) + 1):
        if schedule == "backtracking":
            alpha = step_size
            grad_sq = float(np.asarray(grad) @ np.asarray(grad))
            candidate = advance(current, grad, alpha)
            cand_value = oracle.evaluate(candidate.probs)[0]
            for _ in range(30):
                if cand_value <= value - 1e-4 * alpha * grad_sq:
                    break
                alpha *= 0.5
                candidate = advance(current, grad, alpha)
                cand_value = oracle.evaluate(candidate.probs)[0]
        else:
            alpha = _step_size(schedule, step_size, iteration)
            candidate = advance(current, grad, alpha)
        cand_value, cand_grad = oracle.evaluate(candidate.probs)
        if not (np.isfinite(cand_value) and np.all(np.isfinite(cand_grad))):
            raise NonFinite(
                "objective became non-finite during descent",
                trace=DescentTrace(tuple(iterates), np.array(values), np.array(step_sizes)),
            )
        if abs(cand_value - value) < tol:
            break
        current, value, grad = candidate, float(cand_value), cand_grad
        iterates.append(current)
        values.append(value)
        step_sizes.append(alpha)

    if floored:
        warnings.warn(
            "iterate coordinates were floored at 1e-300 to keep log-weights representable",
            FlooringWarning,
            stacklevel=2,
        )
    return DescentTrace(tuple(iterates), np.array(values), np.array(step_sizes))
