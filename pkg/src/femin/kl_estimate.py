"""Variational KL-divergence estimation from samples.

The variational objective

    E_{x~p}[-L(x)] - log E_{x~q}[exp(-L(x))]

lower-bounds KL(p || q) for every function L and attains it at
L*(x) = -log(p(x)/q(x)). Replacing the expectations with empirical
averages and maximizing over a tractable function class gives a sample
estimator of the divergence; here the classes are per-symbol tables and
linear functions of a fixed feature map, both of which make the objective
concave in the parameters and the optimum exactly analyzable.

Sign convention: -L appears inside both expectations. Much of the
estimation literature writes the same objective with T = -L.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySamples, NonFinite, SupportViolation
from .simplex import SUPPORT_EPS, FiniteDistribution, log_sum_exp


@dataclass(frozen=True)
class TabularFunction:
    """One real value per alphabet symbol.

    `excluded` marks symbols that behave as if L were +inf there (they carry
    zero weight exp(-L) = 0) while keeping the stored parameters finite.
    """

    values: np.ndarray
    excluded: np.ndarray | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("values must be a nonempty vector")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.excluded is not None:
            excluded = np.array(self.excluded, dtype=bool, copy=True)
            if excluded.shape != values.shape:
                raise ValueError("excluded mask must match values")
            excluded.setflags(write=False)
            object.__setattr__(self, "excluded", excluded)

    @classmethod
    def zeros(cls, alphabet_size: int) -> "TabularFunction":
        return cls(np.zeros(int(alphabet_size)))

    @property
    def alphabet_size(self) -> int:
        return self.values.size

    def neg_values(self) -> np.ndarray:
        """-L per symbol; excluded symbols get -inf."""
        neg = -self.values
        if self.excluded is not None:
            neg = np.where(self.excluded, -np.inf, neg)
        return neg

    def with_values(self, values) -> "TabularFunction":
        return TabularFunction(values, self.excluded)


@dataclass(frozen=True)
class LinearFeaturesFunction:
    """L(x) = w . f(x) for a fixed per-symbol feature table f."""

    features: np.ndarray  # alphabet_size x d
    weights: np.ndarray  # d

    def __post_init__(self):
        features = np.array(self.features, dtype=float, copy=True)
        weights = np.array(self.weights, dtype=float, copy=True)
        if features.ndim != 2 or features.size == 0:
            raise ValueError("features must be a nonempty 2-D table")
        if weights.shape != (features.shape[1],):
            raise ValueError(f"weights must have shape ({features.shape[1]},)")
        if not (np.all(np.isfinite(features)) and np.all(np.isfinite(weights))):
            raise ValueError("features and weights must be finite")
        features.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def zeros(cls, features) -> "LinearFeaturesFunction":
        features = np.asarray(features, dtype=float)
        return cls(features, np.zeros(features.shape[1]))

    @property
    def alphabet_size(self) -> int:
        return self.features.shape[0]

    def neg_values(self) -> np.ndarray:
        return -(self.features @ self.weights)

    def with_weights(self, weights) -> "LinearFeaturesFunction":
        return LinearFeaturesFunction(self.features, weights)


@dataclass(frozen=True)
class SamplePair:
    """Symbol samples drawn from the two distributions being compared."""

    samples_p: np.ndarray
    samples_q: np.ndarray

    def __post_init__(self):
        for name in ("samples_p", "samples_q"):
            arr = np.asarray(getattr(self, name))
            if arr.ndim != 1 or arr.size == 0:
                raise EmptySamples(f"{name} must be a nonempty vector of symbols")
            arr = arr.astype(np.int64)
            if np.any(arr < 0):
                raise ValueError(f"{name} must contain nonnegative symbol indices")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def max_symbol(self) -> int:
        return int(max(self.samples_p.max(), self.samples_q.max()))


def _check_alphabet(fn, samples: SamplePair):
    if samples.max_symbol() >= fn.alphabet_size:
        raise ValueError(
            f"samples use symbol {samples.max_symbol()} but the function covers "
            f"{fn.alphabet_size} symbols"
        )


def dv_objective(fn, samples: SamplePair) -> float:
    """Empirical objective: mean_p[-L] - log mean_q[exp(-L)]."""
    _check_alphabet(fn, samples)
    neg = fn.neg_values()
    term_p = float(neg[samples.samples_p].mean())
    term_q = log_sum_exp(neg[samples.samples_q]) - float(np.log(samples.samples_q.size))
    return term_p - term_q


def dv_objective_population(fn, p: FiniteDistribution, q: FiniteDistribution) -> float:
    """Exact-expectation objective: E_p[-L] - log E_q[exp(-L)].

    At most KL(p || q) for every function, with equality at the exact
    optimizer -log(p/q).
    """
    if p.alphabet_size != fn.alphabet_size or q.alphabet_size != fn.alphabet_size:
        raise ValueError("p, q, and the function must share the alphabet size")
    neg = fn.neg_values()
    p_support = p.probs > SUPPORT_EPS
    if np.any(p_support & (neg == -np.inf)):
        return float("-inf")
    term_p = float((p.probs[p_support] * neg[p_support]).sum())
    q_support = q.probs > SUPPORT_EPS
    term_q = log_sum_exp(np.log(q.probs[q_support]) + neg[q_support])
    return term_p - term_q


def exact_dv_optimum(p: FiniteDistribution, q: FiniteDistribution) -> TabularFunction:
    """The maximizing table L*(x) = -log(p(x)/q(x)).

    Symbols with p(x) = 0 would need L* = +inf; they are marked excluded
    instead, keeping the stored parameters finite.
    """
    if p.alphabet_size != q.alphabet_size:
        raise ValueError("p and q must share the alphabet size")
    p_support = p.probs > SUPPORT_EPS
    if np.any(p_support & (q.probs <= SUPPORT_EPS)):
        bad = int(np.nonzero(p_support & (q.probs <= SUPPORT_EPS))[0][0])
        raise SupportViolation(f"p has mass at symbol {bad} where q has none")
    values = np.zeros(p.alphabet_size)
    values[p_support] = -(np.log(p.probs[p_support]) - np.log(q.probs[p_support]))
    excluded = ~p_support
    return TabularFunction(values, excluded if excluded.any() else None)


@dataclass(frozen=True)
class FitResult:
    function: object
    kl_estimate: float
    trace: np.ndarray
    seed: int


def _empirical_gradient(fn, p_hat: np.ndarray, q_counts: np.ndarray):
    """Ascent direction of the empirical objective in the class parameters."""
    neg = fn.neg_values()
    with np.errstate(divide="ignore"):
        log_w = np.where(q_counts > 0, np.log(q_counts, where=q_counts > 0) + neg, -np.inf)
    shift = log_w.max()
    soft = np.exp(log_w - shift)
    soft /= soft.sum()
    symbol_grad = soft - p_hat
    if isinstance(fn, TabularFunction):
        return symbol_grad
    return fn.features.T @ symbol_grad


def _with_parameters(fn, params):
    if isinstance(fn, TabularFunction):
        return fn.with_values(params)
    return fn.with_weights(params)


def _parameters(fn):
    return fn.values if isinstance(fn, TabularFunction) else fn.weights


def fit_dv(init, samples: SamplePair, steps: int = 500, learning_rate: float = 0.1, seed: int = 0) -> FitResult:
    """Maximize the empirical objective by full-batch gradient ascent.

    The objective is concave in the parameters of both supported classes, so
    ascent with per-step halving line search yields a nondecreasing trace.
    The final objective value is the divergence estimate. The fit itself is
    deterministic; seed is recorded for provenance only.
    """
    steps = int(steps)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    learning_rate = float(learning_rate)
    if not (learning_rate > 0):
        raise ValueError("learning_rate must be > 0")
    _check_alphabet(init, samples)
    n = init.alphabet_size
    p_hat = np.bincount(samples.samples_p, minlength=n) / samples.samples_p.size
    q_counts = np.bincount(samples.samples_q, minlength=n).astype(float)

    fn = init
    objective = dv_objective(fn, samples)
    trace = [objective]
    if not np.isfinite(objective):
        raise NonFinite("objective is non-finite at the initial parameters", trace=np.array(trace))
    for _ in range(steps):
        grad = _empirical_gradient(fn, p_hat, q_counts)
        step = learning_rate
        accepted = None
        for _ in range(60):
            candidate = _with_parameters(fn, _parameters(fn) + step * grad)
            value = dv_objective(candidate, samples)
            if np.isfinite(value) and value >= objective - 1e-12:
                accepted = (candidate, value)
                break
            step *= 0.5
        if accepted is None:
            break  # no ascent direction survives halving: converged
        fn, objective = accepted
        if not np.all(np.isfinite(_parameters(fn))) or not np.isfinite(objective):
            raise NonFinite("parameters diverged during the fit", trace=np.array(trace))
        trace.append(objective)
    return FitResult(fn, float(objective), np.array(trace), int(seed))
