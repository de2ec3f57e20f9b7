"""Gibbs posteriors, the change-of-measure generalization inequality, the
square-root generalization bound for bounded losses, and a Monte Carlo
harness that verifies the bound's coverage.

Hypothesis classes are finite and losses tabular, so test losses, KL terms,
and averaged generalization gaps are all computed exactly; the only source
of randomness in a coverage experiment is the draw of the training sets.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import EmptyTrainingSet, NonPositivePrior
from .free_energy import ComplexityPenalty, FreeEnergyProblem, minimize_closed_form
from .simplex import SUPPORT_EPS, FiniteDistribution, LossVector, kl_divergence, log_sum_exp


@dataclass(frozen=True)
class LearningProblem:
    """Finite hypothesis class with a bounded tabular loss.

    loss_table[x, z] is the loss of hypothesis x on data symbol z and must
    lie in [a, b] for every pair. The data-generating distribution is known
    synthetically: it is used only to evaluate exact test losses and to
    sample training sets.
    """

    loss_table: np.ndarray
    a: float
    b: float
    prior: FiniteDistribution
    data_model: FiniteDistribution

    def __post_init__(self):
        table = np.array(self.loss_table, dtype=float, copy=True)
        if table.ndim != 2 or table.size == 0:
            raise ValueError("loss_table must be a nonempty 2-D table")
        a, b = float(self.a), float(self.b)
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ValueError(f"need finite a < b, got a={a!r}, b={b!r}")
        if not np.all(np.isfinite(table)):
            raise ValueError("losses must be finite")
        if table.min() < a or table.max() > b:
            raise ValueError("every loss must lie in [a, b]")
        if table.shape[0] != self.prior.alphabet_size:
            raise ValueError(
                f"prior covers {self.prior.alphabet_size} hypotheses, table has {table.shape[0]}"
            )
        if table.shape[1] != self.data_model.alphabet_size:
            raise ValueError(
                f"data model covers {self.data_model.alphabet_size} symbols, table has {table.shape[1]}"
            )
        if np.any(self.prior.probs <= SUPPORT_EPS):
            raise NonPositivePrior("prior over hypotheses must be strictly positive")
        table.setflags(write=False)
        object.__setattr__(self, "loss_table", table)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n_hypotheses(self) -> int:
        return self.loss_table.shape[0]

    @property
    def n_outcomes(self) -> int:
        return self.loss_table.shape[1]

    def to_dict(self) -> dict:
        return {
            "loss_table": self.loss_table.tolist(),
            "a": self.a,
            "b": self.b,
            "prior": self.prior.probs.tolist(),
            "data_model": self.data_model.probs.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LearningProblem":
        return cls(
            np.asarray(data["loss_table"], dtype=float),
            float(data["a"]),
            float(data["b"]),
            FiniteDistribution(np.asarray(data["prior"], dtype=float)),
            FiniteDistribution(np.asarray(data["data_model"], dtype=float)),
        )


@dataclass(frozen=True)
class GibbsPosterior:
    q: FiniteDistribution
    beta: float
    training_set_id: str


def _check_samples(problem: LearningProblem, s) -> np.ndarray:
    samples = np.asarray(s)
    if samples.ndim != 1 or samples.size == 0:
        raise EmptyTrainingSet("training set must be a nonempty vector of symbols")
    samples = samples.astype(np.int64)
    if np.any(samples < 0) or np.any(samples >= problem.n_outcomes):
        raise ValueError(f"training symbols must lie in [0, {problem.n_outcomes})")
    return samples


def training_losses(problem: LearningProblem, s) -> np.ndarray:
    """Empirical loss of every hypothesis on the sample: (1/m) sum_i l(x, z_i)."""
    samples = _check_samples(problem, s)
    return problem.loss_table[:, samples].mean(axis=1)


def training_loss(problem: LearningProblem, x: int, s) -> float:
    return float(training_losses(problem, s)[int(x)])


def test_losses(problem: LearningProblem) -> np.ndarray:
    """Exact expected loss of every hypothesis under the data model."""
    return problem.loss_table @ problem.data_model.probs


def test_loss(problem: LearningProblem, x: int) -> float:
    return float(test_losses(problem)[int(x)])


def gibbs_posterior(problem: LearningProblem, s, beta: float) -> GibbsPosterior:
    """Minimizer of E_q[train loss] + (1/beta) KL(q || prior):
    q(x) proportional to prior(x) exp(-beta * train_loss(x))."""
    beta = float(beta)
    if not np.isfinite(beta) or beta <= 0:
        raise ValueError(f"beta must be finite and > 0, got {beta!r}")
    samples = _check_samples(problem, s)
    fe = FreeEnergyProblem(
        LossVector(training_losses(problem, samples)),
        1.0 / beta,
        ComplexityPenalty.kl_to_prior(problem.prior),
    )
    tag = hashlib.sha1(samples.tobytes()).hexdigest()[:12]
    return GibbsPosterior(minimize_closed_form(fe).q_opt, beta, f"m={samples.size}:{tag}")


def dv_check(problem: LearningProblem, q: FiniteDistribution, s, beta: float):
    """Both sides of the change-of-measure inequality on the generalization gap.

    lhs = E_{x~q}[beta * (test - train)(x)],
    rhs = KL(q || prior) + log E_{x~prior}[exp(beta * (test - train)(x))];
    lhs <= rhs for every q absolutely continuous w.r.t. the prior.
    """
    beta = float(beta)
    samples = _check_samples(problem, s)
    gaps = test_losses(problem) - training_losses(problem, samples)
    lhs = float(q.probs @ (beta * gaps))
    rhs = kl_divergence(q, problem.prior) + log_sum_exp(np.log(problem.prior.probs) + beta * gaps)
    return lhs, float(rhs)


def pac_bayes_bound(kl: float, m: int, delta: float, a: float, b: float) -> float:
    """sqrt((b - a)^2 / (2m) * (kl + log(1/delta))).

    High-probability (1 - delta) bound on the averaged generalization gap of
    any posterior with the given KL to the prior, for losses in [a, b].
    """
    kl = float(kl)
    m = int(m)
    delta = float(delta)
    a, b = float(a), float(b)
    if kl < 0 or not np.isfinite(kl):
        raise ValueError(f"kl must be finite and >= 0, got {kl!r}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise ValueError(f"need finite a < b, got a={a!r}, b={b!r}")
    return float(np.sqrt((b - a) ** 2 / (2.0 * m) * (kl + np.log(1.0 / delta))))


@dataclass(frozen=True)
class CoverageReport:
    violation_rate: float
    mean_gap: float
    mean_bound: float
    n_violations: int
    trials: int
    seed: int
    beta: float
    m: int
    delta: float

    def to_dict(self) -> dict:
        return {
            "violation_rate": self.violation_rate,
            "mean_gap": self.mean_gap,
            "mean_bound": self.mean_bound,
            "n_violations": self.n_violations,
            "trials": self.trials,
            "seed": self.seed,
            "beta": self.beta,
            "m": self.m,
            "delta": self.delta,
        }


def coverage_experiment(
    problem: LearningProblem, beta: float, m: int, delta: float, trials: int, seed: int
) -> CoverageReport:
    """Draw `trials` training sets, learn the Gibbs posterior on each, and
    count how often the exact averaged gap exceeds the bound at level delta.

    The per-trial generator is derived from (seed, trial index), so trials
    are reproducible independently of execution order. The observed
    violation rate should stay within binomial slack of delta.
    """
    trials = int(trials)
    m = int(m)
    if trials < 100:
        raise ValueError(f"need at least 100 trials for a meaningful rate, got {trials}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    test_vec = test_losses(problem)
    n_violations = 0
    gap_total = 0.0
    bound_total = 0.0
    for trial in range(trials):
        rng = np.random.default_rng((int(seed), trial))
        s = rng.choice(problem.n_outcomes, size=m, p=problem.data_model.probs)
        post = gibbs_posterior(problem, s, beta)
        gap = float(post.q.probs @ (test_vec - training_losses(problem, s)))
        kl = kl_divergence(post.q, problem.prior)
        bound = pac_bayes_bound(kl, m, delta, problem.a, problem.b)
        if gap > bound:
            n_violations += 1
        gap_total += gap
        bound_total += bound
    return CoverageReport(
        violation_rate=n_violations / trials,
        mean_gap=gap_total / trials,
        mean_bound=bound_total / trials,
        n_violations=n_violations,
        trials=trials,
        seed=int(seed),
        beta=float(beta),
        m=m,
        delta=float(delta),
    )
