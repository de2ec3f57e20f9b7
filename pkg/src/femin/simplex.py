"""Probability vectors on finite alphabets and stable numerical primitives.

All quantities use natural logarithms. The convention 0*log(0) = 0 applies
throughout, and entries below ``SUPPORT_EPS`` count as exact zeros when
checking supports, so floating-point dust never triggers support errors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SupportViolation

# Entries at or below this are exact zeros for support checks.
SUPPORT_EPS = 1e-15
# Allowed deviation of sum(probs) from 1 at construction.
NORMALIZATION_TOL = 1e-9


def _as_readonly_vector(values, name):
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < 1:
        raise ValueError(f"{name} must have at least one entry")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FiniteDistribution:
    """A probability vector over the alphabet {1, ..., N}.

    Entries must be nonnegative and sum to 1 within ``NORMALIZATION_TOL``.
    Use :meth:`normalized` to build one from unnormalized nonnegative
    weights (closed-form solvers routinely produce sums off by an ulp).
    """

    probs: np.ndarray

    def __post_init__(self):
        probs = _as_readonly_vector(self.probs, "probs")
        if not np.all(np.isfinite(probs)):
            raise ValueError("probabilities must be finite")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(
                f"probabilities sum to {total!r}, more than {NORMALIZATION_TOL} from 1; "
                "use FiniteDistribution.normalized to rescale explicitly"
            )
        object.__setattr__(self, "probs", probs)

    @property
    def alphabet_size(self) -> int:
        return self.probs.size

    @classmethod
    def uniform(cls, n: int) -> "FiniteDistribution":
        return cls(np.full(int(n), 1.0 / int(n)))

    @classmethod
    def point_mass(cls, n: int, index: int) -> "FiniteDistribution":
        probs = np.zeros(int(n))
        probs[index] = 1.0
        return cls(probs)

    @classmethod
    def normalized(cls, weights) -> "FiniteDistribution":
        """Rescale nonnegative weights by their sum."""
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a nonempty vector")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        total = w.sum()
        if total <= 0:
            raise ValueError("weights must have a positive sum")
        return cls(w / total)

    def to_dict(self) -> dict:
        return {"probs": self.probs.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteDistribution":
        return cls(np.asarray(data["probs"], dtype=float))


@dataclass(frozen=True)
class LossVector:
    """Per-symbol losses over the same alphabet as a distribution."""

    losses: np.ndarray

    def __post_init__(self):
        losses = _as_readonly_vector(self.losses, "losses")
        if not np.all(np.isfinite(losses)):
            raise ValueError("losses must be finite")
        object.__setattr__(self, "losses", losses)

    @property
    def alphabet_size(self) -> int:
        return self.losses.size

    def to_dict(self) -> dict:
        return {"losses": self.losses.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "LossVector":
        return cls(np.asarray(data["losses"], dtype=float))


def _require_same_size(a, b, what="vectors"):
    if a.size != b.size:
        raise DimensionMismatch(f"{what} have lengths {a.size} and {b.size}")


def entropy(q: FiniteDistribution) -> float:
    """Shannon entropy H(q) = -sum_x q(x) log q(x), in nats.

    Lies in [0, log N]; zero entries contribute nothing.
    """
    p = q.probs
    support = p > SUPPORT_EPS
    ps = p[support]
    return float(-(ps * np.log(ps)).sum())


def kl_divergence(q: FiniteDistribution, p: FiniteDistribution) -> float:
    """KL(q || p) = sum_x q(x) log(q(x)/p(x)).

    Requires q absolutely continuous w.r.t. p; raises SupportViolation
    where q(x) > 0 but p(x) = 0.
    """
    _require_same_size(q.probs, p.probs, "distributions")
    qs = q.probs > SUPPORT_EPS
    if np.any(qs & (p.probs <= SUPPORT_EPS)):
        bad = int(np.nonzero(qs & (p.probs <= SUPPORT_EPS))[0][0])
        raise SupportViolation(f"q has mass at symbol {bad} where p has none")
    qq = q.probs[qs]
    pp = p.probs[qs]
    return float((qq * np.log(qq / pp)).sum())


def half_sq_l2(q: FiniteDistribution, p: FiniteDistribution) -> float:
    """Half squared Euclidean distance (1/2) * sum_x (q(x) - p(x))^2."""
    _require_same_size(q.probs, p.probs, "distributions")
    diff = q.probs - p.probs
    return float(0.5 * (diff @ diff))


def log_sum_exp(values) -> float:
    """log(sum_i exp(v_i)) via max-shift; safe for magnitudes up to ~1e3.

    -inf entries contribute zero weight (all -inf gives -inf); +inf and
    NaN entries are rejected.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("log_sum_exp of an empty vector")
    if np.any(np.isnan(v)) or np.any(v == np.inf):
        raise ValueError("log_sum_exp entries must be < +inf and not NaN")
    m = float(v.max())
    if m == -np.inf:
        return float("-inf")
    return float(m + np.log(np.exp(v - m).sum()))


def total_variation(q: FiniteDistribution, p: FiniteDistribution) -> float:
    """Total variation distance (1/2) * ||q - p||_1."""
    _require_same_size(q.probs, p.probs, "distributions")
    return float(0.5 * np.abs(q.probs - p.probs).sum())
