"""Prescription probabilities, regret at a state, and maximum-regret results."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError
from .trial import State, WelfareSpec, complement, mean_welfare


@dataclass(frozen=True)
class PrescriptionProbs:
    """Probability that the rule prescribes each arm, over repeated trials.

    For Monte Carlo results ``cov`` is the covariance matrix of one
    simulated allocation vector, so the standard error of any linear
    combination ``w @ probs`` is ``sqrt(w @ cov @ w / n_sims)``.
    """

    probs: np.ndarray
    method: str = "exact"
    std_errors: np.ndarray | None = None
    cov: np.ndarray | None = None
    n_sims: int | None = None
    seed: int | None = None
    state_index: int | None = None

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or np.any(probs < -1e-15):
            raise ValidationError(f"invalid prescription probabilities {probs}")
        object.__setattr__(self, "probs", probs)

    def __len__(self):
        return len(self.probs)

    def linear_se(self, weights) -> float:
        if self.cov is None or not self.n_sims:
            return 0.0
        w = np.asarray(weights, dtype=float)
        return float(np.sqrt(max(w @ self.cov @ w, 0.0) / self.n_sims))


@dataclass(frozen=True)
class RegretReport:
    state: State
    prescription: PrescriptionProbs
    mean_welfare: np.ndarray
    per_arm_loss: np.ndarray
    expected_loss: float
    std_error: float = 0.0

    @property
    def error_probability(self) -> float:
        """Probability of prescribing an arm that is not best."""
        return float(self.prescription.probs[self.per_arm_loss > 0].sum())


def regret_at_state(probs: PrescriptionProbs, state: State,
                    welfare: WelfareSpec | None = None) -> RegretReport:
    """Expected welfare shortfall from the best arm."""
    mu = mean_welfare(state, welfare)
    if len(mu) != len(probs):
        raise ValidationError("prescription probabilities and state differ in arm count")
    loss = mu.max() - mu
    value = float(np.dot(loss, probs.probs))
    return RegretReport(state, probs, mu, loss, max(value, 0.0), probs.linear_se(loss))


@dataclass
class MaxRegretResult:
    """Largest regret found over a set of evaluated states.

    ``argmax_states`` lists every evaluated state whose regret ties the
    maximum (relative tolerance 1e-12); ``top`` holds the best states in
    decreasing order as ``(regret, success_probs)`` pairs.
    """

    value: float
    argmax_state: tuple[float, ...]
    method: str
    argmax_states: list[tuple[float, ...]] = field(default_factory=list)
    error_probability: float | None = None
    std_error: float | None = None
    top: list[tuple[float, tuple[float, ...]]] = field(default_factory=list)
    n_evaluated: int = 0
    stages: list[dict] = field(default_factory=list)

    def argmax_mortality(self) -> tuple[float, ...]:
        return tuple(complement(p) for p in self.argmax_state)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax_state": list(self.argmax_state),
            "argmax_states": [list(s) for s in self.argmax_states],
            "error_probability": self.error_probability,
            "std_error": self.std_error,
            "method": self.method,
            "n_evaluated": self.n_evaluated,
            "top": [[v, list(s)] for v, s in self.top],
            "stages": self.stages,
        }
