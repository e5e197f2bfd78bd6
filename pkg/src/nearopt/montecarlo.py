"""Monte Carlo prescription probabilities.

Random numbers come from a Philox counter-based generator keyed by
``(seed, state_index)``; simulations are drawn in fixed blocks of
:data:`SIM_BLOCK`, and block b uses counter offset b in the top counter
word. A state's estimate therefore depends only on (seed, state index,
design, rule, n_sims), never on which worker evaluates it or in what order.

Binary counts are drawn by inverting the binomial CDF with one uniform per
arm and simulation.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from . import _kernels
from .exceptions import UnsupportedDesign, ValidationError
from .regret import PrescriptionProbs
from .rules import EmpiricalSuccess, Rule
from .trial import BinaryState, BivariateState, TrialDesign

DEFAULT_SEED = 20200530
SIM_BLOCK = 1 << 16
_MAX_KEY = 2 ** 64


def stream(seed: int, state_index: int, block: int = 0) -> np.random.Generator:
    """Generator for simulation block ``block`` of state ``state_index``."""
    for name, v in (("seed", seed), ("state_index", state_index), ("block", block)):
        if not 0 <= int(v) < _MAX_KEY:
            raise ValidationError(f"{name} must lie in [0, 2**64), got {v}")
    key = np.array([seed, state_index], dtype=np.uint64)
    counter = np.array([0, 0, 0, block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def binomial_cdf_table(design: TrialDesign, success_probs) -> np.ndarray:
    """Row t holds P(X_t <= m) for m = 0..n_t, padded with ones."""
    width = max(design.arm_sizes) + 1
    table = np.ones((design.n_arms, width))
    for t, (n, p) in enumerate(zip(design.arm_sizes, success_probs)):
        table[t, : n + 1] = stats.binom.cdf(np.arange(n + 1), n, p)
    return table


def _blocks(n_sims: int):
    for b in range(math.ceil(n_sims / SIM_BLOCK)):
        yield b, min(SIM_BLOCK, n_sims - b * SIM_BLOCK)


def _finish(tally, cross, unit, n_sims, seed, state_index) -> PrescriptionProbs:
    probs = tally / (unit * n_sims)
    cov = cross / n_sims - np.outer(probs, probs)
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None) / n_sims)
    return PrescriptionProbs(probs, "monte-carlo", se, cov, int(n_sims), int(seed), int(state_index))


def mc_probs(rule: Rule, design: TrialDesign, state, n_sims: int,
             seed: int = DEFAULT_SEED, state_index: int = 0) -> PrescriptionProbs:
    """Estimate prescription probabilities from ``n_sims`` simulated trials."""
    n_sims = int(n_sims)
    if n_sims < 1:
        raise ValidationError("n_sims must be at least 1")
    if state.n_arms != design.n_arms:
        raise ValidationError("state and design differ in arm count")
    if isinstance(state, BivariateState):
        return _mc_bivariate(rule, design, state, n_sims, seed, state_index)
    if not isinstance(state, BinaryState):
        raise ValidationError(f"unsupported state {state!r}")
    kp = rule.kernel_params(design)
    cdf = binomial_cdf_table(design, state.success_probs)
    guide = _kernels.guide_table(cdf, kp.sizes, 4 * cdf.shape[1])
    L = design.n_arms
    tally = np.zeros(L, dtype=np.int64)
    cross = np.zeros((L, L))
    for block, size in _blocks(n_sims):
        u = stream(seed, state_index, block).random((size, L))
        _kernels.simulate_binary(kp.rule, u, cdf, guide, kp.sizes, kp.scale, kp.crit, kp.df,
                                 kp.unit, tally, cross)
    return _finish(tally, cross, kp.unit, n_sims, seed, state_index)


def _mc_bivariate(rule, design, state: BivariateState, n_sims, seed, state_index):
    if not isinstance(rule, EmpiricalSuccess):
        raise ValidationError("bivariate outcomes are only supported for empirical success")
    kp = rule.kernel_params(design)
    num, den = state.harm.numerator, state.harm.denominator
    if (num + den) * max(design.arm_sizes) * int(kp.scale.max()) * max(design.arm_sizes) >= 2 ** 62:
        raise UnsupportedDesign("harm weight has too large a denominator for exact comparison")
    L = design.n_arms
    tally = np.zeros(L, dtype=np.int64)
    cross = np.zeros((L, L))
    for block, size in _blocks(n_sims):
        rng = stream(seed, state_index, block)
        values = np.empty((size, L), dtype=np.int64)
        for t, (n, cells) in enumerate(zip(design.arm_sizes, state.cell_probs)):
            c = rng.multinomial(n, cells, size=size)
            values[:, t] = den * (c[:, 1] + c[:, 3]) - num * (c[:, 2] + c[:, 3])
        _kernels.tally_values(kp.rule, values, kp.sizes, kp.scale, kp.crit, kp.df,
                              kp.unit, tally, cross)
    return _finish(tally, cross, kp.unit, n_sims, seed, state_index)
