"""Exact prescription probabilities.

Two-arm binary designs are handled in O(n1 * n2) at worst and usually
O(n1 + n2) per state, with matrix forms that evaluate a whole grid of
states at once. :func:`enumerate_probs_exact` is a brute-force reference
over the full product sample space.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from fractions import Fraction

import numpy as np
from scipy import stats

from . import _kernels
from .exceptions import BudgetExceeded, UnsupportedDesign, ValidationError
from .regret import PrescriptionProbs
from .rules import EmpiricalSuccess, HypothesisTest, Rule, TestConfig
from .trial import BinaryState, BivariateState, TrialDesign

DEFAULT_BUDGET = 10 ** 7
_CHUNK = 1 << 18
_P_FLUSH = 1e-200


def binom_pmf_matrix(n: int, ps) -> np.ndarray:
    """Row i holds the Binomial(n, ps[i]) pmf over 0..n."""
    ps = np.atleast_1d(np.asarray(ps, dtype=float))
    # scipy overflows for p near the float minimum; flushing moves the pmf by at most n * 1e-200
    ps = np.where(ps < _P_FLUSH, 0.0, ps)
    k = np.arange(n + 1)
    return stats.binom.pmf(k[None, :], n, ps[:, None])


def _padded_cdf(pmf: np.ndarray) -> np.ndarray:
    # cdf[..., j + 1] = P(X <= j), cdf[..., 0] = 0
    cdf = np.zeros(pmf.shape[:-1] + (pmf.shape[-1] + 1,))
    np.cumsum(pmf, axis=-1, out=cdf[..., 1:])
    return cdf


def _require_two_arms(design: TrialDesign) -> None:
    if design.n_arms != 2:
        raise UnsupportedDesign(f"two-arm computation requested for {design.n_arms} arms")


def _require_binary(design: TrialDesign, state) -> BinaryState:
    if not isinstance(state, BinaryState):
        raise ValidationError("this computation needs a binary state")
    if state.n_arms != design.n_arms:
        raise ValidationError("state and design differ in arm count")
    return state


# two-arm empirical success -------------------------------------------------


def _es_weights(n1: int, n2: int, pmf1: np.ndarray) -> np.ndarray:
    """W[i, k] = P1(m1/n1 < k/n2) + P1(m1/n1 = k/n2) / 2 for each row of pmf1."""
    k = np.arange(n2 + 1)
    below = (k * n1 - 1) // n2  # largest m1 with m1 * n2 < k * n1
    cdf = _padded_cdf(pmf1)
    weights = cdf[:, below + 1]
    tie = (k * n1) % n2 == 0
    weights[:, tie] += 0.5 * pmf1[:, (k[tie] * n1) // n2]
    return weights


def exact_probs_two_arm_es(design: TrialDesign, state: BinaryState) -> PrescriptionProbs:
    _require_two_arms(design)
    state = _require_binary(design, state)
    n1, n2 = design.arm_sizes
    pmf1 = binom_pmf_matrix(n1, state.success_probs[0])
    pmf2 = binom_pmf_matrix(n2, state.success_probs[1])[0]
    p_new = float(_es_weights(n1, n2, pmf1)[0] @ pmf2)
    return PrescriptionProbs(np.array([1.0 - p_new, p_new]), "exact")


# two-arm hypothesis test ---------------------------------------------------


def rejection_thresholds(design: TrialDesign, config: TestConfig) -> np.ndarray | None:
    """For each m2, the m1 count below which the test rejects, or None.

    None means the rejection region is not a union of m1-prefixes, in which
    case callers fall back to the full rejection matrix.
    """
    thresholds = np.zeros(design.arm_sizes[1] + 1, dtype=np.int64)
    ok = _kernels.two_arm_thresholds(design.sizes, config.critical_value,
                                     config.kernel_df, thresholds)
    return thresholds if ok else None


def rejection_matrix(design: TrialDesign, config: TestConfig) -> np.ndarray:
    return _kernels.two_arm_rejection_matrix(design.sizes, config.critical_value, config.kernel_df)


def _test_new_probs(design: TrialDesign, config: TestConfig, pmf1: np.ndarray,
                    pmf2: np.ndarray, force_scan: bool = False) -> np.ndarray:
    thresholds = None if force_scan else rejection_thresholds(design, config)
    if thresholds is None:
        region = rejection_matrix(design, config).astype(float)
        return pmf1 @ region @ pmf2.T
    cdf1 = _padded_cdf(pmf1)
    return cdf1[:, thresholds] @ pmf2.T


def exact_probs_two_arm_test(design: TrialDesign, state: BinaryState,
                             config: TestConfig | None = None,
                             force_scan: bool = False) -> PrescriptionProbs:
    _require_two_arms(design)
    state = _require_binary(design, state)
    if config is None:
        config = TestConfig.for_design(design)
    n1, n2 = design.arm_sizes
    pmf1 = binom_pmf_matrix(n1, state.success_probs[0])
    pmf2 = binom_pmf_matrix(n2, state.success_probs[1])
    p_new = float(_test_new_probs(design, config, pmf1, pmf2, force_scan)[0, 0])
    return PrescriptionProbs(np.array([1.0 - p_new, p_new]), "exact")


def two_arm_new_probs(rule: Rule, design: TrialDesign, p1s, p2s) -> np.ndarray:
    """P[prescribe arm 2] for every pair (p1s[i], p2s[j]), shape (len(p1s), len(p2s))."""
    _require_two_arms(design)
    n1, n2 = design.arm_sizes
    pmf1 = binom_pmf_matrix(n1, p1s)
    pmf2 = binom_pmf_matrix(n2, p2s)
    if isinstance(rule, EmpiricalSuccess):
        return _es_weights(n1, n2, pmf1) @ pmf2.T
    if isinstance(rule, HypothesisTest):
        return _test_new_probs(design, rule.config(design), pmf1, pmf2)
    raise ValidationError(f"unsupported rule {rule!r}")


def exact_probs(rule: Rule, design: TrialDesign, state) -> PrescriptionProbs:
    """Exact prescription probabilities by the fastest available route."""
    if isinstance(state, BivariateState):
        if not isinstance(rule, EmpiricalSuccess):
            raise ValidationError("bivariate outcomes are only supported for empirical success")
        return exact_probs_two_arm_bivariate_es(design, state)
    if isinstance(rule, EmpiricalSuccess):
        if design.n_arms == 2:
            return exact_probs_two_arm_es(design, state)
        return exact_probs_es(design, state)
    if design.n_arms == 2:
        return exact_probs_two_arm_test(design, state, rule.config(design))
    return enumerate_probs_exact(rule, design, state)


# multi-arm empirical success -----------------------------------------------


def exact_probs_es(design: TrialDesign, state: BinaryState) -> PrescriptionProbs:
    """Exact empirical-success probabilities for any number of arms.

    For arm t with m successes, every other arm s is independently below,
    level with, or above m/n_t. Arm t's share is the expectation of
    1/(1 + #level) on the event that no arm is above, computed from the
    product polynomial prod_s (P_below + P_level * z).
    """
    state = _require_binary(design, state)
    sizes = design.arm_sizes
    pmfs = [binom_pmf_matrix(n, p)[0] for n, p in zip(sizes, state.success_probs)]
    cdfs = [_padded_cdf(f) for f in pmfs]
    L = design.n_arms
    out = np.zeros(L)
    for t in range(L):
        nt = sizes[t]
        m = np.arange(nt + 1)
        poly = np.zeros((L, nt + 1))
        poly[0] = 1.0
        degree = 0
        for s in range(L):
            if s == t:
                continue
            ns = sizes[s]
            below = cdfs[s][(m * ns - 1) // nt + 1]
            level = np.zeros(nt + 1)
            tie = (m * ns) % nt == 0
            level[tie] = pmfs[s][(m[tie] * ns) // nt]
            new = poly * below
            new[1:degree + 2] += poly[:degree + 1] * level
            poly = new
            degree += 1
        share = (poly / np.arange(1, L + 1)[:, None]).sum(axis=0)
        out[t] = float(pmfs[t] @ share)
    return PrescriptionProbs(out, "exact")


# brute force ---------------------------------------------------------------


def enumerate_probs_exact(rule: Rule, design: TrialDesign, state: BinaryState,
                          budget: int = DEFAULT_BUDGET) -> PrescriptionProbs:
    """Exact probabilities by summing over every possible sample."""
    state = _require_binary(design, state)
    shape = tuple(n + 1 for n in design.arm_sizes)
    cells = math.prod(shape)
    if cells > budget:
        raise BudgetExceeded(f"sample space has {cells} cells, budget is {budget}")
    pmfs = [binom_pmf_matrix(n, p)[0] for n, p in zip(design.arm_sizes, state.success_probs)]
    kp = rule.kernel_params(design)
    L = design.n_arms
    sums = np.zeros(L)
    cross = np.zeros((L, L))
    for start in range(0, cells, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, cells))
        counts = np.stack(np.unravel_index(flat, shape), axis=1).astype(np.int64)
        weights = np.ones(len(flat))
        for t in range(L):
            weights *= pmfs[t][counts[:, t]]
        _kernels.accumulate_weighted(kp.rule, counts, weights, kp.sizes, kp.scale,
                                     kp.crit, kp.df, kp.unit, sums, cross)
    # cov is the exact covariance of one trial's allocation vector, i.e. what
    # a Monte Carlo estimate's ``cov`` converges to
    return PrescriptionProbs(sums, "enumeration", cov=cross - np.outer(sums, sums))


# bivariate outcomes ----------------------------------------------------------


def compositions(n: int) -> np.ndarray:
    """All 4-cell count vectors summing to n, shape (C(n+3, 3), 4)."""
    rows = []
    for a in range(n + 1):
        for b in range(n + 1 - a):
            c = np.arange(n + 1 - a - b)
            rows.append(np.column_stack([n - a - b - c, np.full_like(c, a),
                                         np.full_like(c, b), c]))
    return np.concatenate(rows)


def _score_distribution(n: int, cells, harm: Fraction):
    # integer welfare total q*(#y_p=1) - p*(#side effects), with harm = p/q
    comps = compositions(n)
    probs = stats.multinomial.pmf(comps, n, np.asarray(cells))
    primary = comps[:, 1] + comps[:, 3]
    side = comps[:, 2] + comps[:, 3]
    scores = [harm.denominator * int(a) - harm.numerator * int(b) for a, b in zip(primary, side)]
    keys, inverse = np.unique(np.array(scores, dtype=object), return_inverse=True)
    return list(keys), np.bincount(inverse.ravel(), weights=probs)


def exact_probs_two_arm_bivariate_es(design: TrialDesign, state: BivariateState,
                                     budget: int = DEFAULT_BUDGET) -> PrescriptionProbs:
    """Empirical success with welfare y_p - h * y_se, by full enumeration."""
    _require_two_arms(design)
    if not isinstance(state, BivariateState) or state.n_arms != 2:
        raise ValidationError("need a two-arm bivariate state")
    for n in design.arm_sizes:
        if math.comb(n + 3, 3) > budget:
            raise BudgetExceeded(
                f"{math.comb(n + 3, 3)} cell-count vectors for n={n} exceed budget {budget}; "
                "use mc_probs instead")
    n1, n2 = design.arm_sizes
    d = math.lcm(n1, n2)
    keys1, probs1 = _score_distribution(n1, state.cell_probs[0], state.harm)
    keys2, probs2 = _score_distribution(n2, state.cell_probs[1], state.harm)
    # scaled to the common denominator; python ints keep comparisons exact
    x1 = [k * (d // n1) for k in keys1]
    x2 = [k * (d // n2) for k in keys2]
    order = sorted(range(len(x1)), key=x1.__getitem__)
    sorted1 = [x1[i] for i in order]
    cdf1 = np.concatenate([[0.0], np.cumsum(probs1[order])])
    p_new = 0.0
    for x, w in zip(x2, probs2):
        lo, hi = bisect_left(sorted1, x), bisect_right(sorted1, x)
        p_new += w * (cdf1[lo] + 0.5 * (cdf1[hi] - cdf1[lo]))
    return PrescriptionProbs(np.array([1.0 - p_new, p_new]), "exact")
