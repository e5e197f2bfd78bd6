"""Statistical treatment rules.

The scalar functions (:func:`empirical_success`, :func:`hypothesis_test_rule`
and friends) work on a single :class:`SampleCounts` with exact fractions.
The rule objects :class:`EmpiricalSuccess` and :class:`HypothesisTest` carry
the compiled batch form used by the enumeration and simulation engines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from . import _kernels
from .critical import dunnett_correlations, dunnett_critical, student_t_critical
from .exceptions import UnsupportedDesign, ValidationError
from .trial import (BINARY, SampleCounts, TrialDesign, WelfareSpec,
                    sample_welfare_means)


@dataclass(frozen=True)
class AllocationDist:
    """Fraction of the population assigned to each arm after one trial."""

    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(Fraction(p) for p in self.probs)
        if any(p < 0 for p in probs) or sum(probs) != 1:
            raise ValidationError(f"not a probability vector: {probs}")
        object.__setattr__(self, "probs", probs)

    def as_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])

    def __getitem__(self, t):
        return self.probs[t]

    def __len__(self):
        return len(self.probs)


def _split(winners: Sequence[bool]) -> AllocationDist:
    k = sum(winners)
    return AllocationDist(tuple(Fraction(1, k) if w else Fraction(0) for w in winners))


def empirical_success(sample: SampleCounts, design: TrialDesign,
                      welfare: WelfareSpec | None = None) -> AllocationDist:
    """Assign everyone to the arm with the highest observed mean welfare.

    Ties are split equally. Means are exact fractions, so ties are exact.
    """
    if welfare is None:
        welfare = BINARY
        if sample.is_bivariate:
            raise ValidationError("bivariate samples need an explicit welfare spec")
    means = sample_welfare_means(sample, design, welfare)
    best = max(means)
    return _split([m == best for m in means])


def _binary_counts(sample: SampleCounts, design: TrialDesign) -> tuple[int, ...]:
    if sample.is_bivariate:
        raise ValidationError("hypothesis-test rules apply to binary outcomes only")
    sample.check(design)
    return sample.counts


def pooled_variance(sample: SampleCounts, design: TrialDesign) -> Fraction:
    """Within-arm variance pooled over arms, divisor N - L."""
    counts = _binary_counts(sample, design)
    df = design.total - design.n_arms
    if df < 1:
        raise ValidationError("pooled variance needs N - L >= 1")
    ssq = sum((Fraction(m * (n - m), n) for m, n in zip(counts, design.arm_sizes)), Fraction(0))
    return ssq / df


def t_statistics(sample: SampleCounts, design: TrialDesign) -> tuple[float, ...]:
    """t-statistics of arms 2..L against arm 1 using the pooled variance.

    With zero pooled variance the statistic is 0 for equal means and
    +/-inf otherwise.
    """
    counts = _binary_counts(sample, design)
    var = pooled_variance(sample, design)
    n1, m1 = design.arm_sizes[0], counts[0]
    out = []
    for m, n in zip(counts[1:], design.arm_sizes[1:]):
        diff = Fraction(m, n) - Fraction(m1, n1)
        if var == 0:
            out.append(0.0 if diff == 0 else math.copysign(math.inf, diff))
        else:
            out.append(float(diff) / math.sqrt(float(var * (Fraction(1, n) + Fraction(1, n1)))))
    return tuple(out)


@dataclass(frozen=True)
class TestConfig:
    """Level and cached critical value of a many-to-one test for one design."""

    __test__ = False  # not a pytest class

    alpha: float
    df: int
    n_comparisons: int
    critical_value: float

    @property
    def kernel_df(self) -> float:
        # df = 0 pairs with an infinite critical value, so the value is unused
        return float(max(self.df, 1))

    @classmethod
    def for_design(cls, design: TrialDesign, alpha: float = 0.05) -> "TestConfig":
        """Student t for two arms, Dunnett for more; df = N - L.

        With one subject per arm there are no degrees of freedom; the test
        then has an infinite critical value and always keeps standard care.
        """
        if not 0 < alpha < 1:
            raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
        df = design.total - design.n_arms
        k = design.n_arms - 1
        if df < 1:
            return cls(float(alpha), 0, k, math.inf)
        if k == 1:
            c = student_t_critical(alpha, df)
        else:
            c = dunnett_critical(alpha, k, dunnett_correlations(design.arm_sizes), df)
        return cls(float(alpha), df, k, c)


def hypothesis_test_rule(sample: SampleCounts, design: TrialDesign,
                         config: TestConfig | None = None) -> AllocationDist:
    """Standard care unless some new arm is significantly better.

    Among significant arms the one with the largest observed mean is
    prescribed, splitting exact ties equally.
    """
    if config is None:
        config = TestConfig.for_design(design)
    counts = _binary_counts(sample, design)
    if math.isinf(config.critical_value):
        return AllocationDist((Fraction(1),) + (Fraction(0),) * (design.n_arms - 1))
    taus = t_statistics(sample, design)
    significant = [tau > config.critical_value for tau in taus]
    if not any(significant):
        return AllocationDist((Fraction(1),) + (Fraction(0),) * (design.n_arms - 1))
    means = [Fraction(m, n) for m, n in zip(counts[1:], design.arm_sizes[1:])]
    best = max(m for m, s in zip(means, significant) if s)
    return _split([False] + [s and m == best for m, s in zip(means, significant)])


# batch rule objects ---------------------------------------------------------


def _lcm(values) -> int:
    return reduce(math.lcm, (int(v) for v in values), 1)


@dataclass(frozen=True)
class KernelParams:
    rule: int
    sizes: np.ndarray
    scale: np.ndarray
    crit: float
    df: float
    unit: int


def _scale(denominators: Sequence[int], magnitude: int = 1) -> np.ndarray:
    d = _lcm(denominators)
    if d * magnitude >= 2 ** 62:
        raise UnsupportedDesign(
            f"arm sizes {tuple(denominators)} are too incommensurate for exact int64 comparison")
    return np.array([d // n for n in denominators], dtype=np.int64)


def _unit(n_arms: int) -> int:
    return _lcm(range(1, n_arms + 1))


@dataclass(frozen=True)
class EmpiricalSuccess:
    """Empirical success rule."""

    name = "es"

    def kernel_params(self, design: TrialDesign) -> KernelParams:
        return KernelParams(_kernels.ES, design.sizes, _scale(design.arm_sizes),
                            0.0, 1.0, _unit(design.n_arms))

    def allocate(self, sample: SampleCounts, design: TrialDesign,
                 welfare: WelfareSpec | None = None) -> AllocationDist:
        return empirical_success(sample, design, welfare)

    def label(self, design: TrialDesign) -> str:
        return "empirical success"


@dataclass(frozen=True)
class HypothesisTest:
    """Two-sided test at level ``alpha``: t-test for two arms, Dunnett otherwise."""

    alpha: float = 0.05

    @property
    def name(self) -> str:
        return "test"

    def config(self, design: TrialDesign) -> TestConfig:
        return TestConfig.for_design(design, self.alpha)

    def kernel_params(self, design: TrialDesign) -> KernelParams:
        cfg = self.config(design)
        return KernelParams(_kernels.TEST, design.sizes, _scale(design.arm_sizes),
                            cfg.critical_value, cfg.kernel_df, _unit(design.n_arms))

    def allocate(self, sample: SampleCounts, design: TrialDesign,
                 welfare: WelfareSpec | None = None) -> AllocationDist:
        if welfare is not None and welfare.kind != "binary":
            raise ValidationError("hypothesis-test rules apply to binary outcomes only")
        return hypothesis_test_rule(sample, design, self.config(design))

    def label(self, design: TrialDesign) -> str:
        return "t-test" if design.n_arms == 2 else "Dunnett test"


Rule = EmpiricalSuccess | HypothesisTest

RULE_NAMES = ("es", "ttest", "dunnett")


def rule_from_name(name: str, alpha: float = 0.05) -> Rule:
    key = name.strip().lower()
    if key in ("es", "empirical-success", "empirical_success"):
        return EmpiricalSuccess()
    if key in ("ttest", "t-test", "dunnett", "test"):
        return HypothesisTest(alpha)
    raise ValidationError(f"unknown rule {name!r}; expected one of {RULE_NAMES}")


def allocate_counts(rule: Rule, design: TrialDesign, counts: np.ndarray) -> np.ndarray:
    """Allocation fractions for many binary samples at once, shape (S, L)."""
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    if counts.ndim != 2 or counts.shape[1] != design.n_arms:
        raise ValidationError("counts must have shape (samples, arms)")
    if np.any(counts < 0) or np.any(counts > design.sizes):
        raise ValidationError("counts outside [0, n_t]")
    kp = rule.kernel_params(design)
    shares = _kernels.allocate_batch(kp.rule, counts, kp.sizes, kp.scale, kp.crit, kp.df, kp.unit)
    return shares / kp.unit
