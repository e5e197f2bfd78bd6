"""Smallest trial size that reaches a near-optimality target."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .exceptions import BudgetExceeded, ValidationError
from .rules import Rule
from .search import (DESK, PipelineConfig, coarse_to_fine_two_arm, max_regret_grid,
                     max_regret_multiarm_pipeline)
from .trial import TrialDesign, make_design

log = logging.getLogger(__name__)

FULL_GRID_MAX_N = 1000


def near_optimality(rule: Rule, design: TrialDesign, pipeline: PipelineConfig = DESK,
                    seed: int | None = None, workers: int = 1):
    """Maximum regret by the default route for the design.

    Two arms: exact full 1000-point grid up to 1000 per arm, coarse-to-fine
    above. More arms: the Monte Carlo pipeline.
    """
    if design.n_arms == 2:
        if max(design.arm_sizes) <= FULL_GRID_MAX_N:
            return max_regret_grid(rule, design)
        return coarse_to_fine_two_arm(rule, design)
    kwargs = {} if seed is None else {"seed": seed}
    return max_regret_multiarm_pipeline(rule, design, pipeline, workers=workers, **kwargs)


@dataclass
class PlanResult:
    """Outcome of a sample-size search.

    ``n`` is the multiplier applied to ``shape``; the design has
    ``n * shape[t]`` subjects in arm t. ``evaluations`` maps every evaluated
    multiplier to its near-optimality.
    """

    n: int
    arm_sizes: tuple[int, ...]
    value: float
    target: float
    bracket: tuple[int | None, int]
    evaluations: dict[int, float] = field(default_factory=dict)
    monotone: bool = True

    def to_dict(self) -> dict:
        return {"n": self.n, "arm_sizes": list(self.arm_sizes), "value": self.value,
                "target": self.target, "bracket": list(self.bracket),
                "evaluations": [[k, v] for k, v in sorted(self.evaluations.items())],
                "monotone": self.monotone}


def plan_sample_size(rule: Rule, shape: Sequence[int], target: float, n_max: int = 20000,
                     decimals: int | None = None,
                     evaluate: Callable[[TrialDesign], float] | None = None) -> PlanResult:
    """Smallest multiplier n with near-optimality <= ``target``.

    Doubles n from 1 until the target is met, then bisects between the last
    failing and first passing size. Bisection presumes near-optimality is
    non-increasing in n; the evaluated sizes are checked for that and the
    result is flagged if the check fails. With ``decimals`` set, values
    are rounded to that many places before comparison.
    """
    shape = tuple(int(s) for s in shape)
    if len(shape) < 2 or min(shape) < 1:
        raise ValidationError("shape needs at least two positive arm ratios")
    if not target > 0:
        raise ValidationError("target must be positive")
    if n_max < 1:
        raise ValidationError("n_max must be at least 1")
    if evaluate is None:
        def evaluate(design):
            return near_optimality(rule, design).value

    evals: dict[int, float] = {}

    def value(n):
        if n not in evals:
            evals[n] = float(evaluate(make_design([n * s for s in shape])))
            log.info("n = %d: %.6f", n, evals[n])
        return evals[n]

    def ok(n):
        v = value(n)
        return (round(v, decimals) if decimals is not None else v) <= target

    lo, hi = None, 1
    while not ok(hi):
        lo = hi
        if hi >= n_max:
            raise BudgetExceeded(
                f"target {target} not reached by n = {n_max} (value {evals[hi]:.6f})")
        hi = min(2 * hi, n_max)
    while lo is not None and hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    seq = [evals[k] for k in sorted(evals)]
    monotone = all(a >= b for a, b in zip(seq, seq[1:]))
    if not monotone:
        log.warning("near-optimality is not monotone over the evaluated sizes")
    return PlanResult(hi, tuple(hi * s for s in shape), evals[hi], target, (lo, hi),
                      evals, monotone)
