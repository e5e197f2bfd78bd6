"""Trial designs, states of nature, samples and patient welfare.

Everything here uses a higher-is-better orientation: a binary outcome of 1
is a success (e.g. survival). Mortality rates are converted at the boundary
with :func:`mortality_to_state`.

Bivariate outcomes are stored as four cell probabilities per arm, in the
order given by :data:`CELLS`, i.e. ``(y_p, y_se)`` = (0, 0), (1, 0), (0, 1),
(1, 1), where ``y_p`` is the primary outcome and ``y_se`` flags the side
effect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .exceptions import ValidationError

CELLS = ((0, 0), (1, 0), (0, 1), (1, 1))

CELL_SUM_TOL = 1e-12


def as_fraction(value) -> Fraction:
    """Convert a harm weight to an exact fraction.

    Integers, fractions and strings such as ``"1/2"`` or ``"0.3"`` are exact.
    Floats are read through their shortest decimal repr, so ``0.3`` becomes
    ``3/10`` rather than the nearest binary fraction.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise ValidationError("harm must be numeric")
    if isinstance(value, Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise ValidationError(f"harm must be finite, got {value!r}")
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse harm {value!r}") from exc
    raise ValidationError(f"cannot interpret {value!r} as a rational number")


@dataclass(frozen=True)
class TrialDesign:
    """Per-arm sample sizes. Arm 0 (the first) is standard care."""

    arm_sizes: tuple[int, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        sizes = tuple(self.arm_sizes)
        if len(sizes) < 2:
            raise ValidationError(f"a design needs at least two arms, got {len(sizes)}")
        for n in sizes:
            if isinstance(n, (bool, np.bool_)) or int(n) != n or n < 1:
                raise ValidationError(f"arm sizes must be positive integers, got {sizes}")
        object.__setattr__(self, "arm_sizes", tuple(int(n) for n in sizes))
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(sizes):
                raise ValidationError("labels must have one entry per arm")
            object.__setattr__(self, "labels", labels)

    @property
    def n_arms(self) -> int:
        return len(self.arm_sizes)

    @property
    def total(self) -> int:
        return sum(self.arm_sizes)

    @property
    def sizes(self) -> np.ndarray:
        return np.asarray(self.arm_sizes, dtype=np.int64)

    def arm_labels(self) -> tuple[str, ...]:
        if self.labels is not None:
            return self.labels
        return ("standard",) + tuple(f"new{t}" for t in range(1, self.n_arms))

    def __str__(self):
        return ":".join(str(n) for n in self.arm_sizes)


def make_design(arm_sizes: Sequence[int], labels: Sequence[str] | None = None) -> TrialDesign:
    return TrialDesign(tuple(arm_sizes), None if labels is None else tuple(labels))


@dataclass(frozen=True)
class WelfareSpec:
    """Patient welfare as a function of the observed outcome.

    ``kind="binary"`` maps y to y. ``kind="bivariate"`` maps (y_p, y_se) to
    ``y_p - harm * y_se``.
    """

    kind: str = "binary"
    harm: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind not in ("binary", "bivariate"):
            raise ValidationError(f"unknown welfare kind {self.kind!r}")
        harm = as_fraction(self.harm)
        if harm < 0:
            raise ValidationError("harm must be nonnegative")
        if self.kind == "binary" and harm != 0:
            raise ValidationError("binary welfare has no harm weight")
        object.__setattr__(self, "harm", harm)

    @classmethod
    def bivariate(cls, harm) -> "WelfareSpec":
        return cls("bivariate", as_fraction(harm))

    def utility(self, y) -> Fraction:
        if self.kind == "binary":
            if y not in (0, 1):
                raise ValidationError(f"binary outcome must be 0 or 1, got {y!r}")
            return Fraction(y)
        yp, yse = y
        return Fraction(yp) - self.harm * yse

    @property
    def bounds(self) -> tuple[Fraction, Fraction]:
        if self.kind == "binary":
            return Fraction(0), Fraction(1)
        return -self.harm, Fraction(1)

    @property
    def range(self) -> Fraction:
        lo, hi = self.bounds
        return hi - lo


BINARY = WelfareSpec()


@dataclass(frozen=True)
class BinaryState:
    """Success probability of each arm."""

    success_probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.success_probs)
        if len(probs) < 2:
            raise ValidationError("a state needs at least two arms")
        for p in probs:
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"success probabilities must lie in [0, 1], got {probs}")
        object.__setattr__(self, "success_probs", probs)

    @property
    def n_arms(self) -> int:
        return len(self.success_probs)

    @property
    def welfare(self) -> WelfareSpec:
        return BINARY

    def mortality(self) -> tuple[float, ...]:
        return tuple(complement(p) for p in self.success_probs)


@dataclass(frozen=True)
class BivariateState:
    """Joint distribution of (primary outcome, side effect) for each arm.

    Cells follow :data:`CELLS`. Pass ``renormalize=True`` to rescale cells
    that do not sum to one; otherwise such input is rejected.
    """

    cell_probs: tuple[tuple[float, float, float, float], ...]
    harm: Fraction = Fraction(0)
    renormalize: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        arms = []
        for cells in self.cell_probs:
            cells = tuple(float(c) for c in cells)
            if len(cells) != 4:
                raise ValidationError("each arm needs exactly 4 cell probabilities")
            if any(c < 0 or not math.isfinite(c) for c in cells):
                raise ValidationError(f"cell probabilities must be nonnegative, got {cells}")
            total = math.fsum(cells)
            if abs(total - 1.0) > CELL_SUM_TOL:
                if not self.renormalize or total <= 0:
                    raise ValidationError(f"cell probabilities sum to {total!r}, not 1")
                cells = tuple(c / total for c in cells)
            arms.append(cells)
        if len(arms) < 2:
            raise ValidationError("a state needs at least two arms")
        object.__setattr__(self, "cell_probs", tuple(arms))
        object.__setattr__(self, "harm", as_fraction(self.harm))
        if self.harm < 0:
            raise ValidationError("harm must be nonnegative")

    @property
    def n_arms(self) -> int:
        return len(self.cell_probs)

    @property
    def welfare(self) -> WelfareSpec:
        return WelfareSpec.bivariate(self.harm)

    def primary_marginal(self) -> BinaryState:
        return BinaryState(tuple(c[1] + c[3] for c in self.cell_probs))


State = BinaryState | BivariateState


def complement(x: float) -> float:
    """1 - x taken in decimal, so complement(0.7) == 0.3 exactly as typed."""
    return float(1 - Fraction(repr(float(x))))


def mortality_to_state(mortality_rates: Sequence[float]) -> BinaryState:
    """Binary state whose success probabilities are 1 - mortality."""
    rates = [float(r) for r in mortality_rates]
    for r in rates:
        if not 0.0 <= r <= 1.0:
            raise ValidationError(f"mortality rates must lie in [0, 1], got {rates}")
    return BinaryState(tuple(complement(r) for r in rates))


def _resolve_welfare(state, welfare: WelfareSpec | None) -> WelfareSpec:
    natural = state.welfare
    if welfare is None:
        return natural
    if welfare != natural:
        raise ValidationError(f"welfare {welfare} does not match state welfare {natural}")
    return welfare


def mean_welfare(state: State, welfare: WelfareSpec | None = None) -> np.ndarray:
    """Expected welfare of each arm in ``state``."""
    welfare = _resolve_welfare(state, welfare)
    if isinstance(state, BinaryState):
        return np.array(state.success_probs)
    values = np.array([float(welfare.utility(y)) for y in CELLS])
    return np.array([float(np.dot(cells, values)) for cells in state.cell_probs])


@dataclass(frozen=True)
class SampleCounts:
    """Sufficient statistic of one trial realization.

    For binary outcomes ``counts[t]`` is the number of successes in arm t.
    For bivariate outcomes it is a 4-tuple of cell counts ordered as
    :data:`CELLS`.
    """

    counts: tuple

    def __post_init__(self):
        normalized = []
        for c in self.counts:
            if isinstance(c, (tuple, list, np.ndarray)):
                c = tuple(int(x) for x in c)
                if len(c) != 4 or any(x < 0 for x in c):
                    raise ValidationError(f"bivariate counts need 4 nonnegative cells, got {c}")
            else:
                c = int(c)
                if c < 0:
                    raise ValidationError("success counts must be nonnegative")
            normalized.append(c)
        kinds = {isinstance(c, tuple) for c in normalized}
        if len(kinds) > 1:
            raise ValidationError("cannot mix binary and bivariate counts")
        object.__setattr__(self, "counts", tuple(normalized))

    @property
    def is_bivariate(self) -> bool:
        return bool(self.counts) and isinstance(self.counts[0], tuple)

    def check(self, design: TrialDesign) -> None:
        if len(self.counts) != design.n_arms:
            raise ValidationError(
                f"sample has {len(self.counts)} arms, design has {design.n_arms}")
        for c, n in zip(self.counts, design.arm_sizes):
            if self.is_bivariate:
                if sum(c) != n:
                    raise ValidationError(f"cell counts {c} do not sum to arm size {n}")
            elif c > n:
                raise ValidationError(f"{c} successes exceed arm size {n}")

    @classmethod
    def from_outcomes(cls, outcomes: Sequence[Sequence]) -> tuple["SampleCounts", TrialDesign]:
        """Aggregate raw per-arm outcome lists into counts and a design."""
        counts = []
        for arm in outcomes:
            arm = list(arm)
            if arm and isinstance(arm[0], (tuple, list)):
                cells = [0, 0, 0, 0]
                for y in arm:
                    cells[CELLS.index(tuple(y))] += 1
                counts.append(tuple(cells))
            else:
                if any(y not in (0, 1) for y in arm):
                    raise ValidationError("binary outcomes must be 0 or 1")
                counts.append(sum(arm))
        return cls(tuple(counts)), make_design([len(a) for a in outcomes])


def welfare_totals(sample: SampleCounts, welfare: WelfareSpec) -> tuple[Fraction, ...]:
    """Sum of observed welfare in each arm."""
    if sample.is_bivariate:
        if welfare.kind != "bivariate":
            raise ValidationError("bivariate sample needs bivariate welfare")
        values = [welfare.utility(y) for y in CELLS]
        return tuple(sum((v * k for v, k in zip(values, c)), Fraction(0)) for c in sample.counts)
    if welfare.kind != "binary":
        raise ValidationError("binary sample needs binary welfare")
    return tuple(Fraction(m) for m in sample.counts)


def sample_welfare_means(sample: SampleCounts, design: TrialDesign,
                         welfare: WelfareSpec = BINARY) -> tuple[Fraction, ...]:
    """Observed mean welfare per arm, as exact fractions."""
    sample.check(design)
    totals = welfare_totals(sample, welfare)
    return tuple(w / n for w, n in zip(totals, design.arm_sizes))
