from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nearopt.exceptions import ValidationError
from nearopt.trial import (BINARY, BinaryState, BivariateState, SampleCounts, WelfareSpec,
                           as_fraction, complement, make_design, mean_welfare,
                           mortality_to_state, sample_welfare_means)


class TestDesign:
    def test_basic(self):
        d = make_design([100, 99])
        assert d.n_arms == 2 and d.total == 199
        assert d.arm_labels() == ("standard", "new1")
        assert str(d) == "100:99"

    @pytest.mark.parametrize("sizes", [[100], [], [0, 5], [3, -1], [2.5, 3], [True, 4]])
    def test_rejects_invalid(self, sizes):
        with pytest.raises(ValidationError):
            make_design(sizes)

    def test_labels_length(self):
        with pytest.raises(ValidationError):
            make_design([1, 2], labels=["a"])


class TestStates:
    def test_mortality_conversion_is_decimal(self):
        s = mortality_to_state([0.25, 0.7, 0.35])
        assert s.success_probs == (0.75, 0.3, 0.65)
        assert s.mortality() == (0.25, 0.7, 0.35)

    @given(st.floats(0, 1))
    def test_complement_involution(self, x):
        # exact for anything typed with a short decimal expansion
        y = round(x, 6)
        assert complement(complement(y)) == y

    @pytest.mark.parametrize("rates", [[0.2, 1.1], [-0.1, 0.5]])
    def test_mortality_range(self, rates):
        with pytest.raises(ValidationError):
            mortality_to_state(rates)

    def test_binary_needs_two_arms(self):
        with pytest.raises(ValidationError):
            BinaryState((0.5,))

    def test_bivariate_validation(self):
        with pytest.raises(ValidationError):
            BivariateState(((0.5, 0.5, 0.1, 0.0), (0.25,) * 4))
        s = BivariateState(((1, 1, 1, 1), (0.25,) * 4), renormalize=True)
        assert s.cell_probs[0] == (0.25,) * 4

    def test_bivariate_welfare(self):
        s = BivariateState(((0.1, 0.4, 0.2, 0.3), (0.25,) * 4), harm=0.5)
        # E[y_p] - h E[y_se] = 0.7 - 0.5 * 0.5
        assert mean_welfare(s) == pytest.approx([0.45, 0.5 - 0.25])
        assert s.primary_marginal().success_probs == pytest.approx((0.7, 0.5))

    def test_welfare_mismatch(self):
        with pytest.raises(ValidationError):
            mean_welfare(BinaryState((0.1, 0.2)), WelfareSpec.bivariate(1))


class TestWelfareSpec:
    def test_harm_from_float_is_decimal(self):
        assert as_fraction(0.3) == Fraction(3, 10)
        assert WelfareSpec.bivariate("1/3").harm == Fraction(1, 3)

    def test_range(self):
        assert BINARY.range == 1
        assert WelfareSpec.bivariate(0.5).range == Fraction(3, 2)

    def test_binary_has_no_harm(self):
        with pytest.raises(ValidationError):
            WelfareSpec("binary", Fraction(1))


class TestSamples:
    def test_from_outcomes(self):
        sample, design = SampleCounts.from_outcomes([[1, 0, 1], [0, 0]])
        assert sample.counts == (2, 0) and design.arm_sizes == (3, 2)
        assert sample_welfare_means(sample, design) == (Fraction(2, 3), Fraction(0))

    def test_bivariate_means_are_exact(self):
        sample, design = SampleCounts.from_outcomes(
            [[(1, 0), (1, 1), (0, 1)], [(0, 0), (1, 0)]])
        w = WelfareSpec.bivariate(Fraction(1, 3))
        means = sample_welfare_means(sample, design, w)
        # arm 1: (1 + (1 - 1/3) + (-1/3)) / 3
        assert means == (Fraction(4, 9), Fraction(1, 2))

    def test_counts_checked_against_design(self):
        with pytest.raises(ValidationError):
            sample_welfare_means(SampleCounts((4, 1)), make_design([3, 3]))
        with pytest.raises(ValidationError):
            SampleCounts(((1, 2, 0, 0), 3))

    def test_brute_force_mean_welfare(self):
        # expected welfare by summing over cells one by one
        rng = np.random.default_rng(3)
        cells = rng.dirichlet(np.ones(4), size=3)
        s = BivariateState(tuple(map(tuple, cells)), harm=Fraction(2, 5))
        brute = [sum(p * (yp - 0.4 * ys) for p, (yp, ys) in
                     zip(c, [(0, 0), (1, 0), (0, 1), (1, 1)])) for c in cells]
        assert mean_welfare(s) == pytest.approx(brute, abs=1e-15)
