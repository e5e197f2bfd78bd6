import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nearopt.exact import enumerate_probs_exact, exact_probs_es
from nearopt.exceptions import ValidationError
from nearopt.montecarlo import SIM_BLOCK, binomial_cdf_table, mc_probs, stream
from nearopt.rules import EmpiricalSuccess, HypothesisTest
from nearopt.trial import BinaryState, make_design, mortality_to_state

ES, TEST = EmpiricalSuccess(), HypothesisTest()


class TestDeterminism:
    def test_same_key_same_result(self):
        d, s = make_design([20, 20, 20]), BinaryState((0.4, 0.5, 0.45))
        a = mc_probs(TEST, d, s, 3 * SIM_BLOCK + 17, seed=9, state_index=4)
        b = mc_probs(TEST, d, s, 3 * SIM_BLOCK + 17, seed=9, state_index=4)
        assert a.probs.tobytes() == b.probs.tobytes()
        assert a.std_errors.tobytes() == b.std_errors.tobytes()

    def test_keys_change_streams(self):
        d, s = make_design([20, 20]), BinaryState((0.4, 0.5))
        base = mc_probs(ES, d, s, 5000, seed=1, state_index=0).probs
        assert not np.array_equal(base, mc_probs(ES, d, s, 5000, seed=2, state_index=0).probs)
        assert not np.array_equal(base, mc_probs(ES, d, s, 5000, seed=1, state_index=1).probs)

    def test_blocks_are_independent_streams(self):
        a = stream(3, 5, 0).random(8)
        b = stream(3, 5, 1).random(8)
        assert not np.array_equal(a, b)
        assert np.array_equal(a, stream(3, 5, 0).random(8))

    def test_key_range(self):
        with pytest.raises(ValidationError):
            stream(-1, 0)
        with pytest.raises(ValidationError):
            stream(0, 2 ** 64)
        with pytest.raises(ValidationError):
            mc_probs(ES, make_design([2, 2]), BinaryState((0.1, 0.2)), 0)


class TestAgainstExact:
    @settings(max_examples=15)
    @given(st.lists(st.integers(1, 10), min_size=2, max_size=3),
           st.lists(st.floats(0, 1), min_size=3, max_size=3), st.sampled_from([ES, TEST]),
           st.integers(0, 2 ** 32))
    def test_within_four_true_standard_errors(self, sizes, ps, rule, seed):
        if isinstance(rule, HypothesisTest):
            sizes = [sizes[0]] + [sizes[1]] * (len(sizes) - 1)
        d, s = make_design(sizes), BinaryState(tuple(ps[: len(sizes)]))
        exact = enumerate_probs_exact(rule, d, s)
        n = 200_000
        mc = mc_probs(rule, d, s, n, seed=seed)
        true_se = np.sqrt(np.clip(np.diag(exact.cov), 0, None) / n)
        # a floor of one draw's worth covers components with (near) zero variance
        assert np.all(np.abs(mc.probs - exact.probs) <= 4 * true_se + 1 / n)

    def test_estimated_se_tracks_true_se(self):
        d, s = make_design([8, 8, 8]), BinaryState((0.5, 0.55, 0.6))
        exact = enumerate_probs_exact(TEST, d, s)
        mc = mc_probs(TEST, d, s, 400_000, seed=2)
        true_se = np.sqrt(np.diag(exact.cov) / 400_000)
        assert mc.std_errors == pytest.approx(true_se, rel=0.02)

    def test_five_arm_es_against_dp(self):
        d = make_design([500, 250, 250, 250, 250])
        s = mortality_to_state([0.25, 0.15, 0.20, 0.30, 0.35])
        exact = exact_probs_es(d, s).probs
        mc = mc_probs(ES, d, s, 200_000, seed=4)
        assert np.all(np.abs(mc.probs - exact) <= 4 * mc.std_errors + 1e-5)


class TestSimulationProperties:
    @pytest.mark.parametrize("rule", [ES, TEST])
    def test_probabilities_sum_to_one(self, rule):
        d, s = make_design([30, 15, 15]), BinaryState((0.3, 0.32, 0.29))
        assert mc_probs(rule, d, s, 70_000).probs.sum() == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("ps,expected", [((0.0, 1.0), [0, 1]), ((1.0, 1.0), [0.5, 0.5]),
                                             ((1.0, 0.0), [1, 0])])
    def test_degenerate_states(self, ps, expected):
        r = mc_probs(ES, make_design([10, 7]), BinaryState(ps), 10_000)
        assert r.probs.tolist() == expected
        assert r.std_errors.tolist() == [0, 0]

    def test_cdf_table(self):
        t = binomial_cdf_table(make_design([2, 4]), (0.5, 0.5))
        assert t[0].tolist() == [0.25, 0.75, 1, 1, 1]
        assert t[1, -1] == pytest.approx(1)

    def test_linear_se(self):
        d, s = make_design([20, 20]), BinaryState((0.4, 0.6))
        r = mc_probs(ES, d, s, 50_000)
        # allocations sum to one, so w = (1, 1) has zero variance
        assert r.linear_se([1, 1]) == pytest.approx(0, abs=1e-9)
        assert r.linear_se([0, 1]) == pytest.approx(r.std_errors[1], rel=1e-9)
