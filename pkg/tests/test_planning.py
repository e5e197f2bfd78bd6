import pytest

from nearopt.exceptions import BudgetExceeded, ValidationError
from nearopt.planning import near_optimality, plan_sample_size
from nearopt.rules import EmpiricalSuccess, HypothesisTest
from nearopt.trial import make_design

ES = EmpiricalSuccess()


def curve(c):
    """Near-optimality c / sqrt(n per arm) for a stub evaluator."""
    return lambda d: c / min(d.arm_sizes) ** 0.5


class TestSearch:
    def test_finds_smallest_n(self):
        # c / sqrt(n) <= 0.01 iff n >= 100 for c = 0.1
        r = plan_sample_size(ES, [1, 1], 0.01, evaluate=curve(0.1))
        assert r.n == 100 and r.arm_sizes == (100, 100)
        assert r.bracket == (99, 100) and r.monotone
        assert r.evaluations[99] > 0.01 >= r.evaluations[100]

    def test_shape_multiplies(self):
        r = plan_sample_size(ES, [2, 1, 1], 0.01, evaluate=curve(0.1))
        assert r.n == 100 and r.arm_sizes == (200, 100, 100)

    def test_large_target_needs_one(self):
        r = plan_sample_size(ES, [1, 1], 1.0, evaluate=curve(0.5))
        assert r.n == 1 and r.bracket == (None, 1)

    def test_unreachable(self):
        with pytest.raises(BudgetExceeded):
            plan_sample_size(ES, [1, 1], 1e-4, n_max=64, evaluate=curve(0.1))

    def test_non_monotone_flagged(self):
        values = {1: 0.5, 2: 0.3, 4: 0.2, 8: 0.05, 5: 0.01, 6: 0.2, 7: 0.3}
        r = plan_sample_size(ES, [1, 1], 0.1,
                             evaluate=lambda d: values[d.arm_sizes[0]])
        assert not r.monotone

    def test_rounding(self):
        # 0.10049 rounds to 0.1000 at four decimals
        r = plan_sample_size(ES, [1, 1], 0.1, decimals=4,
                             evaluate=lambda d: 0.1 + 0.49e-4 if d.arm_sizes[0] >= 5 else 0.2)
        assert r.n == 5

    @pytest.mark.parametrize("kwargs", [dict(shape=[1], target=0.1), dict(shape=[1, 0], target=0.1),
                                        dict(shape=[1, 1], target=0)])
    def test_validation(self, kwargs):
        with pytest.raises(ValidationError):
            plan_sample_size(ES, **kwargs)


class TestRealEvaluations:
    def test_es_hundred_per_arm(self):
        r = plan_sample_size(ES, [1, 1], 0.012, decimals=4)
        assert r.n == 100 and round(r.value, 4) == 0.0120 and r.monotone

    def test_trivial_target(self):
        assert plan_sample_size(HypothesisTest(), [1, 1], 1.0).n == 1

    @pytest.mark.slow
    def test_t_test_four_thousand_suffices(self):
        r = plan_sample_size(HypothesisTest(), [1, 1], 0.0115, decimals=4)
        assert r.n <= 4000 and round(r.value, 4) <= 0.0115

    def test_route(self):
        small = near_optimality(ES, make_design([20, 20]))
        assert small.method == "exact" and round(small.value, 4) == 0.0269
        assert near_optimality(ES, make_design([1200, 1200])).method == "exact-coarse-to-fine"
