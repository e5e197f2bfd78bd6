import json
import math

import numpy as np
import pytest

from nearopt.exceptions import ValidationError
from nearopt.exact import exact_probs
from nearopt.regret import regret_at_state
from nearopt.rules import EmpiricalSuccess, HypothesisTest
from nearopt.search import (Exact, GridSpec, MonteCarlo, PipelineConfig, coarse_to_fine_two_arm,
                            exchangeable_classes, max_regret_grid, max_regret_multiarm_pipeline,
                            midpoints, state_key, uniform_points)
from nearopt.trial import BinaryState, make_design

ES, TEST = EmpiricalSuccess(), HypothesisTest()
TINY = PipelineConfig(step1_points=5, step1_sims=500, step2_points=11, step2_sims=2000,
                      step2_stride=2, step2_screen_sims=500, step2_refine_top=4, step3_top=3,
                      step3_sims=4000)


class TestGrids:
    def test_points(self):
        assert midpoints(4).tolist() == [0.125, 0.375, 0.625, 0.875]
        assert uniform_points(3).tolist() == [0, 0.5, 1]

    def test_sizes(self):
        assert GridSpec.full(midpoints(10), 3).size() == 1000
        classes = ((0,), (1, 2, 3, 4))
        g = GridSpec.full(uniform_points(51), 5, classes)
        assert g.size() == 51 * math.comb(54, 4)
        small = GridSpec.full(uniform_points(4), 4, ((0,), (1, 2, 3)))
        assert small.size() == sum(1 for _ in small.states())

    def test_family_shapes(self):
        es = list(GridSpec.es_family(uniform_points(3), 4).states())
        assert es == [(0.5, 0, 0, 0), (1, 0, 0, 0), (1, 0.5, 0.5, 0.5)]
        test = list(GridSpec.test_family(uniform_points(3), 4).states())
        assert all(s[1] > s[0] and s[1] > s[2] and s[2] == s[3] for s in test)
        assert list(GridSpec.test_family(uniform_points(3), 2).states()) == [
            (0, 0.5), (0, 1), (0.5, 1)]

    @pytest.mark.parametrize("kwargs", [
        dict(points=((0.5, 1.5),) * 2, n_arms=2),
        dict(points=((0.5,),), n_arms=2),
        dict(points=((0.5,),) * 2, n_arms=2, family="diagonal"),
        dict(points=((0.5,),) * 3, n_arms=3, classes=((0, 1),)),
        dict(points=((0.5,), (0.5,), (0.2,)), n_arms=3, classes=((0,), (1, 2))),
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValidationError):
            GridSpec(**kwargs)

    def test_classes(self):
        assert exchangeable_classes(ES, make_design([40, 20, 20, 40])) == ((0, 3), (1, 2))
        assert exchangeable_classes(TEST, make_design([40, 20, 20, 20])) == ((0,), (1, 2, 3))

    def test_state_keys_are_distinct(self):
        assert state_key(0, 5) != state_key(1, 5)
        with pytest.raises(ValidationError):
            state_key(0, 2 ** 48)


class TestGridSearch:
    @pytest.mark.parametrize("rule,sizes", [(ES, [4, 4, 4]), (ES, [5, 3, 3]),
                                            (TEST, [5, 3, 3])])
    def test_exchangeable_reduction_keeps_the_maximum(self, rule, sizes):
        d = make_design(sizes)
        pts = uniform_points(7)
        full = max_regret_grid(rule, d, GridSpec.full(pts, 3), Exact())
        reduced = max_regret_grid(rule, d, GridSpec.full(pts, 3, exchangeable_classes(rule, d)),
                                  Exact())
        assert reduced.value == pytest.approx(full.value, rel=1e-12)
        assert reduced.n_evaluated < full.n_evaluated

    def test_matrix_path_matches_state_path(self):
        d = make_design([12, 9])
        grid = GridSpec.full(midpoints(20), 2)
        fast = max_regret_grid(TEST, d, grid)
        slow = max_regret_grid(TEST, d, GridSpec(grid.points, 2, classes=((0,), (1,))))
        assert fast.value == pytest.approx(slow.value, abs=1e-14)
        s = BinaryState(fast.argmax_state)
        assert regret_at_state(exact_probs(TEST, d, s), s).expected_loss == pytest.approx(
            fast.value, abs=1e-14)

    def test_equal_states_give_zero(self):
        grid = GridSpec((tuple(uniform_points(5)),) * 2, 2, classes=((0, 1),))
        diag = [s for s in grid.states() if s[0] == s[1]]
        assert len(diag) == 5
        # only equal-probability states: restrict each axis to one value
        for p in uniform_points(5):
            r = max_regret_grid(ES, make_design([10, 10]), GridSpec(((p,), (p,)), 2), Exact())
            assert r.value == 0

    def test_es_symmetry(self):
        # equal arm sizes: swapping arms leaves regret unchanged
        r = max_regret_grid(ES, make_design([40, 40]), GridSpec.full(midpoints(100), 2))
        states = set(r.argmax_states)
        assert all((b, a) in states for a, b in states)

    def test_regret_decreases_with_sample_size(self):
        values = [max_regret_grid(ES, make_design([n, n]), GridSpec.full(midpoints(200), 2)).value
                  for n in (10, 25, 50, 100)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_needs_grid_for_multi_arm(self):
        with pytest.raises(ValidationError):
            max_regret_grid(ES, make_design([2, 2, 2]))


class TestCoarseToFine:
    @pytest.mark.parametrize("rule", [ES, TEST])
    @pytest.mark.parametrize("sizes", [[50, 50], [100, 99], [30, 70], [500, 500]])
    def test_matches_full_grid(self, rule, sizes):
        d = make_design(sizes)
        full = max_regret_grid(rule, d)
        c2f = coarse_to_fine_two_arm(rule, d)
        assert c2f.value == pytest.approx(full.value, abs=1e-4)
        assert c2f.n_evaluated < full.n_evaluated

    def test_strides_validated(self):
        with pytest.raises(ValidationError):
            coarse_to_fine_two_arm(ES, make_design([5, 5]), strides=(10, 2))
        with pytest.raises(ValidationError):
            coarse_to_fine_two_arm(ES, make_design([5, 5, 5]))


class TestParallelAndResume:
    def test_worker_count_does_not_change_results(self):
        d = make_design([8, 4, 4])
        grid = GridSpec.full(uniform_points(6), 3, exchangeable_classes(TEST, d))
        one = max_regret_grid(TEST, d, grid, MonteCarlo(3000, seed=7), workers=1)
        two = max_regret_grid(TEST, d, grid, MonteCarlo(3000, seed=7), workers=2)
        assert json.dumps(one.to_dict()) == json.dumps(two.to_dict())

    def test_pipeline_worker_invariance(self):
        d = make_design([6, 3, 3])
        runs = [max_regret_multiarm_pipeline(TEST, d, TINY, seed=3, workers=w) for w in (1, 2)]
        dicts = [r.to_dict() for r in runs]
        for x in dicts:
            for s in x["stages"]:
                s.pop("seconds")
        assert json.dumps(dicts[0]) == json.dumps(dicts[1])

    def test_pipeline_runs_and_guards(self):
        r = max_regret_multiarm_pipeline(ES, make_design([6, 3, 3]), TINY, seed=3)
        assert [s["stage"] for s in r.stages] == [1, 2, 3]
        assert r.value > 0 and r.std_error > 0
        assert "restriction_guard_ok" in r.stages[-1]

    def test_checkpoint_resume(self, tmp_path):
        d = make_design([6, 3, 3])
        path = tmp_path / "ck.json"
        first = max_regret_multiarm_pipeline(TEST, d, TINY, seed=3, checkpoint=path)
        data = json.loads(path.read_text())
        assert data["schema_version"] == 1 and set(data["stages"]) == {
            "step1", "step2-screen", "step2", "step3"}
        # drop the last two stages, as if interrupted
        del data["stages"]["step2"], data["stages"]["step3"]
        path.write_text(json.dumps(data))
        resumed = max_regret_multiarm_pipeline(TEST, d, TINY, seed=3, checkpoint=path)
        fresh = max_regret_multiarm_pipeline(TEST, d, TINY, seed=3)
        strip = lambda r: {k: v for k, v in r.to_dict().items() if k != "stages"}  # noqa: E731
        assert strip(resumed) == strip(first) == strip(fresh)

    def test_checkpoint_identity_checked(self, tmp_path):
        path = tmp_path / "ck.json"
        max_regret_multiarm_pipeline(ES, make_design([6, 3, 3]), TINY, seed=3, checkpoint=path)
        with pytest.raises(ValidationError):
            max_regret_multiarm_pipeline(ES, make_design([6, 3, 3]), TINY, seed=4,
                                         checkpoint=path)

    def test_pipeline_config_validation(self):
        with pytest.raises(ValidationError):
            PipelineConfig(step2_points=1)
        assert TINY.total_sims_estimate(ES, make_design([6, 3, 3])) > 0


def test_max_regret_is_max_of_evaluated():
    d = make_design([10, 10])
    grid = GridSpec.full(midpoints(15), 2)
    r = max_regret_grid(ES, d, grid)
    values = []
    for s in grid.states():
        st = BinaryState(s)
        values.append(regret_at_state(exact_probs(ES, d, st), st).expected_loss)
    assert r.value == pytest.approx(max(values), abs=1e-15)
    assert r.top[0][0] == r.value and len(r.top) >= 10
    assert np.all(np.diff([v for v, _ in r.top]) <= 0)
