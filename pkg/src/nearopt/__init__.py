"""Near-optimality (maximum regret) of treatment rules for binary-outcome trials."""

from .bounds import BoundInput, BoundResult, bound_best, bound_prop1, bound_prop2
from .critical import dunnett_critical, student_t_critical
from .exact import (enumerate_probs_exact, exact_probs, exact_probs_es,
                    exact_probs_two_arm_bivariate_es, exact_probs_two_arm_es,
                    exact_probs_two_arm_test)
from .exceptions import BudgetExceeded, NearOptError, UnsupportedDesign, ValidationError
from .montecarlo import DEFAULT_SEED, mc_probs
from .planning import PlanResult, near_optimality, plan_sample_size
from .regret import MaxRegretResult, PrescriptionProbs, RegretReport, regret_at_state
from .rules import (AllocationDist, EmpiricalSuccess, HypothesisTest, TestConfig,
                    empirical_success, hypothesis_test_rule, pooled_variance, rule_from_name,
                    t_statistics)
from .search import (DESK, PAPER, Exact, GridSpec, MonteCarlo, PipelineConfig,
                     coarse_to_fine_two_arm, max_regret_grid, max_regret_multiarm_pipeline)
from .trial import (BINARY, BinaryState, BivariateState, SampleCounts, TrialDesign, WelfareSpec,
                    make_design, mean_welfare, mortality_to_state, sample_welfare_means)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
