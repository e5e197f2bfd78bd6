"""
Two-arm trials: scenarios, near-optimality and sample size
==========================================================

Compares the hypothesis-test rule with empirical success for a trial of
standard care against one new treatment, first at a handful of mortality
scenarios and then in the worst case over all states of nature.

Run with ``python3 notebooks/two_arm_trials.py``; everything here is exact
and takes a few seconds.
"""

# %%
import numpy as np

from nearopt import (BinaryState, EmpiricalSuccess, HypothesisTest, coarse_to_fine_two_arm,
                     exact_probs, make_design, max_regret_grid, mortality_to_state,
                     plan_sample_size, regret_at_state)

test, es = HypothesisTest(alpha=0.05), EmpiricalSuccess()

# %% [markdown]
# Scenarios for a 100:99 trial. Standard care has mortality 0.25; the new
# treatment ranges from clearly worse to clearly better.

# %%
design = make_design([100, 99])
print(f"{'new mortality':>14} {'test: % new':>12} {'loss':>8} {'ES: % new':>10} {'loss':>8}")
for m in [0.40, 0.35, 0.30, 0.25, 0.20, 0.15, 0.10]:
    state = mortality_to_state([0.25, m])
    row = []
    for rule in (test, es):
        probs = exact_probs(rule, design, state)
        row += [100 * probs.probs[1], regret_at_state(probs, state).expected_loss]
    print(f"{m:>14.2f} {row[0]:>12.2f} {row[1]:>8.4f} {row[2]:>10.2f} {row[3]:>8.4f}")

# %% [markdown]
# The test rule keeps standard care unless the evidence is strong, so it
# loses most when the new treatment is moderately better. Empirical
# success follows the sample means and loses little anywhere.
#
# Near-optimality is the largest expected loss over a 1000 x 1000 grid of
# success probabilities.

# %%
for n in [20, 50, 100, 500, 1000]:
    d = make_design([n, n])
    r_test, r_es = max_regret_grid(test, d), max_regret_grid(es, d)
    print(f"n = {n:>5} per arm: test {r_test.value:.4f}, ES {r_es.value:.4f}")

# %% [markdown]
# Where the worst case sits at 100 per arm. Maximisers come in pairs:
# empirical success is symmetric in the arms, and the test rule's regret is
# unchanged when both mortality rates p are replaced by 1 - p and the arms
# swapped.

# %%
d = make_design([100, 100])
for rule in (test, es):
    r = max_regret_grid(rule, d)
    mort = [tuple(round(1 - p, 4) for p in s) for s in r.argmax_states]
    print(f"{rule.label(d)}: worst mortality (standard, new) {mort}, "
          f"wrong choice with probability {r.error_probability:.3f}")

# %% [markdown]
# Large trials: coarse-to-fine search visits a fraction of the grid but
# stays on it, so it returns the same maximum.

# %%
for n in [2000, 4000]:
    d = make_design([n, n])
    r = coarse_to_fine_two_arm(test, d)
    print(f"test rule, n = {n}: {r.value:.4f} after {r.n_evaluated} of {1000 ** 2} states")

# %% [markdown]
# Inverting the relation: the smallest trial whose worst-case loss under
# empirical success is at most 0.012 (values rounded to four places).

# %%
plan = plan_sample_size(es, [1, 1], 0.012, decimals=4)
print(f"ES reaches 0.012 at n = {plan.n} per arm; evaluated {sorted(plan.evaluations)}")

# %% [markdown]
# Calibration of the test at equal arms: the probability of switching to
# the new treatment is about alpha / 2 in the middle of the range and
# falls towards zero as the common success probability nears 0 or 1.

# %%
for p in [0.02, 0.1, 0.3, 0.5, 0.75, 0.9, 0.98]:
    probs = exact_probs(test, make_design([100, 99]), BinaryState((p, p)))
    print(f"p = {p:.2f}: P(new) = {100 * probs.probs[1]:.2f}%")
print("alpha / 2 =", np.round(100 * 0.05 / 2, 2), "%")
