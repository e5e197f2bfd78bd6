import math

import numpy as np
import pytest
from scipy import integrate, stats

from nearopt.critical import (dunnett_correlations, dunnett_coverage, dunnett_critical,
                              student_t_critical)
from nearopt.exceptions import UnsupportedDesign, ValidationError


def test_t_critical_against_quadrature():
    # integrate the t density independently and check the tail mass
    c = student_t_critical(0.05, 197)
    tail, _ = integrate.quad(lambda x: stats.t.pdf(x, 197), c, np.inf, epsabs=1e-14)
    assert 2 * tail == pytest.approx(0.05, abs=1e-12)
    assert student_t_critical(0.05, math.inf) == pytest.approx(1.959963984540054, abs=1e-12)


@pytest.mark.parametrize("alpha,df", [(0, 10), (1, 10), (0.05, 0), (0.05, 2.5)])
def test_t_critical_invalid(alpha, df):
    with pytest.raises(ValidationError):
        student_t_critical(alpha, df)


@pytest.mark.parametrize("df", [5, 197, 1495])
def test_dunnett_single_comparison_is_t(df):
    assert dunnett_critical(0.05, 1, 0.5, df) == pytest.approx(student_t_critical(0.05, df),
                                                               abs=1e-9)


def test_dunnett_published_table_value():
    # large-df balanced many-to-one table: k = 4 comparisons, two-sided 5%, c = 2.44
    c = dunnett_critical(0.05, 4, 0.5, math.inf)
    assert round(c, 2) == 2.44


def test_dunnett_between_t_and_bonferroni():
    c = dunnett_critical(0.05, 4, 1 / 3, 1495)
    assert student_t_critical(0.05, 1495) < c < student_t_critical(0.05 / 4, 1495)
    assert dunnett_coverage(c, 4, 1 / 3, 1495) == pytest.approx(0.95, abs=1e-10)


def test_dunnett_monte_carlo_oracle():
    # max |T| for equicorrelated t variates, simulated directly
    k, rho, df = 4, 1 / 3, 295
    rng = np.random.default_rng(11)
    n = 400_000
    z0 = rng.standard_normal(n)
    e = rng.standard_normal((n, k))
    s = np.sqrt(rng.chisquare(df, n) / df)
    t = (math.sqrt(rho) * z0[:, None] + math.sqrt(1 - rho) * e) / s[:, None]
    q = np.quantile(np.abs(t).max(axis=1), 0.95)
    assert dunnett_critical(0.05, k, rho, df) == pytest.approx(q, abs=0.01)


def test_unequal_correlations_unsupported():
    with pytest.raises(UnsupportedDesign):
        dunnett_critical(0.05, 2, dunnett_correlations([100, 50, 60]), 200)
    with pytest.raises(ValidationError):
        dunnett_critical(0.05, 2, [0.5, 0.5, 0.5], 200)


def test_correlations():
    assert dunnett_correlations([500, 250, 250]) == [1 / 3, 1 / 3]
