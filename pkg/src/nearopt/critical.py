"""Critical values for the two-sided t and Dunnett many-to-one tests."""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import integrate, optimize, stats

from .exceptions import UnsupportedDesign, ValidationError

_HERMITE_NODES = 128
_RHO_TOL = 1e-12


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def _check_df(df) -> float:
    if df == math.inf:
        return math.inf
    if int(df) != df or df < 1:
        raise ValidationError(f"degrees of freedom must be a positive integer, got {df}")
    return int(df)


def student_t_critical(alpha: float, df) -> float:
    """Upper alpha/2 quantile of Student's t, so that P(|T| > c) = alpha."""
    alpha = _check_alpha(alpha)
    df = _check_df(df)
    if df == math.inf:
        return float(stats.norm.isf(alpha / 2))
    return float(stats.t.isf(alpha / 2, df))


@lru_cache(maxsize=None)
def _hermite():
    z, w = np.polynomial.hermite_e.hermegauss(_HERMITE_NODES)
    return z, w / math.sqrt(2 * math.pi)


def _inside_given_scale(c: float, s: float, k: int, rho: float) -> float:
    # P(max |Z_t| <= c*s) with Z_t = sqrt(rho)*Z0 + sqrt(1-rho)*E_t
    z, w = _hermite()
    a, b = math.sqrt(rho), math.sqrt(1.0 - rho)
    band = stats.norm.cdf((c * s - a * z) / b) - stats.norm.cdf((-c * s - a * z) / b)
    return float(np.dot(w, band ** k))


def dunnett_coverage(c: float, k: int, rho: float, df) -> float:
    """P(max_t |T_t| <= c) for k equicorrelated t variates.

    The normal part is integrated by Gauss-Hermite quadrature over the shared
    control variate; the chi scale is integrated on the probability scale,
    which keeps the integrand bounded for any df.
    """
    if df == math.inf:
        return _inside_given_scale(c, 1.0, k, rho)

    def integrand(u):
        s = math.sqrt(stats.chi2.ppf(u, df) / df)
        return _inside_given_scale(c, s, k, rho)

    value, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-11, epsrel=1e-11, limit=400)
    return value


@lru_cache(maxsize=256)
def _dunnett_cached(alpha: float, k: int, rho: float, df) -> float:
    lo = student_t_critical(alpha, df)
    hi = student_t_critical(alpha / k, df)  # Bonferroni
    if k == 1:
        lo, hi = 0.5 * lo, 2.0 * lo
    target = 1.0 - alpha
    f = lambda c: dunnett_coverage(c, k, rho, df) - target
    return optimize.brentq(f, lo - 1e-6, hi + 1e-6, xtol=1e-10, rtol=1e-14)


def dunnett_critical(alpha: float, k: int, correlations: Sequence[float] | float, df) -> float:
    """Two-sided Dunnett critical value for k comparisons with a control.

    ``correlations`` holds n_t / (n_t + n_1) for each comparison arm; only the
    equicorrelated case (all comparison arms the same size) is supported.
    """
    alpha = _check_alpha(alpha)
    df = _check_df(df)
    k = int(k)
    if k < 1:
        raise ValidationError("need at least one comparison")
    rhos = np.atleast_1d(np.asarray(correlations, dtype=float))
    if rhos.size == 1:
        rhos = np.repeat(rhos, k)
    if rhos.size != k:
        raise ValidationError(f"expected {k} correlations, got {rhos.size}")
    if np.any((rhos <= 0) | (rhos >= 1)):
        raise ValidationError("correlations must lie in (0, 1)")
    if np.ptp(rhos) > _RHO_TOL:
        raise UnsupportedDesign(
            "Dunnett critical values need equal comparison-arm sizes "
            f"(correlations {rhos.tolist()} differ)")
    return _dunnett_cached(alpha, k, float(rhos[0]), df)


def dunnett_correlations(arm_sizes: Sequence[int]) -> list[float]:
    n1 = arm_sizes[0]
    return [n / (n + n1) for n in arm_sizes[1:]]
