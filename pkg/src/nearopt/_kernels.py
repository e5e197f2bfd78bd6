"""Compiled per-sample allocation kernels.

Each sample row holds one integer ``value`` per arm. For binary outcomes
that is the success count m_t; for bivariate outcomes it is the arm's
welfare total scaled to an integer. Arm means are compared exactly as
``value[t] * scale[t]``, where ``scale[t] = D / n_t`` for a common
denominator D.

Allocations are tallied as integers: an arm sharing a tie among k arms
receives ``unit // k`` where ``unit`` is divisible by every possible k.
"""

import numpy as np
from numba import njit

ES = 0
TEST = 1


@njit(cache=True)
def _significant(t, values, sizes, var, crit):
    """tau_t > crit for the pooled-variance t statistic of arm t vs arm 0.

    Evaluated as d**2 > crit**2 * var * (n_t + n_0) * n_t * n_0 with the
    integer contrast d = m_t * n_0 - m_0 * n_t, which is tau > crit
    multiplied through by (n_t * n_0)**2. Zero variance gives tau = +-inf or 0.
    An infinite critical value never rejects.
    """
    if crit == np.inf:
        return False
    n0 = sizes[0]
    nt = sizes[t]
    diff = values[t] * n0 - values[0] * nt
    if diff <= 0:
        return False
    if var == 0.0:
        return True
    d = float(diff)
    return d * d > crit * crit * var * float(nt + n0) * float(nt) * float(n0)


@njit(cache=True)
def _alloc(rule, values, sizes, scale, crit, df, unit, out):
    L = values.shape[0]
    for t in range(L):
        out[t] = 0
    if rule == ES:
        best = values[0] * scale[0]
        k = 1
        for t in range(1, L):
            v = values[t] * scale[t]
            if v > best:
                best = v
                k = 1
            elif v == best:
                k += 1
        share = unit // k
        for t in range(L):
            if values[t] * scale[t] == best:
                out[t] = share
        return

    # hypothesis test against arm 0
    ssq = 0.0
    for t in range(L):
        ssq += values[t] * (sizes[t] - values[t]) / sizes[t]
    var = ssq / df
    found = False
    best = 0
    k = 0
    sig = 0  # bitmask of significant arms
    for t in range(1, L):
        if _significant(t, values, sizes, var, crit):
            sig |= 1 << t
            v = values[t] * scale[t]
            if not found or v > best:
                best = v
                k = 1
                found = True
            elif v == best:
                k += 1
    if not found:
        out[0] = unit
        return
    share = unit // k
    for t in range(1, L):
        if (sig >> t) & 1 and values[t] * scale[t] == best:
            out[t] = share


@njit(cache=True)
def allocate_batch(rule, values, sizes, scale, crit, df, unit):
    S, L = values.shape
    out = np.zeros((S, L), dtype=np.int64)
    row = np.zeros(L, dtype=np.int64)
    for s in range(S):
        _alloc(rule, values[s], sizes, scale, crit, df, unit, row)
        for t in range(L):
            out[s, t] = row[t]
    return out


@njit(cache=True)
def accumulate_weighted(rule, values, weights, sizes, scale, crit, df, unit, sums, cross):
    """Add weighted allocations (as fractions of ``unit``) to sums and cross."""
    S, L = values.shape
    row = np.zeros(L, dtype=np.int64)
    frac = np.zeros(L)
    for s in range(S):
        w = weights[s]
        if w == 0.0:
            continue
        _alloc(rule, values[s], sizes, scale, crit, df, unit, row)
        for t in range(L):
            frac[t] = row[t] / unit
        for t in range(L):
            if frac[t] != 0.0:
                sums[t] += w * frac[t]
                for r in range(L):
                    cross[t, r] += w * frac[t] * frac[r]


@njit(cache=True)
def guide_table(cdf, sizes, width):
    """guide[t, j] = smallest m with cdf[t, m] > j / width."""
    L = cdf.shape[0]
    guide = np.zeros((L, width), dtype=np.int64)
    for t in range(L):
        m = 0
        for j in range(width):
            level = j / width
            while m < sizes[t] and cdf[t, m] <= level:
                m += 1
            guide[t, j] = m
    return guide


@njit(cache=True)
def _inverse_cdf(u, cdf_row, guide_row, n):
    # smallest m with cdf[m] > u, starting from the guide bucket
    m = guide_row[int(u * guide_row.shape[0])]
    while m < n and cdf_row[m] <= u:
        m += 1
    return m


@njit(cache=True)
def simulate_binary(rule, u, cdf, guide, sizes, scale, crit, df, unit, tally, cross):
    """Draw binomial counts by inversion of ``u`` and tally allocations.

    ``tally`` accumulates integer shares of ``unit``; ``cross`` accumulates
    the products of per-sample fractional allocations.
    """
    S, L = u.shape
    values = np.zeros(L, dtype=np.int64)
    row = np.zeros(L, dtype=np.int64)
    for s in range(S):
        for t in range(L):
            values[t] = _inverse_cdf(u[s, t], cdf[t], guide[t], sizes[t])
        _alloc(rule, values, sizes, scale, crit, df, unit, row)
        for t in range(L):
            if row[t] != 0:
                tally[t] += row[t]
                ft = row[t] / unit
                for r in range(L):
                    if row[r] != 0:
                        cross[t, r] += ft * (row[r] / unit)


@njit(cache=True)
def tally_values(rule, values, sizes, scale, crit, df, unit, tally, cross):
    S, L = values.shape
    row = np.zeros(L, dtype=np.int64)
    for s in range(S):
        _alloc(rule, values[s], sizes, scale, crit, df, unit, row)
        for t in range(L):
            if row[t] != 0:
                tally[t] += row[t]
                ft = row[t] / unit
                for r in range(L):
                    if row[r] != 0:
                        cross[t, r] += ft * (row[r] / unit)


@njit(cache=True)
def _two_arm_var(m1, m2, n1, n2, df):
    return (m1 * (n1 - m1) / n1 + m2 * (n2 - m2) / n2) / df


@njit(cache=True)
def two_arm_thresholds(sizes, crit, df, thresholds):
    """Per m2, the number of m1 values in the rejection region.

    Returns False if some rejection set {m1 : tau > crit} is not a prefix
    {0, ..., thr - 1}; the thresholds are then meaningless.
    """
    n1 = sizes[0]
    n2 = sizes[1]
    values = np.zeros(2, dtype=np.int64)
    ok = True
    for m2 in range(n2 + 1):
        values[1] = m2
        thr = 0
        accepted = False
        for m1 in range(n1 + 1):
            values[0] = m1
            var = _two_arm_var(m1, m2, n1, n2, df)
            if _significant(1, values, sizes, var, crit):
                if accepted:
                    ok = False
                thr = m1 + 1
            else:
                accepted = True
        thresholds[m2] = thr
    return ok


@njit(cache=True)
def two_arm_rejection_matrix(sizes, crit, df):
    n1 = sizes[0]
    n2 = sizes[1]
    out = np.zeros((n1 + 1, n2 + 1), dtype=np.bool_)
    values = np.zeros(2, dtype=np.int64)
    for m1 in range(n1 + 1):
        values[0] = m1
        for m2 in range(n2 + 1):
            values[1] = m2
            var = _two_arm_var(m1, m2, n1, n2, df)
            out[m1, m2] = _significant(1, values, sizes, var, crit)
    return out
