"""Descriptive statistics: means, sample SDs, Shapiro-Wilk tests, correlations.

The Shapiro-Wilk test is the Royston (1995) approximation (Applied Statistics
algorithm R94): polynomial-corrected weights from expected normal order
statistics at ranks (i - 0.375)/(n + 0.25), with a normalizing transform of W
for the p-value. Valid for 3 <= n <= 5000.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .dataset import Dataset

#: Column order of the descriptive-summary table.
SUMMARY_COLUMNS = (
    "revenue",
    "sga",
    "cost_of_revenue",
    "ebitda",
    "stores",
    "us_interest_rate",
    "us_inflation_rate",
    "acsi",
    "long_term_debt",
    "pandemic",
    "sga_over_rev",
    "cor_over_rev",
    "ebitda_over_rev",
    "ltd_over_rev",
)

#: Column order of the full correlation matrix.
CORRELATION_COLUMNS = (
    "year",
    "fail",
    "revenue",
    "cost_of_revenue",
    "sga",
    "ebitda",
    "stores",
    "us_interest_rate",
    "us_inflation_rate",
    "sga_over_rev",
    "cor_over_rev",
    "long_term_debt",
    "ebitda_over_rev",
    "ltd_over_rev",
    "pandemic",
    "acsi",
)


class DegenerateDataError(ValueError):
    """Series too short or too degenerate (zero variance) for the statistic."""


@dataclass(frozen=True)
class ColumnSummary:
    name: str
    mean: float
    std: float
    sw_w: float
    sw_p: float


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    labels: tuple[str, ...]
    r: np.ndarray


def mean_std(series) -> tuple[float, float]:
    """Arithmetic mean and sample standard deviation (n-1 divisor)."""
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise DegenerateDataError("need a 1-d series of length >= 2")
    return float(np.mean(x)), float(np.std(x, ddof=1))


# Royston (1995) polynomial coefficients, ascending powers.
_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_SMALL_N_MU = (0.5440, -0.39978, 0.025054, -0.0006714)
_SMALL_N_LOG_SIGMA = (1.3822, -0.77857, 0.062767, -0.0020322)
_LARGE_N_MU = (-1.5861, -0.31082, -0.083751, 0.0038915)
_LARGE_N_LOG_SIGMA = (-0.4803, -0.082676, 0.0030302)


def _poly(coefficients, x: float) -> float:
    return sum(c * x**k for k, c in enumerate(coefficients))


def _sw_weights(n: int) -> np.ndarray:
    # Expected normal order statistics via the Blom-type approximation, then
    # Royston's corrections to the two extreme weights on each side.
    m = norm.ppf((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    ssm = float(m @ m)
    c = m / math.sqrt(ssm)
    rsn = 1.0 / math.sqrt(n)
    a = np.empty(n)
    if n == 3:
        a[0], a[2] = -math.sqrt(0.5), math.sqrt(0.5)
        a[1] = 0.0
        return a
    a_n = c[-1] + _poly(_C1, rsn)
    if n > 5:
        a_n1 = c[-2] + _poly(_C2, rsn)
        phi = (ssm - 2 * m[-1] ** 2 - 2 * m[-2] ** 2) / (1 - 2 * a_n**2 - 2 * a_n1**2)
        a[2:-2] = m[2:-2] / math.sqrt(phi)
        a[1], a[-2] = -a_n1, a_n1
    else:
        phi = (ssm - 2 * m[-1] ** 2) / (1 - 2 * a_n**2)
        a[1:-1] = m[1:-1] / math.sqrt(phi)
    a[0], a[-1] = -a_n, a_n
    return a


def shapiro_wilk(series) -> tuple[float, float]:
    """Shapiro-Wilk W and p-value for normality, 3 <= n <= 5000."""
    x = np.sort(np.asarray(series, dtype=float))
    n = x.size
    if n < 3 or n > 5000:
        raise DegenerateDataError(f"Shapiro-Wilk requires 3 <= n <= 5000, got {n}")
    if x[-1] - x[0] == 0.0:
        raise DegenerateDataError("Shapiro-Wilk is undefined for a constant series")

    a = _sw_weights(n)
    centered = x - np.mean(x)
    w = float((a @ x) ** 2 / (centered @ centered))
    w = min(w, 1.0)

    if n == 3:
        # Exact small-sample distribution.
        p = 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        return w, min(max(p, 0.0), 1.0)

    y = math.log1p(-w)
    if n <= 11:
        gamma = -2.273 + 0.459 * n
        if y >= gamma:
            return w, 0.0
        y = -math.log(gamma - y)
        mu = _poly(_SMALL_N_MU, n)
        sigma = math.exp(_poly(_SMALL_N_LOG_SIGMA, n))
    else:
        ln_n = math.log(n)
        mu = _poly(_LARGE_N_MU, ln_n)
        sigma = math.exp(_poly(_LARGE_N_LOG_SIGMA, ln_n))
    p = float(norm.sf((y - mu) / sigma))
    return w, p


def pearson_corr(x, y) -> float:
    """Pearson product-moment correlation of two equal-length series."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise DegenerateDataError("need two 1-d series of equal length >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateDataError("correlation is undefined for a zero-variance series")
    return float(dx @ dy) / math.sqrt(sxx * syy)


def correlation_matrix(dataset: Dataset, columns=None) -> CorrelationMatrix:
    """Pairwise Pearson correlations; exactly symmetric with unit diagonal."""
    labels = tuple(columns) if columns is not None else CORRELATION_COLUMNS
    series = [dataset.column(name) for name in labels]
    k = len(labels)
    r = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            r[i, j] = r[j, i] = pearson_corr(series[i], series[j])
    return CorrelationMatrix(labels=labels, r=r)


def describe(dataset: Dataset) -> list[ColumnSummary]:
    """Mean, sample SD, and Shapiro-Wilk test for every summary column."""
    rows = []
    for name in SUMMARY_COLUMNS:
        values = dataset.column(name)
        mean, std = mean_std(values)
        w, p = shapiro_wilk(values)
        rows.append(ColumnSummary(name=name, mean=mean, std=std, sw_w=w, sw_p=p))
    return rows
