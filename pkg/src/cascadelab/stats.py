"""Statistical plumbing: chi-square checks, proportion tests, difference CIs.

Pure wrappers over scipy.stats, centralized so every suite uses the same
documented procedures.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import beta, chi2_contingency, chisquare, norm

from .errors import ConfigurationError, DomainError


def uniform_chi_square(counts) -> tuple[float, float]:
    """Goodness-of-fit of observed category counts against the uniform law."""
    stat, p = chisquare(np.asarray(counts))
    return float(stat), float(p)


def homogeneity_chi_square(counts_a, counts_b) -> tuple[float, float]:
    """Two-sample test that two count vectors come from the same distribution."""
    pair = np.vstack([np.asarray(counts_a), np.asarray(counts_b)])
    pair = pair[:, pair.sum(axis=0) > 0]
    stat, p, _, _ = chi2_contingency(pair)
    return float(stat), float(p)


def independence_chi_square(joint_counts) -> tuple[float, float]:
    """Test of independence on a two-dimensional contingency table."""
    table = np.asarray(joint_counts)
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    stat, p, _, _ = chi2_contingency(table)
    return float(stat), float(p)


def two_proportion_z(successes1: int, successes2: int, trials: int) -> tuple[float, float]:
    """Pooled z-test for equality of two proportions on equal sample sizes."""
    if trials <= 0:
        raise DomainError("trials must be positive")
    p1 = successes1 / trials
    p2 = successes2 / trials
    pooled = (successes1 + successes2) / (2 * trials)
    variance = pooled * (1.0 - pooled) * (2.0 / trials)
    if variance == 0.0:
        return 0.0, 1.0
    z = (p1 - p2) / math.sqrt(variance)
    return z, float(2.0 * norm.sf(abs(z)))


def proportion_std_err(successes: int, trials: int) -> float:
    p = successes / trials
    return math.sqrt(p * (1.0 - p) / trials)


def diff_std_err(successes1: int, successes2: int, trials: int) -> float:
    """Standard error of the difference of two independent proportions."""
    p1 = successes1 / trials
    p2 = successes2 / trials
    return math.sqrt(p1 * (1.0 - p1) / trials + p2 * (1.0 - p2) / trials)


def z_quantile(level: float) -> float:
    return float(norm.ppf(0.5 + level / 2.0))


def clopper_pearson(successes: int, trials: int, alpha: float) -> tuple[float, float]:
    """Exact (beta-quantile) two-sided 1 - alpha interval for one proportion."""
    if not 0 <= successes <= trials or trials <= 0:
        raise DomainError("need 0 <= successes <= trials, trials > 0")
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError("alpha must lie in (0, 1)")
    lo = 0.0 if successes == 0 else float(beta.ppf(alpha / 2, successes, trials - successes + 1))
    hi = 1.0 if successes == trials else float(beta.ppf(1 - alpha / 2, successes + 1, trials - successes))
    return lo, hi
