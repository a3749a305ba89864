"""Significance machinery: exact binomial tail test and percentile bootstrap.

The test asks how surprising a subpopulation's error count is under the
whole-test-set error rate: one-sided P[X >= k] for X ~ Binomial(n, p0),
summed in log space so small tails stay accurate.
"""

from __future__ import annotations

import math

import numpy as np

from errlens import kernels

__all__ = ["binomial_p_value", "bootstrap_ci", "nearest_rank_quantile"]


def _log_binom_pmf(k: int, n: int, log_p: float, log_q: float) -> float:
    return (
        math.lgamma(n + 1)
        - math.lgamma(k + 1)
        - math.lgamma(n - k + 1)
        + k * log_p
        + (n - k) * log_q
    )


def binomial_p_value(k: int, n: int, p0: float) -> float:
    """One-sided exact tail P[X >= k | X ~ Binomial(n, p0)].

    Terms are accumulated with a running log-sum-exp anchored at the largest
    term, so the result is accurate even deep in the tail.
    """
    if n <= 0:
        raise ValueError("empty subpopulation")
    if not (0 <= k <= n):
        raise ValueError(f"k must be in [0, {n}], got {k}")
    if not (0.0 < p0 < 1.0):
        raise ValueError(f"p0 must be in (0, 1), got {p0}")
    if k == 0:
        return 1.0

    log_p = math.log(p0)
    log_q = math.log1p(-p0)
    log_terms = [_log_binom_pmf(i, n, log_p, log_q) for i in range(k, n + 1)]
    anchor = max(log_terms)
    total = sum(math.exp(t - anchor) for t in log_terms)
    return min(1.0, math.exp(anchor + math.log(total)))


def nearest_rank_quantile(sorted_values: np.ndarray, q: float) -> float:
    """Nearest-rank quantile of an ascending array (rank = ceil(q*n))."""
    n = sorted_values.shape[0]
    rank = math.ceil(q * n - 1e-9)
    rank = min(max(rank, 1), n)
    return float(sorted_values[rank - 1])


def bootstrap_ci(
    error_flags: np.ndarray,
    B: int = 1000,
    alpha: float = 0.05,
    seed: int | np.random.SeedSequence = 0,
) -> tuple[float, float]:
    """Percentile bootstrap CI for the mean of a 0/1 vector.

    Draws B resamples of size n with replacement and takes the alpha/2 and
    1 - alpha/2 empirical quantiles (nearest rank) of the resample means.
    Deterministic for a given seed.
    """
    flags = np.asarray(error_flags, dtype=np.uint8)
    n = flags.shape[0]
    if n == 0:
        raise ValueError("empty subpopulation")
    total = int(flags.sum())
    if total == 0:
        return (0.0, 0.0)
    if total == n:
        return (1.0, 1.0)

    rng = np.random.Generator(np.random.PCG64(seed))
    idx = rng.integers(0, n, size=(B, n), dtype=np.int64).astype(np.int32)
    means = np.sort(kernels.bootstrap_means(flags, idx))
    lo = nearest_rank_quantile(means, alpha / 2.0)
    hi = nearest_rank_quantile(means, 1.0 - alpha / 2.0)
    return (lo, hi)
