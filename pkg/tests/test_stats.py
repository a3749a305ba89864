from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errlens.stats import binomial_p_value, bootstrap_ci, nearest_rank_quantile

from oracles import binomial_tails_exact


def test_k_zero_is_whole_tail():
    assert binomial_p_value(0, 10, 0.3) == 1.0


def test_k_equals_n_single_term():
    assert binomial_p_value(10, 10, 0.5) == pytest.approx(9.765625e-4, rel=1e-12)


def test_direct_summation_case():
    # sum_{i=10..20} C(20,i) 0.28^i 0.72^(20-i), frozen from the exact
    # rational oracle
    expected = float(binomial_tails_exact(20, Fraction(28, 100))[10])
    assert expected == pytest.approx(0.030465362387513448, rel=1e-12)
    assert binomial_p_value(10, 20, 0.28) == pytest.approx(expected, rel=1e-9)


def test_matches_exact_oracle_sampled():
    for n in (1, 7, 50, 113, 200):
        for p0 in (Fraction(1, 10), Fraction(28, 100), Fraction(1, 2)):
            tails = binomial_tails_exact(n, p0)
            for k in range(0, n + 1, max(1, n // 7)):
                got = binomial_p_value(k, n, float(p0))
                assert got == pytest.approx(float(tails[k]), rel=1e-9)


def test_invalid_inputs():
    with pytest.raises(ValueError, match="empty subpopulation"):
        binomial_p_value(0, 0, 0.5)
    with pytest.raises(ValueError):
        binomial_p_value(5, 4, 0.5)
    with pytest.raises(ValueError):
        binomial_p_value(1, 4, 0.0)
    with pytest.raises(ValueError):
        binomial_p_value(1, 4, 1.0)


@settings(max_examples=150, deadline=None)
@given(
    n=st.integers(min_value=1, max_value=300),
    p0=st.floats(min_value=0.01, max_value=0.99),
    data=st.data(),
)
def test_monotone_in_k(n, p0, data):
    k = data.draw(st.integers(min_value=0, max_value=n - 1)) if n > 1 else 0
    if k + 1 > n:
        return
    assert binomial_p_value(k + 1, n, p0) <= binomial_p_value(k, n, p0)


def test_bootstrap_degenerate_inputs():
    assert bootstrap_ci(np.ones(40, dtype=np.uint8), seed=1) == (1.0, 1.0)
    assert bootstrap_ci(np.zeros(40, dtype=np.uint8), seed=1) == (0.0, 0.0)


def test_bootstrap_deterministic_and_ordered():
    flags = np.array([1, 0, 0, 1, 0, 1, 0, 0, 0, 1] * 5, dtype=np.uint8)
    a = bootstrap_ci(flags, B=500, seed=42)
    b = bootstrap_ci(flags, B=500, seed=42)
    c = bootstrap_ci(flags, B=500, seed=43)
    assert a == b
    assert a != c
    assert a[0] <= flags.mean() <= a[1]


def test_bootstrap_rejects_empty():
    with pytest.raises(ValueError, match="empty"):
        bootstrap_ci(np.array([], dtype=np.uint8))


def test_bootstrap_coverage_small():
    # smaller sibling of the acceptance-suite coverage run
    rng = np.random.default_rng(5)
    covered = 0
    trials = 60
    for t in range(trials):
        flags = (rng.random(100) < 0.3).astype(np.uint8)
        if flags.sum() in (0, 100):
            continue
        lo, hi = bootstrap_ci(flags, B=500, seed=t)
        covered += lo <= 0.3 <= hi
    assert covered / trials > 0.85


def test_nearest_rank_quantile_small_cases():
    vals = np.array([1.0, 2.0, 3.0, 4.0])
    assert nearest_rank_quantile(vals, 0.025) == 1.0
    assert nearest_rank_quantile(vals, 0.5) == 2.0
    assert nearest_rank_quantile(vals, 0.975) == 4.0
    assert nearest_rank_quantile(vals, 1.0) == 4.0
