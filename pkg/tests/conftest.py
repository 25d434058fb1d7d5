import math

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def ks_threshold(n: int, alpha: float = 1e-3) -> float:
    """Two-sided Kolmogorov-Smirnov rejection bound."""
    return math.sqrt(-0.5 * math.log(alpha / 2.0)) / math.sqrt(n)


def ks_statistic(draws: np.ndarray, cdf) -> float:
    """Max deviation between the empirical CDF of draws and a reference CDF."""
    x = np.sort(np.asarray(draws, dtype=float))
    n = x.size
    ref = np.asarray(cdf(x), dtype=float)
    upper = np.abs(np.arange(1, n + 1) / n - ref).max()
    lower = np.abs(ref - np.arange(0, n) / n).max()
    return float(max(upper, lower))
