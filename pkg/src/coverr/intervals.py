"""Sample statistics and the two symmetric intervals for a mean."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from coverr.edgeworth import IntervalKind
from coverr.specfun import _norm_quantile, _t_quantile

__all__ = ["SampleStats", "Interval", "sample_stats", "t_interval", "norm_interval", "covers"]


@dataclass(frozen=True)
class SampleStats:
    n: int
    mean: float
    s2: float
    sigma2_mle: float


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    kind: IntervalKind
    alpha: float

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.hi - self.lo)


@njit(cache=True, nogil=True)
def _mean_var(x):
    """Mean and unbiased variance in one pass, shifted by the first value."""
    n = x.shape[0]
    shift = x[0]
    s1 = 0.0
    s2 = 0.0
    for i in range(n):
        d = x[i] - shift
        s1 += d
        s2 += d * d
    ss = s2 - s1 * s1 / n
    if ss < 0.0:
        ss = 0.0
    return shift + s1 / n, ss / (n - 1)


def sample_stats(data: Sequence[float] | np.ndarray) -> SampleStats:
    x = np.ascontiguousarray(data, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("data must be one-dimensional")
    n = x.shape[0]
    if n < 2:
        raise ValueError(f"need at least 2 observations, got {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("data contains non-finite values")
    mean, s2 = _mean_var(x)
    return SampleStats(n=n, mean=mean, s2=s2, sigma2_mle=s2 * (n - 1) / n)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 0.5:
        raise ValueError(f"alpha must lie in (0, 0.5), got {alpha!r}")
    return alpha


def t_interval(stats: SampleStats, alpha: float) -> Interval:
    """``mean ± t^{1-alpha}_{(n-1)} s / sqrt(n)``, nominal coverage 1 - 2 alpha."""
    alpha = _check_alpha(alpha)
    half = _t_quantile(1.0 - alpha, stats.n - 1.0) * math.sqrt(stats.s2 / stats.n)
    return Interval(stats.mean - half, stats.mean + half, IntervalKind.STUDENT_T, alpha)


def norm_interval(stats: SampleStats, alpha: float) -> Interval:
    """``mean ± z_{1-alpha} sigma_hat / sqrt(n)`` with the MLE variance."""
    alpha = _check_alpha(alpha)
    half = _norm_quantile(1.0 - alpha) * math.sqrt(stats.sigma2_mle / stats.n)
    return Interval(stats.mean - half, stats.mean + half, IntervalKind.NORM, alpha)


def covers(iv: Interval, mu: float) -> bool:
    # closed interval: an endpoint equal to mu counts as covered
    return iv.lo <= mu <= iv.hi
