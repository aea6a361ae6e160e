"""Monte Carlo coverage of the t and Norm intervals.

Replicate ``r`` always draws its sample from substream ``r`` of the master
seed, and workers only add up integer hit counts over disjoint replicate
ranges. The result therefore does not depend on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from coverr.distributions import DistributionSpec, _draw, _kernel_params
from coverr.edgeworth import IntervalKind, two_sided_error
from coverr.intervals import _mean_var
from coverr.philox import splitmix64_mix
from coverr.specfun import _norm_quantile, _t_quantile

__all__ = [
    "MIN_REPS",
    "SimulationConfig",
    "SimulationError",
    "CoverageResult",
    "Verdict",
    "worker_partition",
    "run",
    "compare",
]

MIN_REPS = 1000
DEFAULT_Z_TOL = 3.0
DEFAULT_SLACK = 0.3
ALL_KINDS = (IntervalKind.STUDENT_T, IntervalKind.NORM)


class SimulationError(RuntimeError):
    """A simulation could not complete; no partial result is returned."""


@dataclass(frozen=True)
class SimulationConfig:
    spec: DistributionSpec
    n: int
    alpha: float
    reps: int
    master_seed: int
    workers: int = 1
    kinds: tuple[IntervalKind, ...] = field(default=ALL_KINDS)

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if not 0.0 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (0, 0.5), got {self.alpha!r}")
        if int(self.reps) != self.reps or self.reps < MIN_REPS:
            raise ValueError(f"reps must be an integer >= {MIN_REPS}, got {self.reps!r}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ValueError(f"workers must be a positive integer, got {self.workers!r}")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        kinds = tuple(IntervalKind(k) for k in self.kinds)
        if not kinds or len(set(kinds)) != len(kinds):
            raise ValueError("kinds must be a nonempty set of interval kinds")
        object.__setattr__(self, "kinds", tuple(k for k in ALL_KINDS if k in kinds))


@dataclass(frozen=True)
class CoverageResult:
    kind: IntervalKind
    hits: int
    reps: int
    n: int
    alpha: float
    coverage: float
    se: float
    scaled_error: float
    scaled_se: float
    predicted_scaled_error: float

    @classmethod
    def from_counts(cls, kind: IntervalKind, hits: int, reps: int, n: int, alpha: float,
                    predicted_error: float) -> "CoverageResult":
        p = hits / reps
        se = math.sqrt(p * (1.0 - p) / reps)
        return cls(kind=kind, hits=hits, reps=reps, n=n, alpha=alpha, coverage=p, se=se,
                   scaled_error=n * (p - (1.0 - 2.0 * alpha)), scaled_se=n * se,
                   predicted_scaled_error=n * predicted_error)


@dataclass(frozen=True)
class Verdict:
    kind: IntervalKind
    z_score: float
    passed: bool
    z_tol: float
    slack: float


def worker_partition(reps: int, workers: int) -> list[range]:
    """Split ``range(reps)`` into at most ``workers`` contiguous balanced pieces.

    >>> [len(r) for r in worker_partition(10, 3)]
    [4, 3, 3]
    """
    if reps < 1 or workers < 1:
        raise ValueError("reps and workers must be positive")
    parts = min(reps, workers)
    size, extra = divmod(reps, parts)
    out = []
    start = 0
    for i in range(parts):
        stop = start + size + (1 if i < extra else 0)
        out.append(range(start, stop))
        start = stop
    return out


@njit(cache=True, nogil=True)
def _count_hits(code, p0, p1, k0, n, per, lo, hi, mu, q_t, q_z):
    u = np.empty(n * per, dtype=np.float64)
    x = np.empty(n, dtype=np.float64)
    hits_t = 0
    hits_z = 0
    for r in range(lo, hi):
        _draw(code, p0, p1, k0, np.uint64(r), u, x)
        mean, s2 = _mean_var(x)
        sigma2 = s2 * (n - 1) / n
        h = q_t * math.sqrt(s2 / n)
        if mean - h <= mu <= mean + h:
            hits_t += 1
        h = q_z * math.sqrt(sigma2 / n)
        if mean - h <= mu <= mean + h:
            hits_z += 1
    return hits_t, hits_z


def run(config: SimulationConfig) -> list[CoverageResult]:
    """Empirical coverage for each kind in ``config.kinds``, in the order t, Norm."""
    d = config.spec
    n = int(config.n)
    p0, p1 = _kernel_params(d)
    k0 = np.uint64(splitmix64_mix(config.master_seed))
    q_t = _t_quantile(1.0 - config.alpha, n - 1.0)
    q_z = _norm_quantile(1.0 - config.alpha)
    ranges = worker_partition(int(config.reps), int(config.workers))

    def task(rg: range) -> tuple[int, int]:
        return _count_hits(d.code, p0, p1, k0, n, d.uniforms_per_draw,
                           rg.start, rg.stop, d.mean, q_t, q_z)

    try:
        if len(ranges) == 1:
            counts = [task(ranges[0])]
        else:
            with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
                counts = list(pool.map(task, ranges))
    except Exception as exc:  # noqa: BLE001 - any failure voids the whole run
        raise SimulationError(f"simulation failed: {exc}") from exc

    hits = {IntervalKind.STUDENT_T: sum(int(c[0]) for c in counts),
            IntervalKind.NORM: sum(int(c[1]) for c in counts)}
    return [CoverageResult.from_counts(kind, hits[kind], int(config.reps), n, config.alpha,
                                       two_sided_error(config.alpha, n, d.moments, kind))
            for kind in config.kinds]


def compare(result: CoverageResult, z_tol: float = DEFAULT_Z_TOL,
            slack: float = DEFAULT_SLACK) -> Verdict:
    """Check the empirical scaled error against the prediction.

    Passes when ``|scaled_error - predicted| <= z_tol * scaled_se + slack``.
    The slack absorbs the unmodelled higher-order remainder.
    """
    diff = result.scaled_error - result.predicted_scaled_error
    if result.scaled_se > 0:
        z = diff / result.scaled_se
    else:
        z = 0.0 if diff == 0 else math.copysign(math.inf, diff)
    passed = abs(diff) <= z_tol * result.scaled_se + slack
    return Verdict(result.kind, z, passed, z_tol, slack)
