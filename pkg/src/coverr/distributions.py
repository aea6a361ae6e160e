"""Sampling families with closed-form mean, sd, skewness and excess kurtosis.

Every draw is an inverse-CDF transform of the Philox uniforms in
:mod:`coverr.philox`, so a (spec, stream) pair fixes the sample exactly.
Lattice families are deliberately absent: the Edgeworth predictions need a
non-lattice (Cramer) distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from coverr.edgeworth import MomentProfile
from coverr.philox import RandomStream, _fill_uniforms_aligned
from coverr.specfun import _norm_quantile

__all__ = ["Family", "DistributionSpec", "RandomStream", "spec", "sample", "PARAM_NAMES"]


class Family(str, Enum):
    NORMAL = "normal"
    EXPONENTIAL = "exponential"
    GAMMA = "gamma"
    UNIFORM = "uniform"
    LOGNORMAL = "lognormal"


# kernel codes
_NORMAL, _EXPONENTIAL, _GAMMA, _UNIFORM, _LOGNORMAL = range(5)
_CODES = {Family.NORMAL: _NORMAL, Family.EXPONENTIAL: _EXPONENTIAL, Family.GAMMA: _GAMMA,
          Family.UNIFORM: _UNIFORM, Family.LOGNORMAL: _LOGNORMAL}

PARAM_NAMES: dict[Family, tuple[str, ...]] = {
    Family.NORMAL: ("mu", "sigma"),
    Family.EXPONENTIAL: ("rate",),
    Family.GAMMA: ("shape", "rate"),
    Family.UNIFORM: ("a", "b"),
    Family.LOGNORMAL: ("mu_log", "sigma_log"),
}

_DEFAULTS: dict[Family, dict[str, float]] = {
    Family.NORMAL: {"mu": 0.0, "sigma": 1.0},
    Family.EXPONENTIAL: {"rate": 1.0},
    Family.GAMMA: {"rate": 1.0},
    Family.UNIFORM: {"a": 0.0, "b": 1.0},
    Family.LOGNORMAL: {"mu_log": 0.0, "sigma_log": 1.0},
}


@dataclass(frozen=True)
class DistributionSpec:
    family: Family
    params: tuple[float, ...]
    mean: float
    sd: float
    moments: MomentProfile

    @property
    def code(self) -> int:
        return _CODES[self.family]

    @property
    def uniforms_per_draw(self) -> int:
        return int(self.params[0]) if self.family is Family.GAMMA else 1

    def param_dict(self) -> dict[str, float]:
        return dict(zip(PARAM_NAMES[self.family], self.params))

    def label(self) -> str:
        """Parameters as ``name=value`` pairs joined by ``;``, e.g. ``shape=4;rate=1``."""
        return ";".join(f"{k}={v:g}" for k, v in self.param_dict().items())


def spec(family: Family | str, **params: float) -> DistributionSpec:
    """Build a :class:`DistributionSpec` from a family name and its parameters.

    >>> spec("gamma", shape=4).moments
    MomentProfile(gamma=1.0, kappa=1.5)
    """
    family = Family(family.lower() if isinstance(family, str) else family)
    names = PARAM_NAMES[family]
    unknown = set(params) - set(names)
    if unknown:
        raise ValueError(f"unknown parameter(s) for {family.value}: {sorted(unknown)}")
    values = {**_DEFAULTS[family], **{k: float(v) for k, v in params.items()}}
    missing = [k for k in names if k not in values]
    if missing:
        raise ValueError(f"{family.value} requires parameter(s) {missing}")
    p = tuple(values[k] for k in names)
    if not all(math.isfinite(v) for v in p):
        raise ValueError("parameters must be finite")

    if family is Family.NORMAL:
        mu, sigma = p
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        return DistributionSpec(family, p, mu, sigma, MomentProfile(0.0, 0.0))
    if family is Family.EXPONENTIAL:
        (rate,) = p
        if rate <= 0:
            raise ValueError("rate must be positive")
        return DistributionSpec(family, p, 1.0 / rate, 1.0 / rate, MomentProfile(2.0, 6.0))
    if family is Family.GAMMA:
        k, rate = p
        if k <= 0 or rate <= 0:
            raise ValueError("shape and rate must be positive")
        if k != int(k):
            raise ValueError("only integer gamma shapes are supported (sum of exponentials)")
        return DistributionSpec(family, p, k / rate, math.sqrt(k) / rate,
                                MomentProfile(2.0 / math.sqrt(k), 6.0 / k))
    if family is Family.UNIFORM:
        a, b = p
        if not a < b:
            raise ValueError("uniform requires a < b")
        return DistributionSpec(family, p, 0.5 * (a + b), (b - a) / math.sqrt(12.0),
                                MomentProfile(0.0, -1.2))
    mu, s = p
    if s <= 0:
        raise ValueError("sigma_log must be positive")
    w = math.exp(s * s)
    mean = math.exp(mu + 0.5 * s * s)
    sd = math.sqrt(math.expm1(s * s)) * mean
    gamma = (w + 2.0) * math.sqrt(math.expm1(s * s))
    kappa = w ** 4 + 2.0 * w ** 3 + 3.0 * w ** 2 - 6.0
    return DistributionSpec(family, p, mean, sd, MomentProfile(gamma, kappa))


@njit(cache=True, nogil=True)
def _transform(code, p0, p1, u, out):
    """Map uniforms ``u`` to draws in ``out``; gamma consumes ``int(p0)`` uniforms per draw."""
    count = out.shape[0]
    if code == _NORMAL:
        for i in range(count):
            out[i] = p0 + p1 * _norm_quantile(u[i])
    elif code == _EXPONENTIAL:
        for i in range(count):
            out[i] = -math.log1p(-u[i]) / p1
    elif code == _GAMMA:
        k = int(p0)
        for i in range(count):
            acc = 0.0
            for j in range(k):
                acc -= math.log1p(-u[i * k + j])
            out[i] = acc / p1
    elif code == _UNIFORM:
        for i in range(count):
            out[i] = p0 + (p1 - p0) * u[i]
    else:
        for i in range(count):
            out[i] = math.exp(p0 + p1 * _norm_quantile(u[i]))


@njit(cache=True, nogil=True)
def _draw(code, p0, p1, k0, k1, u, out):
    _fill_uniforms_aligned(k0, k1, u)
    _transform(code, p0, p1, u, out)


def _kernel_params(d: DistributionSpec) -> tuple[float, float]:
    # exponential keeps its rate in the second slot so gamma and exponential agree
    if d.family is Family.EXPONENTIAL:
        return 1.0, d.params[0]
    return d.params[0], d.params[1]


def sample(d: DistributionSpec, stream: RandomStream, count: int) -> np.ndarray:
    """``count`` draws from ``d`` using the uniforms of ``stream`` from index 0."""
    if count < 1:
        raise ValueError("count must be positive")
    u = np.empty(count * d.uniforms_per_draw, dtype=np.float64)
    out = np.empty(count, dtype=np.float64)
    k0, k1 = stream.key
    p0, p1 = _kernel_params(d)
    _draw(d.code, p0, p1, np.uint64(k0), np.uint64(k1), u, out)
    return out
