"""Asymptotic coverage error of the t and Norm intervals for a mean.

With ``z = z_{1-alpha}`` the two-sided coverage error of either interval is

    (2 * phi(z) / n) * (a_kappa * kappa + a_gamma2 * gamma**2 + a_0) + O(n**-1.5)

where ``a_kappa`` and ``a_gamma2`` are shared by both intervals and only the
intercept ``a_0`` differs: ``-z (z**2 + 3) / 4`` for Norm, zero for Student t.
``gamma`` is the skewness and ``kappa`` the excess kurtosis of the data.

The expansions assume the usual Edgeworth regularity conditions, namely
enough finite moments and Cramer's condition on the characteristic function.
They are not checked here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from coverr.specfun import _norm_pdf, _norm_quantile, _t_tail

__all__ = [
    "IntervalKind",
    "MomentProfile",
    "GAUSSIAN",
    "ErrorEntry",
    "CoverageApprox",
    "one_sided_coverage",
    "two_sided_error_norm",
    "entry_coefficients",
    "two_sided_error",
    "alpha_adjusted",
    "exact_gaussian_norm_coverage",
]


class IntervalKind(str, Enum):
    STUDENT_T = "StudentT"
    NORM = "Norm"

    @classmethod
    def parse(cls, name: str) -> "IntervalKind":
        key = name.strip().lower().replace("-", "").replace("_", "")
        aliases = {"t": cls.STUDENT_T, "studentt": cls.STUDENT_T, "student": cls.STUDENT_T,
                   "norm": cls.NORM, "normal": cls.NORM, "z": cls.NORM}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown interval kind {name!r}; use 't' or 'norm'") from None


@dataclass(frozen=True)
class MomentProfile:
    """Skewness ``gamma`` and excess kurtosis ``kappa`` (zero for Gaussian data)."""

    gamma: float
    kappa: float

    def __post_init__(self) -> None:
        g, k = float(self.gamma), float(self.kappa)
        if not (math.isfinite(g) and math.isfinite(k)):
            raise ValueError("moments must be finite")
        # Pearson's inequality; equality holds for two-point distributions.
        if k < g * g - 2.0 - 1e-12 * max(1.0, g * g):
            raise ValueError(f"infeasible moments: kappa={k} < gamma**2 - 2 = {g * g - 2.0}")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "kappa", k)


GAUSSIAN = MomentProfile(0.0, 0.0)


@dataclass(frozen=True)
class ErrorEntry:
    """Table entry ``a_kappa * kappa + a_gamma2 * gamma**2 + a_0`` for one
    interval kind at one-sided level ``alpha``."""

    a_kappa: float
    a_gamma2: float
    a_0: float
    alpha: float
    kind: IntervalKind

    def value(self, m: MomentProfile) -> float:
        return self.a_kappa * m.kappa + self.a_gamma2 * m.gamma ** 2 + self.a_0

    def rounded(self, digits: int = 2) -> tuple[float, float, float]:
        return (round(self.a_kappa, digits), round(self.a_gamma2, digits), round(self.a_0, digits))

    def render(self, digits: int = 2) -> str:
        """Human form such as ``0.14κ −2.12γ² −3.35``; a zero intercept is omitted."""
        a_k, a_g, a_0 = self.rounded(digits)

        def num(v: float) -> str:
            return f"{abs(v):.{digits}f}"

        parts = [("−" if a_k < 0 else "") + num(a_k) + "κ",
                 ("−" if a_g < 0 else "+") + num(a_g) + "γ²"]
        if a_0 != 0.0:
            parts.append(("−" if a_0 < 0 else "+") + num(a_0))
        return " ".join(parts)


class CoverageApprox(NamedTuple):
    """An asymptotic probability; it is not clamped, so ``out_of_range`` flags
    values the truncated expansion has pushed outside [0, 1]."""

    value: float
    out_of_range: bool


def _alpha(alpha: float, upper: float = 1.0) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < upper:
        raise ValueError(f"alpha must lie in (0, {upper:g}), got {alpha!r}")
    return alpha


def _sample_size(n: float) -> float:
    n = float(n)
    if not (n >= 2.0) or math.isnan(n):
        raise ValueError(f"sample size must be at least 2, got {n!r}")
    return n


def one_sided_coverage(alpha: float, n: float, m: MomentProfile) -> CoverageApprox:
    """Coverage of the one-sided Norm bound ``(-inf, mean + sigma_hat z_alpha / sqrt(n)]``
    to order 1/n."""
    alpha = _alpha(alpha)
    n = _sample_size(n)
    z = _norm_quantile(alpha)
    z2 = z * z
    phi = _norm_pdf(z)
    g, k = m.gamma, m.kappa
    half = -g * (2.0 * z2 + 1.0) * phi / 6.0
    first = z * (k * (z2 - 3.0) / 12.0
                 - g * g * (z2 * z2 + 2.0 * z2 - 3.0) / 18.0
                 - (z2 + 3.0) / 4.0) * phi
    value = alpha + half / math.sqrt(n) + first / n
    return CoverageApprox(value, not 0.0 <= value <= 1.0)


def two_sided_error_norm(alpha: float, n: float, m: MomentProfile) -> float:
    """Coverage error of ``mean ± z_{1-alpha} sigma_hat / sqrt(n)`` to order 1/n.

    The skewness terms of order n**-1/2 cancel between the two tails.
    """
    alpha = _alpha(alpha, 0.5)
    n = _sample_size(n)
    z = _norm_quantile(1.0 - alpha)
    z2 = z * z
    bracket = (m.kappa * (z2 - 3.0) / 12.0
               - m.gamma ** 2 * (z2 * z2 + 2.0 * z2 - 3.0) / 18.0
               - (z2 + 3.0) / 4.0)
    return 2.0 * z / n * bracket * _norm_pdf(z)


def entry_coefficients(alpha: float, kind: IntervalKind) -> ErrorEntry:
    """Coefficients of the table entry at one-sided level ``alpha``.

    The Student t interval has the Norm coefficients for kappa and gamma**2;
    its intercept vanishes because the wider t quantile and the unbiased
    variance lift the level from alpha to ``alpha_adjusted``, which offsets
    the Norm intercept exactly at order 1/n.
    """
    alpha = _alpha(alpha, 0.5)
    kind = IntervalKind(kind)
    z = _norm_quantile(1.0 - alpha)
    z2 = z * z
    a_kappa = z * (z2 - 3.0) / 12.0
    a_gamma2 = -z * (z2 * z2 + 2.0 * z2 - 3.0) / 18.0
    a_0 = -z * (z2 + 3.0) / 4.0 if kind is IntervalKind.NORM else 0.0
    return ErrorEntry(a_kappa, a_gamma2, a_0, alpha, kind)


def two_sided_error(alpha: float, n: float, m: MomentProfile, kind: IntervalKind) -> float:
    """Predicted coverage error ``(2 phi(z_{1-alpha}) / n) * entry``."""
    entry = entry_coefficients(alpha, kind)
    n = _sample_size(n)
    z = _norm_quantile(1.0 - entry.alpha)
    return 2.0 * _norm_pdf(z) / n * entry.value(m)


def alpha_adjusted(alpha: float, n: float) -> float:
    """Gaussian tail level ``alpha'`` with ``s t^{alpha}_{(n-1)} = sigma_hat z_{alpha'}``
    to order 1/n."""
    alpha = _alpha(alpha)
    n = _sample_size(n)
    z = _norm_quantile(alpha)
    out = alpha + (z ** 3 + 3.0 * z) * _norm_pdf(z) / (4.0 * n)
    if not 0.0 < out < 1.0:
        raise ValueError(f"adjusted level {out!r} fell outside (0, 1); n={n:g} is too small")
    return out


def exact_gaussian_norm_coverage(alpha: float, n: float) -> float:
    """Exact two-sided coverage of the Norm interval for Gaussian data.

    The studentized mean is exactly t(n-1), and ``sigma_hat = s sqrt((n-1)/n)``,
    so coverage is ``P(|T_{n-1}| <= z_{1-alpha} sqrt((n-1)/n))``.
    """
    alpha = _alpha(alpha, 0.5)
    n = _sample_size(n)
    z = _norm_quantile(1.0 - alpha)
    return 1.0 - 2.0 * _t_tail(z * math.sqrt((n - 1.0) / n), n - 1.0)
