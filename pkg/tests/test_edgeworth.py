import math

import mpmath as mp
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coverr.edgeworth import (
    GAUSSIAN,
    IntervalKind,
    MomentProfile,
    alpha_adjusted,
    entry_coefficients,
    exact_gaussian_norm_coverage,
    one_sided_coverage,
    two_sided_error,
    two_sided_error_norm,
)
from coverr.specfun import norm_cdf, norm_pdf, norm_quantile, t_cdf, t_quantile

T, NORM = IntervalKind.STUDENT_T, IntervalKind.NORM
Z = norm_quantile(0.975)
PHI = norm_pdf(Z)
EXPONENTIAL = MomentProfile(2.0, 6.0)

moments = st.builds(
    lambda g, extra: MomentProfile(g, g * g - 2.0 + extra),
    st.floats(-4, 4), st.floats(0, 30),
)
alphas = st.floats(1e-4, 0.4999)


def by_hand(z):
    """Entry coefficients as written: z(z^2-3)/12, -z(z^4+2z^2-3)/18, -z(z^2+3)/4."""
    return z * (z**2 - 3) / 12, -z * (z**4 + 2 * z**2 - 3) / 18, -z * (z**2 + 3) / 4


class TestMomentProfile:
    def test_gaussian(self):
        assert GAUSSIAN == MomentProfile(0, 0)

    def test_feasibility_bound(self):
        MomentProfile(1.0, -1.0)  # two-point distribution sits on the bound
        with pytest.raises(ValueError):
            MomentProfile(0.0, -2.5)
        with pytest.raises(ValueError):
            MomentProfile(math.nan, 0.0)


class TestOneSided:
    def test_gaussian_lower_tail(self):
        for n in (10, 100, 1000):
            c = one_sided_coverage(0.025, n, GAUSSIAN)
            assert c.value == pytest.approx(0.025 + Z * (Z**2 + 3) * PHI / 4 / n, rel=1e-14)
            assert c.value == pytest.approx(0.025 + 0.195923 / n, abs=1e-6 / n)
            assert not c.out_of_range

    def test_median_level(self):
        assert one_sided_coverage(0.5, 30, GAUSSIAN).value == 0.5
        # skewness alone shifts the median bound at order n^-1/2
        c = one_sided_coverage(0.5, 100, MomentProfile(1.0, 0.0))
        assert c.value == pytest.approx(0.5 - 0.1 * norm_pdf(0.0) / 6, rel=1e-14)

    def test_large_n(self):
        assert one_sided_coverage(0.025, 1e14, EXPONENTIAL).value == pytest.approx(0.025, abs=1e-7)

    def test_unclamped_with_flag(self):
        c = one_sided_coverage(0.001, 2, MomentProfile(8.0, 100.0))
        assert c.out_of_range
        assert not 0.0 <= c.value <= 1.0

    @pytest.mark.parametrize("alpha", [0.01, 0.025, 0.1, 0.9, 0.975])
    def test_gaussian_against_exact_t(self, alpha):
        # Gaussian data: P(mu <= mean + sigma_hat z / sqrt(n)) = F_{n-1}(z sqrt((n-1)/n))
        n = 20000
        z = norm_quantile(alpha)
        exact = t_cdf(z * math.sqrt((n - 1) / n), n - 1)
        expected = n * (one_sided_coverage(alpha, n, GAUSSIAN).value - alpha)
        assert n * (exact - alpha) == pytest.approx(expected, rel=2e-3, abs=1e-6)

    @pytest.mark.parametrize("bad", [0.0, 1.0, -1.0])
    def test_rejects_alpha(self, bad):
        with pytest.raises(ValueError):
            one_sided_coverage(bad, 10, GAUSSIAN)


class TestTwoSidedNorm:
    def test_gaussian_value(self):
        assert two_sided_error_norm(0.025, 1000, GAUSSIAN) == pytest.approx(-3.918e-4, abs=1e-7)
        assert two_sided_error_norm(0.025, 1000, GAUSSIAN) == pytest.approx(
            -Z * (Z**2 + 3) * PHI / 2000, rel=1e-14)

    def test_exponential_value(self):
        # 2 phi(z)/n * (a_k * 6 + a_g2 * 4 + a_0)
        a_k, a_g, a_0 = by_hand(Z)
        expected = 2 * PHI / 1000 * (6 * a_k + 4 * a_g + a_0)
        assert two_sided_error_norm(0.025, 1000, EXPONENTIAL) == pytest.approx(expected, rel=1e-13)
        assert two_sided_error_norm(0.025, 1000, EXPONENTIAL) == pytest.approx(-1.2852e-3, abs=1e-7)

    @given(alphas, st.sampled_from([10, 100, 1000]), moments)
    def test_composition_identity(self, alpha, n, m):
        composed = (one_sided_coverage(1 - alpha, n, m).value
                    - one_sided_coverage(alpha, n, m).value - (1 - 2 * alpha))
        assert two_sided_error_norm(alpha, n, m) == pytest.approx(composed, abs=1e-14)

    def test_rejects_upper_alpha(self):
        with pytest.raises(ValueError):
            two_sided_error_norm(0.5, 10, GAUSSIAN)


class TestEntries:
    def test_published_rounding(self):
        norm = entry_coefficients(0.025, NORM)
        t = entry_coefficients(0.025, T)
        assert norm.rounded(2) == (0.14, -2.12, -3.35)
        assert t.rounded(2) == (0.14, -2.12, 0.0)
        assert norm.render() == "0.14κ −2.12γ² −3.35"
        assert t.render() == "0.14κ −2.12γ²"

    def test_unrounded(self):
        assert entry_coefficients(0.025, NORM).a_kappa == pytest.approx(0.137436, abs=1e-6)
        assert entry_coefficients(0.025, NORM).a_gamma2 == pytest.approx(-2.116731, abs=1e-6)
        assert entry_coefficients(0.025, NORM).a_0 == pytest.approx(-3.352253, abs=1e-6)

    @given(alphas)
    def test_coefficients_match_closed_form(self, alpha):
        z = norm_quantile(1 - alpha)
        e = entry_coefficients(alpha, NORM)
        assert (e.a_kappa, e.a_gamma2, e.a_0) == pytest.approx(by_hand(z), rel=1e-13, abs=1e-15)

    @given(alphas)
    def test_shared_coefficients_and_intercept_gap(self, alpha):
        norm = entry_coefficients(alpha, NORM)
        t = entry_coefficients(alpha, T)
        assert norm.a_kappa == t.a_kappa
        assert norm.a_gamma2 == t.a_gamma2
        assert t.a_0 == 0.0
        z = norm_quantile(1 - alpha)
        assert norm.a_0 - t.a_0 == pytest.approx(-z * (z * z + 3) / 4, rel=1e-14)

    def test_intercept_gap_from_alpha_prime(self):
        # 2(alpha - alpha') scaled by n / (2 phi) reproduces the Norm intercept
        n = 500
        gap = 2 * (0.025 - alpha_adjusted(0.025, n)) * n / (2 * PHI)
        assert -gap == pytest.approx(entry_coefficients(0.025, NORM).a_0, rel=1e-13)

    def test_other_alpha(self):
        z = norm_quantile(0.75)
        e = entry_coefficients(0.25, NORM)
        assert (e.a_kappa, e.a_gamma2, e.a_0) == pytest.approx(by_hand(z), rel=1e-14)

    def test_rejects(self):
        with pytest.raises(ValueError):
            entry_coefficients(0.6, T)


class TestTwoSided:
    def test_zero_for_gaussian_t(self):
        for alpha in (0.005, 0.025, 0.05, 0.3):
            for n in (2, 10, 1e6):
                assert two_sided_error(alpha, n, GAUSSIAN, T) == 0.0

    def test_exponential_t(self):
        entry = entry_coefficients(0.025, T).value(EXPONENTIAL)
        assert entry == pytest.approx(-7.6423, abs=1e-4)
        assert two_sided_error(0.025, 1000, EXPONENTIAL, T) == pytest.approx(-8.933e-4, abs=1e-7)

    @given(alphas, st.floats(2, 1e6), moments)
    def test_norm_kind_matches_direct_formula(self, alpha, n, m):
        assert two_sided_error(alpha, n, m, NORM) == pytest.approx(
            two_sided_error_norm(alpha, n, m), rel=1e-12, abs=1e-300)

    @given(alphas, st.floats(2, 1e6), moments)
    def test_kinds_differ_by_gaussian_norm_error(self, alpha, n, m):
        gap = two_sided_error(alpha, n, m, NORM) - two_sided_error(alpha, n, m, T)
        assert gap == pytest.approx(two_sided_error_norm(alpha, n, GAUSSIAN), rel=1e-9, abs=1e-15)


class TestAlphaAdjusted:
    def test_examples(self):
        assert alpha_adjusted(0.025, 100) == pytest.approx(0.025 - Z * (Z**2 + 3) * PHI / 400, rel=1e-14)
        assert alpha_adjusted(0.025, 100) == pytest.approx(0.0230408, abs=1e-7)
        assert alpha_adjusted(0.5, 37) == 0.5
        assert alpha_adjusted(0.025, 1e15) == pytest.approx(0.025, abs=1e-14)

    @given(st.floats(1e-3, 0.4999), st.floats(100, 1e6))
    def test_shrinks_lower_tail(self, alpha, n):
        assert alpha_adjusted(alpha, n) < alpha

    def test_scaled_shift_is_constant(self):
        shifts = [n * (0.025 - alpha_adjusted(0.025, n)) for n in (10, 100, 1000, 1e5)]
        assert max(shifts) - min(shifts) < 1e-12

    @pytest.mark.parametrize("alpha", [0.005, 0.025, 0.1])
    def test_against_exact_quantile_match(self, alpha):
        # exact alpha'' solves sigma_hat z_{alpha''} = s t^{alpha}_{(n-1)}
        n = 20000
        exact = norm_cdf(math.sqrt(n / (n - 1)) * t_quantile(alpha, n - 1))
        assert n * (exact - alpha) == pytest.approx(n * (alpha_adjusted(alpha, n) - alpha), rel=1e-3)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            alpha_adjusted(1e-5, 2)


class TestExactGaussianOracle:
    def test_large_n(self):
        assert exact_gaussian_norm_coverage(0.025, 1e8) == pytest.approx(0.95, abs=1e-8)

    def test_n1000(self):
        assert exact_gaussian_norm_coverage(0.025, 1000) == pytest.approx(0.95 - 3.92e-4, abs=1e-5)

    def test_n10_direct(self):
        assert exact_gaussian_norm_coverage(0.025, 10) == pytest.approx(
            2 * t_cdf(Z * math.sqrt(0.9), 9) - 1, abs=1e-15)

    def test_n10_mpmath(self):
        mp.mp.dps = 30
        x = mp.mpf(Z) * mp.sqrt(mp.mpf(9) / 10)
        tail = mp.betainc(mp.mpf(9) / 2, mp.mpf(1) / 2, 0, 9 / (9 + x * x), regularized=True) / 2
        assert exact_gaussian_norm_coverage(0.025, 10) == pytest.approx(float(1 - 2 * tail), abs=1e-14)

    def test_scaled_limit(self):
        limit = -Z * (Z**2 + 3) * PHI / 2
        assert limit == pytest.approx(-0.39185, abs=1e-5)
        scaled = [n * (exact_gaussian_norm_coverage(0.025, n) - 0.95) for n in (250, 500, 1000, 2000)]
        gaps = [abs(s - limit) for s in scaled]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] <= 0.05 * abs(limit)
        # gaps shrink like 1/n
        assert gaps[0] / gaps[-1] == pytest.approx(8.0, rel=0.05)

    def test_agrees_with_expansion(self):
        n = 1000
        diff = exact_gaussian_norm_coverage(0.025, n) - 0.95 - two_sided_error_norm(0.025, n, GAUSSIAN)
        assert abs(diff) < 5.0 / n**2
