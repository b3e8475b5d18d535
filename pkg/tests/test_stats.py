import itertools
import math

import numpy as np
import pytest
from scipy.special import ndtr, ndtri

from fanosteer.bounds import CorrelationStats, DetectorGeometry, steering_certificate
from fanosteer.entropy import JointDistribution, binary_entropy
from fanosteer.stats import (
    ORDERING_GENERAL,
    ORDERING_IDENTITY,
    ORDERING_REVERSED,
    agreement_best_ordering,
    agreement_identity,
    agreement_reversed,
    contour_grid,
    domain_probability_from_fit,
    effective_domain,
    hedge_min_domain,
    lhs_std,
)

ETA_X, ETA_K = 0.694, 0.751
RHS_BITS = 8.284
N_BAR = 256


def random_joint(rng, n):
    m = rng.random((n, n)) ** 2
    m /= m.sum()
    return JointDistribution(m, 1.0, 1.0)


def binned_gaussian(n_bins, sigma_bins, center=None):
    center = (n_bins - 1) / 2 if center is None else center
    edges = np.arange(n_bins + 1) - 0.5
    return np.diff(ndtr((edges - center) / sigma_bins))


def steering_lhs_closed_form(eta_x, eta_k, mu_x, mu_k, n_bar):
    """Oracle: the five-term bound evaluated directly."""
    px, pk = eta_x * mu_x, eta_k * mu_k
    return (binary_entropy(px) + binary_entropy(pk)
            + binary_entropy(mu_x) / mu_x + binary_entropy(mu_k) / mu_k
            + (2.0 - px - pk) * math.log2(n_bar - 1))


class TestAgreementIdentity:
    def test_diagonal(self):
        j = JointDistribution(np.eye(6) / 6, 1.0, 1.0)
        assert agreement_identity(j) == pytest.approx(1.0, abs=1e-12)

    def test_uniform_product(self):
        n = 8
        j = JointDistribution(np.full((n, n), 1 / n**2), 1.0, 1.0)
        assert agreement_identity(j) == pytest.approx(1 / n, abs=1e-12)

    def test_arithmetic(self):
        j = JointDistribution([[0.1, 0.4], [0.4, 0.1]], 1.0, 1.0)
        assert agreement_identity(j) == pytest.approx(0.2, abs=1e-12)

    def test_non_square_rejected(self):
        j = JointDistribution(np.full((2, 3), 1 / 6), 1.0, 1.0)
        with pytest.raises(ValueError):
            agreement_identity(j)


class TestAgreementBestOrdering:
    def test_anti_diagonal_dominant(self):
        j = JointDistribution([[0.1, 0.4], [0.4, 0.1]], 1.0, 1.0)
        value, ordering = agreement_best_ordering(j)
        assert value == pytest.approx(0.8, abs=1e-12)
        assert ordering.kind == ORDERING_REVERSED

    def test_diagonal_dominant_picks_identity(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(2, 7))
            m = rng.random((n, n)) * 0.01
            np.fill_diagonal(m, 1.0 + rng.random(n))
            m /= m.sum()
            _, ordering = agreement_best_ordering(JointDistribution(m, 1.0, 1.0))
            assert ordering.kind == ORDERING_IDENTITY

    def test_matches_exhaustive_permutation_search(self):
        rng = np.random.default_rng(42)
        for _ in range(40):
            n = int(rng.integers(2, 9))
            j = random_joint(rng, n)
            value, ordering = agreement_best_ordering(j)
            m = j.matrix
            brute = max(
                sum(m[perm[i], i] for i in range(n))
                for perm in itertools.permutations(range(n)))
            assert value == pytest.approx(brute, abs=1e-12)
            assert value == pytest.approx(
                m[ordering.permutation, np.arange(n)].sum(), abs=1e-12)

    def test_dominates_identity_and_reversal(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            j = random_joint(rng, int(rng.integers(2, 16)))
            best, _ = agreement_best_ordering(j)
            assert best >= agreement_identity(j) - 1e-12
            assert best >= agreement_reversed(j) - 1e-12

    def test_general_permutation_classified(self):
        m = np.zeros((3, 3))
        m[1, 0] = m[0, 1] = m[2, 2] = 1 / 3  # swap of the first two outcomes
        _, ordering = agreement_best_ordering(JointDistribution(m, 1.0, 1.0))
        assert ordering.kind == ORDERING_GENERAL


class TestDomainProbabilityFromFit:
    def test_wide_window(self):
        marginal = binned_gaussian(24, sigma_bins=2.0)  # +-6 sigma
        mu, fit = domain_probability_from_fit(marginal, 24)
        assert mu >= 0.9999
        assert fit.sigma == pytest.approx(2.0, rel=0.05)

    def test_two_sigma_window(self):
        marginal = binned_gaussian(16, sigma_bins=4.0)  # +-2 sigma
        mu, _ = domain_probability_from_fit(marginal, 16)
        assert mu == pytest.approx(0.9545, abs=2e-3)

    def test_reproduces_reference_domain_probabilities(self):
        # windows whose true coverages are 0.997 and 0.952
        for target in (0.997, 0.952):
            half_width_sigmas = ndtri((1 + target) / 2)
            n_bins = 16
            marginal = binned_gaussian(n_bins, (n_bins / 2) / half_width_sigmas)
            mu, _ = domain_probability_from_fit(marginal, n_bins)
            assert mu == pytest.approx(target, abs=3e-3)

    def test_scale_invariance(self):
        marginal = binned_gaussian(20, sigma_bins=3.0)
        mu1, _ = domain_probability_from_fit(marginal, 20)
        mu2, _ = domain_probability_from_fit(marginal * 54321.0, 20)
        assert mu1 == pytest.approx(mu2, abs=1e-12)

    def test_window_smaller_than_marginal(self):
        marginal = binned_gaussian(32, sigma_bins=4.0)
        mu_full, _ = domain_probability_from_fit(marginal, 32)
        mu_half, _ = domain_probability_from_fit(marginal, 16)  # +-2 sigma
        assert mu_half < mu_full
        assert mu_half == pytest.approx(0.9545, abs=2e-3)

    def test_degenerate_data_rejected(self):
        with pytest.raises(ValueError):
            domain_probability_from_fit([0.0, 1.0, 0.0, 0.0], 4)

    def test_window_exceeding_marginal_rejected(self):
        with pytest.raises(ValueError):
            domain_probability_from_fit(binned_gaussian(8, 2.0), 9)


class TestEffectiveDomain:
    def test_reference_position_correction(self):
        assert effective_domain(0.997, 0.92, 1.0) == pytest.approx(0.91724, abs=1e-9)

    def test_reference_momentum_correction(self):
        assert effective_domain(0.952, 1.0, 1.0) == 0.952

    def test_identity(self):
        for x in (0.1, 0.5, 1.0):
            assert effective_domain(x, 1.0, 1.0) == x

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            effective_domain(0.5, 0.0, 1.0)


class TestLhsStd:
    def stats(self, eta_x, eta_k, n, mu=1.0):
        return CorrelationStats(eta_x, eta_k, mu_x=mu, mu_k=mu,
                                n_coinc_x=n, n_coinc_k=n)

    def test_vanishes_with_infinite_counts(self):
        values = [lhs_std(self.stats(0.75, 0.75, n), N_BAR)
                  for n in (10**3, 10**5, 10**7, 10**11)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-4

    def test_matches_monte_carlo_resampling(self):
        n = 10**4
        sigma = lhs_std(self.stats(0.75, 0.75, n), N_BAR)
        rng = np.random.default_rng(314)
        ex = rng.binomial(n, 0.75, 10**5) / n
        ek = rng.binomial(n, 0.75, 10**5) / n
        log_n = math.log2(N_BAR - 1)
        samples = (binary_entropy(ex) + binary_entropy(ek)
                   + (2.0 - ex - ek) * log_n)
        assert sigma == pytest.approx(float(samples.std()), rel=0.10)

    def test_binomial_count_scaling(self):
        s1 = lhs_std(self.stats(ETA_X, ETA_K, 10**4), N_BAR)
        s2 = lhs_std(self.stats(ETA_X, ETA_K, 2 * 10**4), N_BAR)
        assert s2 == pytest.approx(s1 / math.sqrt(2), rel=0.01)

    def test_missing_counts_rejected(self):
        with pytest.raises(ValueError):
            lhs_std(CorrelationStats(0.75, 0.75), N_BAR)

    def test_boundary_products_are_clamped(self):
        # eta*mu at 1 would make the h2 derivative diverge without the clamp
        value = lhs_std(self.stats(1.0, 1.0, 10**4), N_BAR)
        assert math.isfinite(value) and value == 0.0  # eta(1-eta) kills the term
        value = lhs_std(self.stats(0.999999, 1.0, 10**4, mu=1.0), N_BAR)
        assert math.isfinite(value)


class TestHedgeMinDomain:
    def test_perfect_agreement_hedges_deeply(self):
        mu_min = hedge_min_domain(1.0, 1.0, N_BAR, RHS_BITS)
        assert mu_min < 0.9

    def test_operating_point_hedge(self):
        mu_min = hedge_min_domain(ETA_X, ETA_K, N_BAR, RHS_BITS)
        assert 0.87 < mu_min < 1.0

    def test_feedback_through_certificate(self):
        mu_min = hedge_min_domain(ETA_X, ETA_K, N_BAR, RHS_BITS)
        g = DetectorGeometry.from_rhs_bits(RHS_BITS, n_bar=N_BAR)
        res = 1e-4
        just_above = steering_certificate(
            CorrelationStats(ETA_X, ETA_K, mu_min + res, mu_min + res), g)
        at_value = steering_certificate(
            CorrelationStats(ETA_X, ETA_K, mu_min, mu_min), g)
        just_below = steering_certificate(
            CorrelationStats(ETA_X, ETA_K, mu_min - res, mu_min - res), g)
        assert just_above.verdict == "certified"
        assert at_value.verdict == "certified"
        assert just_below.verdict != "certified"

    def test_per_axis_modes(self):
        common = hedge_min_domain(ETA_X, ETA_K, N_BAR, RHS_BITS, mode="common")
        only_x = hedge_min_domain(ETA_X, ETA_K, N_BAR, RHS_BITS, mode="x",
                                  fixed_mu=1.0)
        only_k = hedge_min_domain(ETA_X, ETA_K, N_BAR, RHS_BITS, mode="k",
                                  fixed_mu=1.0)
        assert only_x <= common and only_k <= common

    def test_no_violation_rejected(self):
        with pytest.raises(ValueError):
            hedge_min_domain(0.6, 0.6, N_BAR, RHS_BITS)

    def test_zero_rhs_rejected(self):
        with pytest.raises(ValueError):
            hedge_min_domain(1.0, 1.0, N_BAR, 0.0)

    def test_bad_mode_rejected(self):
        with pytest.raises(ValueError):
            hedge_min_domain(1.0, 1.0, N_BAR, RHS_BITS, mode="both")


class TestContourGrid:
    def geometry(self):
        return DetectorGeometry.from_rhs_bits(RHS_BITS, n_bar=N_BAR)

    def surrounding_nodes(self, grid, eta_x, eta_k):
        ix = np.searchsorted(grid.eta_x_values, eta_x)
        ik = np.searchsorted(grid.eta_k_values, eta_k)
        return grid.violation[ix - 1:ix + 1, ik - 1:ik + 1]

    def test_operating_point_lies_in_violating_region(self):
        grid = contour_grid(self.geometry(), 1.0, 1.0, resolution=201)
        assert np.all(self.surrounding_nodes(grid, ETA_X, ETA_K) > 0)

    def test_operating_point_survives_domain_and_fill(self):
        grid = contour_grid(self.geometry(), 0.997 * 0.92, 0.952, resolution=201)
        assert np.all(self.surrounding_nodes(grid, ETA_X, ETA_K) > 0)

    def test_corner_value_full_domain(self):
        grid = contour_grid(self.geometry(), 1.0, 1.0, resolution=11)
        assert grid.violation[-1, -1] == pytest.approx(RHS_BITS, abs=1e-9)

    def test_matches_closed_form_everywhere(self):
        mu_x, mu_k = 0.95, 0.9
        grid = contour_grid(self.geometry(), mu_x, mu_k, resolution=21)
        rhs = RHS_BITS
        for i, ex in enumerate(grid.eta_x_values):
            for jdx, ek in enumerate(grid.eta_k_values):
                expected = rhs - steering_lhs_closed_form(ex, ek, mu_x, mu_k, N_BAR)
                assert grid.violation[i, jdx] == pytest.approx(expected, abs=1e-9)

    def test_sigma_grid(self):
        grid = contour_grid(self.geometry(), 1.0, 1.0, resolution=31,
                            counts=(10**4, 10**4))
        assert grid.sigma is not None
        assert grid.sigma.shape == grid.violation.shape
        mid = len(grid.eta_x_values) // 2
        stats = CorrelationStats(
            float(grid.eta_x_values[mid]), float(grid.eta_k_values[mid]),
            n_coinc_x=10**4, n_coinc_k=10**4)
        assert grid.sigma[mid, mid] == pytest.approx(lhs_std(stats, N_BAR), abs=1e-12)

    def test_grid_covers_applicable_region(self):
        grid = contour_grid(self.geometry(), 0.8, 0.9, resolution=51)
        assert grid.eta_x_values[0] == pytest.approx(0.5 / 0.8)
        assert grid.eta_k_values[0] == pytest.approx(0.5 / 0.9)
        assert grid.eta_x_values[-1] == 1.0

    def test_empty_applicable_region_rejected(self):
        with pytest.raises(ValueError):
            contour_grid(self.geometry(), 0.4, 1.0, resolution=11)

    def test_deterministic(self):
        g1 = contour_grid(self.geometry(), 1.0, 1.0, resolution=41)
        g2 = contour_grid(self.geometry(), 1.0, 1.0, resolution=41)
        assert np.array_equal(g1.violation, g2.violation)

    def test_bad_resolution_rejected(self):
        with pytest.raises(ValueError):
            contour_grid(self.geometry(), 1.0, 1.0, resolution=1)
