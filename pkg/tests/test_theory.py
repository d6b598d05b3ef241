import math

import numpy as np
import pytest

from dgs_opt import (
    ConvexityConstants,
    bandlimited_noise_grad_bound,
    contraction_rate,
    delta_sigma_periodic,
    diminishing_beta_condition,
    diminishing_noise_grad_bound,
    diminishing_rate,
    gh_error_term,
    periodic_noise_grad_bound,
    recommend_sigma_bandlimited,
    recommend_sigma_periodic,
)

LT = ConvexityConstants(L=2.0, tau=2.0)


class TestConstants:
    def test_tau_cannot_exceed_L(self):
        with pytest.raises(ValueError):
            ConvexityConstants(L=1.0, tau=2.0)

    def test_positive_required(self):
        with pytest.raises(ValueError):
            ConvexityConstants(L=0.0, tau=0.0)


class TestNoiseGradientBounds:
    # frozen values from a 40-digit arithmetic oracle
    def test_periodic_frozen_values(self):
        np.testing.assert_allclose(
            periodic_noise_grad_bound(1.0, 1, 1.0, 0.5, 5),
            0.011248573168860416, rtol=1e-14,
        )
        np.testing.assert_allclose(
            periodic_noise_grad_bound(1.0, 2, 1.0, 0.5, 5),
            0.0013977967394813335, rtol=1e-14,
        )
        np.testing.assert_allclose(
            periodic_noise_grad_bound(1.0, 3, 1.0, 0.5, 5),
            0.00022431168495712252, rtol=1e-14,
        )

    def test_bandlimited_frozen_value(self):
        np.testing.assert_allclose(
            bandlimited_noise_grad_bound(1.0, 1.0, 0.5, 5),
            0.020475652757210546, rtol=1e-14,
        )

    def test_diminishing_frozen_value(self):
        np.testing.assert_allclose(
            diminishing_noise_grad_bound(0.01, 0.5, 1.5, 5),
            0.098126826388402411, rtol=1e-14,
        )

    def test_bounds_decay_with_sigma(self):
        sigmas = [0.25, 0.5, 1.0, 2.0]
        per = [periodic_noise_grad_bound(1.0, 1, 1.0, s, 5) for s in sigmas]
        band = [bandlimited_noise_grad_bound(1.0, 1.0, s, 5) for s in sigmas]
        assert all(b > a for a, b in zip(per[1:], per[:-1]))
        assert all(b > a for a, b in zip(band[1:], band[:-1]))

    def test_diminishing_bound_vanishes_with_dist_and_sigma(self):
        small = diminishing_noise_grad_bound(1.0, 1e-6, 0.0, 5)
        assert small < 1e-5

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            periodic_noise_grad_bound(1.0, 1, -1.0, 0.5, 5)
        with pytest.raises(ValueError):
            bandlimited_noise_grad_bound(1.0, 1.0, 0.0, 5)
        with pytest.raises(ValueError):
            diminishing_noise_grad_bound(1.0, 1.0, -0.1, 5)


class TestRecommendedSigma:
    def test_periodic_low_frequency_branch(self):
        # threshold for L=2, gamma1=1 is 4*sqrt(2)/pi ~ 1.8006
        sigma, branch = recommend_sigma_periodic(LT, 1.0, 1.0)
        assert branch == "low-frequency"
        assert sigma == 1.0

    def test_periodic_high_frequency_branch_frozen_value(self):
        sigma, branch = recommend_sigma_periodic(LT, 1.0, 4.0)
        assert branch == "high-frequency"
        np.testing.assert_allclose(sigma, 0.050271183532006557, rtol=1e-14)

    def test_bandlimited_low_frequency_branch(self):
        sigma, branch = recommend_sigma_bandlimited(LT, 1.0, 0.2)
        assert branch == "low-frequency"
        assert sigma == 5.0

    def test_bandlimited_high_frequency_branch_frozen_value(self):
        # threshold for L=2, gamma=1 is 2^(1/3)/pi ~ 0.40105
        sigma, branch = recommend_sigma_bandlimited(LT, 1.0, 1.0)
        assert branch == "high-frequency"
        np.testing.assert_allclose(sigma, 0.37264303843113413, rtol=1e-14)

    def test_recommended_sigma_below_wavelength_on_high_branch(self):
        for alpha in (2.0, 4.0, 16.0):
            sigma, branch = recommend_sigma_periodic(LT, 1.0, alpha)
            assert branch == "high-frequency"
            assert 0 < sigma < 1.0 / alpha


class TestDiscrepancyAndRates:
    def test_gh_error_term_frozen_value(self):
        np.testing.assert_allclose(
            gh_error_term(5, 0.5, 5), 6.3990635728421293e-17, rtol=1e-13
        )

    def test_delta_sigma_frozen_value(self):
        np.testing.assert_allclose(
            delta_sigma_periodic(LT, 1.0, 1.0, 0.5, 5, 5),
            255.00047776789609, rtol=1e-13,
        )

    def test_contraction_rate_reference_point(self):
        # lambda = 1/(16 L) with tau = L gives 1 - tau/(32 L) = 0.96875
        assert contraction_rate(LT, 1.0 / 32.0) == pytest.approx(0.96875, abs=1e-15)

    def test_contraction_rate_step_size_cap(self):
        with pytest.raises(ValueError):
            contraction_rate(LT, 1.0 / 8.0 / 2.0 + 0.2)

    def test_diminishing_rate_frozen_value(self):
        np.testing.assert_allclose(
            diminishing_rate(LT, 0.001, 5), 0.98146628544077812, rtol=1e-14
        )

    def test_beta_condition_matches_rate_below_one(self):
        # the smallness predicate is exactly "rate < 1"
        for beta in (1e-4, 1e-3, 2e-3, 5e-3, 1e-2, 0.1, 1.0):
            holds = diminishing_beta_condition(LT, beta, 5)
            assert holds == (diminishing_rate(LT, beta, 5) < 1.0)

    def test_rate_increases_with_beta_and_dimension(self):
        assert diminishing_rate(LT, 0.01, 5) > diminishing_rate(LT, 0.001, 5)
        assert diminishing_rate(LT, 0.001, 50) > diminishing_rate(LT, 0.001, 5)
