# tests/test_detection/test_densities.py
# Tests for observation densities, hypothesis pairs and the density factory

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import special

from infoflow.detection.densities import (
    DensityFactory,
    DensityPair,
    DensityPairSpec,
    DensitySpec,
    Exponential,
    Gaussian,
)
from infoflow.utils.validation import ConfigurationError


class TestDensities:
    def test_gaussian_matches_closed_form(self):
        g = Gaussian(1.0, 4.0)
        assert g.pdf(1.0) == pytest.approx(1.0 / np.sqrt(8 * np.pi))
        assert g.cdf(1.0) == pytest.approx(0.5)
        assert g.ppf(0.5) == pytest.approx(1.0)
        assert g.isf(special.ndtr(-1.0)) == pytest.approx(3.0)

    def test_exponential_support(self):
        e = Exponential(2.0)
        assert e.pdf(-1.0) == 0.0
        assert e.cdf(-1.0) == 0.0
        assert e.sf(0.0) == 1.0
        assert e.median() == pytest.approx(np.log(2.0) / 2.0)

    def test_invalid_parameters(self):
        with pytest.raises(ConfigurationError):
            Gaussian(0.0, 0.0)
        with pytest.raises(ConfigurationError):
            Exponential(-1.0)

    def test_equality_by_parameters(self):
        assert Gaussian(0.0, 1.0) == Gaussian(0.0, 1.0)
        assert hash(Exponential(1.5)) == hash(Exponential(1.5))
        assert Gaussian(0.0, 1.0) != Exponential(1.0)


class TestDensityPair:
    def test_mixed_families_rejected(self):
        with pytest.raises(ConfigurationError):
            DensityPair(Gaussian(0.0, 1.0), Exponential(1.0))

    def test_unequal_variances_rejected(self):
        with pytest.raises(ConfigurationError):
            DensityPair(Gaussian(0.0, 1.0), Gaussian(1.0, 2.0))

    def test_gaussian_likelihood_ratio(self):
        pair = DensityPair(Gaussian(0.0, 1.0), Gaussian(3.0, 1.0))
        assert pair.direction == 1
        assert pair.lr_of_y(1.0) == pytest.approx(np.exp(3.0 - 4.5))
        assert pair.y_of_lr(1.0) == pytest.approx(1.5)

    def test_exponential_likelihood_ratio(self):
        pair = DensityPair(Exponential(1.0), Exponential(0.5))
        assert pair.direction == 1
        assert pair.lr_of_y(0.0) == pytest.approx(0.5)
        assert pair.y_of_lr(1.0) == pytest.approx(2.0 * np.log(2.0))

    def test_lr_undefined_where_both_densities_vanish(self):
        pair = DensityPair(Exponential(1.0), Exponential(2.0))
        assert np.isnan(pair.log_likelihood_ratio(-1.0))

    def test_extreme_thresholds_map_to_support_ends(self):
        pair = DensityPair(Exponential(1.0), Exponential(0.5))
        assert pair.y_of_lr(0.0) == 0.0
        assert pair.y_of_lr(np.inf) == np.inf

    def test_decreasing_ratio(self):
        pair = DensityPair(Gaussian(3.0, 1.0), Gaussian(0.0, 1.0))
        assert pair.direction == -1
        assert pair.y_of_lr(1.0) == pytest.approx(1.5)

    def test_identical_densities_have_constant_ratio(self):
        pair = DensityPair(Gaussian(0.0, 1.0), Gaussian(0.0, 1.0))
        assert pair.direction == 0
        assert pair.kl_divergence() == 0.0
        with pytest.raises(ValueError):
            pair.y_of_lr(2.0)

    def test_kl_ceiling(self):
        assert DensityPair(Gaussian(0.0, 1.0), Gaussian(3.0, 1.0)).kl_divergence() == pytest.approx(4.5)
        assert DensityPair(Exponential(1.0), Exponential(0.5)).kl_divergence() == pytest.approx(np.log(0.5) + 1.0)

    def test_tail_masses_keep_relative_accuracy(self):
        pair = DensityPair(Gaussian(0.0, 1.0), Gaussian(3.0, 1.0))
        q0, q1 = pair.interval_masses(np.array([9.0, -np.inf]), np.array([np.inf, -9.0]))
        assert q0[0] == pytest.approx(special.ndtr(-9.0), rel=1e-10)
        assert q1[1] == pytest.approx(special.ndtr(-12.0), rel=1e-10)

    def test_masses_of_partition_sum_to_one(self):
        pair = DensityPair(Exponential(2.0), Exponential(0.7))
        edges = np.array([0.0, 0.1, 0.5, 2.0, 10.0, np.inf])
        q0, q1 = pair.interval_masses(edges[:-1], edges[1:])
        assert q0.sum() == pytest.approx(1.0, abs=1e-12)
        assert q1.sum() == pytest.approx(1.0, abs=1e-12)

    def test_search_interval_covers_both_hypotheses(self):
        pair = DensityPair(Gaussian(0.0, 1.0), Gaussian(3.0, 1.0))
        lo, hi = pair.search_interval(1e-8)
        assert pair.p0.cdf(lo) <= 1e-8
        assert pair.p1.sf(hi) <= 1e-8

    def test_validate(self):
        assert DensityPair(Exponential(1.0), Exponential(0.5)).validate() == []


class TestDensityFactory:
    def test_create_pair_from_spec(self):
        factory = DensityFactory()
        spec = DensityPairSpec(
            h0=DensitySpec(family="gaussian", mean=0.0),
            h1=DensitySpec(family="gaussian", mean=3.0),
        )
        pair = factory.create_pair(spec)
        assert pair.p0 == Gaussian(0.0, 1.0)
        assert pair.p1 == Gaussian(3.0, 1.0)

    def test_densities_are_cached(self):
        factory = DensityFactory()
        spec = DensitySpec(family="exponential", rate=0.25)
        assert factory.create_density(spec) is factory.create_density(spec)
        assert "exponential" in factory.get_available_families()
        first = factory.create_density(spec)
        factory.clear_cache()
        assert factory.create_density(spec) is not first

    @pytest.mark.parametrize(
        "fields",
        [
            {"family": "gaussian"},
            {"family": "gaussian", "mean": 0.0, "rate": 1.0},
            {"family": "exponential"},
            {"family": "exponential", "rate": 1.0, "mean": 0.0},
            {"family": "laplace", "mean": 0.0},
        ],
    )
    def test_spec_validation(self, fields):
        with pytest.raises(ValidationError):
            DensitySpec(**fields)
