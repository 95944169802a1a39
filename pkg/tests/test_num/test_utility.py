# tests/test_num/test_utility.py
# Tests for per-sensor utility functions

import numpy as np
import pytest

from infoflow.num.utility import (
    ExponentialUtility,
    LinearUtility,
    PiecewiseLinearUtility,
    upper_concave_envelope,
)
from infoflow.utils.validation import NonConcaveUtilityError


class TestLinearUtility:
    def test_value_and_slope(self):
        u = LinearUtility(slope=2.0, intercept=1.0)
        assert u(3) == 7.0
        assert u.supergradient(3) == 2.0

    def test_domain_cap(self):
        u = LinearUtility(slope=1.0, domain_max=2.0)
        assert u(5) == 2.0
        assert u.supergradient(2.0) == 0.0
        assert u.supergradient(1.0) == 1.0

    def test_negative_slope_rejected(self):
        with pytest.raises(NonConcaveUtilityError):
            LinearUtility(slope=-1.0).validate(rate_bound=4)

    def test_vectorized(self):
        u = LinearUtility(slope=0.5)
        np.testing.assert_allclose(u(np.array([0.0, 2.0])), [0.0, 1.0])


class TestExponentialUtility:
    def test_value_and_slope(self):
        u = ExponentialUtility(scale=2.0)
        assert u(0) == pytest.approx(-2.0)
        assert u(1) == pytest.approx(-0.5)
        assert u.supergradient(1) == pytest.approx(0.5 * np.log(4.0))

    def test_passes_validation(self):
        ExponentialUtility(scale=3.0).validate(rate_bound=20)

    def test_negative_scale_rejected(self):
        with pytest.raises(NonConcaveUtilityError):
            ExponentialUtility(scale=-1.0)


class TestPiecewiseLinearUtility:
    def test_interpolation_and_flat_tail(self):
        u = PiecewiseLinearUtility([0, 1, 2, 4], [0, 1, 1.5, 2])
        assert u(0.5) == pytest.approx(0.5)
        assert u(3) == pytest.approx(1.75)
        assert u(10) == pytest.approx(2.0)

    def test_right_slope_at_breakpoints(self):
        u = PiecewiseLinearUtility([0, 1, 2, 4], [0, 1, 1.5, 2])
        assert u.supergradient(0) == pytest.approx(1.0)
        assert u.supergradient(1) == pytest.approx(0.5)
        assert u.supergradient(2) == pytest.approx(0.25)
        assert u.supergradient(4) == 0.0

    def test_segments(self):
        u = PiecewiseLinearUtility([0, 2, 3], [0, 3, 3.5])
        assert u.segments() == [(2.0, 1.5), (1.0, 0.5)]

    @pytest.mark.parametrize(
        "xs, ys",
        [
            ([0, 1, 2], [0, 1, 3]),
            ([0, 1, 2], [0, 1, 0.5]),
            ([1, 2], [0, 1]),
            ([0, 2, 1], [0, 1, 2]),
            ([0, 1], [0]),
        ],
    )
    def test_rejects_invalid_shapes(self, xs, ys):
        with pytest.raises(NonConcaveUtilityError):
            PiecewiseLinearUtility(xs, ys)


class TestConcaveEnvelope:
    def test_drops_points_below_chord(self):
        hx, hy = upper_concave_envelope([0, 1, 2, 3], [0, 0.2, 1.5, 1.6])
        np.testing.assert_allclose(hx, [0, 2, 3])
        np.testing.assert_allclose(hy, [0, 1.5, 1.6])

    def test_envelope_utility_dominates_points(self):
        xs = [0, 1, 2, 3, 4]
        ys = [0, 0.2, 1.5, 1.4, 1.9]
        u = PiecewiseLinearUtility.concave_envelope(xs, ys)
        assert np.all(u.ys >= np.asarray(ys) - 1e-12)
        np.testing.assert_allclose(u.ys, [0, 0.75, 1.5, 1.7, 1.9])

    def test_concave_points_unchanged(self):
        xs = [0, 1, 2]
        ys = [0, 2, 3]
        u = PiecewiseLinearUtility.concave_envelope(xs, ys)
        np.testing.assert_allclose(u.ys, ys)
