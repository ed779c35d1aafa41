import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from palm import (
    DegenerateModel,
    DomainError,
    PalmParams,
    TargetUnreachable,
    TwoRegionParams,
    coverage_probability,
    expected_coverage,
    generalized_accuracy,
    invert_budget,
    palm_accuracy,
    palm_accuracy_small_delta,
    palm_param_gradient,
    palm_slope,
    two_region_accuracy,
    uncovered_probability,
)

from conftest import central_difference, interior_draws, random_params

probabilities = st.floats(0.0, 1.0)
counts = st.floats(0.0, 1e4)


class TestCoverage:
    def test_single_certain_object(self):
        assert coverage_probability(1.0, 1) == 1.0

    def test_no_objects(self):
        assert coverage_probability(0.3, 0) == 0.0

    def test_ten_objects(self):
        # mpmath, 50 digits: 1 - 0.9**10
        assert coverage_probability(0.1, 10) == pytest.approx(0.6513215599, abs=1e-10)

    def test_certain_object_zero_count(self):
        assert coverage_probability(1.0, 0) == 0.0

    @pytest.mark.parametrize("p, s", [(-0.1, 1), (1.1, 1), (0.5, -1), (math.nan, 1)])
    def test_domain(self, p, s):
        with pytest.raises(DomainError):
            coverage_probability(p, s)

    @given(probabilities, counts)
    def test_complement(self, p, s):
        total = coverage_probability(p, s) + uncovered_probability(p, s)
        assert abs(total - 1.0) <= 2 * np.spacing(1.0)

    @given(st.floats(1e-6, 1 - 1e-6), counts, st.floats(0.0, 100.0))
    def test_monotone_in_count(self, p, s, extra):
        assert coverage_probability(p, s + extra) >= coverage_probability(p, s)

    def test_tends_to_one(self):
        s = np.logspace(0, 5, 50)
        values = coverage_probability(0.01, s)
        assert np.all(np.diff(values) >= 0)
        assert values[-1] == 1.0

    def test_vectorized(self):
        out = coverage_probability(0.2, np.array([0.0, 1.0, 2.0]))
        np.testing.assert_allclose(out, [0.0, 0.2, 0.36])


class TestExpectedCoverage:
    def test_one_sample(self):
        assert expected_coverage(0.5, 1) == 0.5

    def test_zero_measure(self):
        assert expected_coverage(0.0, 1e6) == 0.0

    def test_ten_samples(self):
        assert expected_coverage(0.1, 10) == pytest.approx(0.6513215599, abs=1e-10)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), counts)
    def test_monotone_in_delta(self, d1, d2, budget):
        lo, hi = sorted((d1, d2))
        assert expected_coverage(lo, budget) <= expected_coverage(hi, budget)


class TestTwoRegion:
    def test_no_budget_is_uncovered_accuracy(self):
        assert two_region_accuracy(TwoRegionParams(80, 10, 0.2), 0) == 10.0

    def test_full_coverage(self):
        assert two_region_accuracy(TwoRegionParams(80, 10, 1.0), 1) == 80.0

    def test_ten_samples(self):
        # mpmath: 10 + 70 * (1 - 0.9**10)
        value = two_region_accuracy(TwoRegionParams(80, 10, 0.1), 10)
        assert value == pytest.approx(55.592509193, abs=1e-8)

    @given(
        st.floats(0.0, 100.0), st.floats(0.0, 100.0), probabilities, counts
    )
    def test_convex_combination(self, ac, auc, delta, budget):
        value = two_region_accuracy(TwoRegionParams(ac, auc, delta), budget)
        assert min(ac, auc) <= value <= max(ac, auc)

    def test_invalid(self):
        with pytest.raises(DomainError):
            TwoRegionParams(120, 10, 0.1)


class TestPalmAccuracy:
    def test_zero_exponent(self):
        assert palm_accuracy(PalmParams(90, 0.5, 0, 1, 20), 0) == 0.0

    def test_unit_step(self):
        # mpmath: 90 * (1 - 0.9**10)
        value = palm_accuracy(PalmParams(90, 0.1, 0, 1, 1), 10)
        assert value == pytest.approx(58.618940391, abs=1e-8)

    def test_tabulated_row_tends_to_ceiling(self):
        p = PalmParams(87.1, 0.536, 0.392, 0.381, 20)
        values = palm_accuracy(p, np.array([1e2, 1e4, 1e6, 1e9]))
        assert np.all(np.diff(values) >= 0) and values[1] > values[0]
        assert values[-1] == pytest.approx(87.1, abs=1e-9)
        assert np.all(values <= 87.1)

    def test_matches_arbitrary_precision(self, rng):
        mpmath.mp.dps = 40
        for _ in range(50):
            p = random_params(rng)
            budget = rng.uniform(0, 50 * p.b)
            x = mpmath.mpf(budget) / mpmath.mpf(p.b) + mpmath.mpf(p.alpha)
            exact = p.a_max * (1 - (1 - mpmath.mpf(p.delta)) ** (x ** mpmath.mpf(p.beta)))
            assert palm_accuracy(p, budget) == pytest.approx(float(exact), rel=1e-12, abs=1e-12)

    def test_delta_one(self):
        p = PalmParams(70, 1.0, 0.0, 0.5, 10)
        assert palm_accuracy(p, 0) == 0.0
        assert palm_accuracy(p, 5) == 70.0

    def test_delta_zero(self):
        p = PalmParams(70, 0.0, 3.0, 0.5, 10)
        np.testing.assert_array_equal(palm_accuracy(p, np.arange(0, 100.0)), 0.0)

    def test_negative_shift_allowed_when_defined(self):
        p = PalmParams(70, 0.2, -1.0, 1.0, 10)
        assert palm_accuracy(p, 10) == 0.0
        with pytest.raises(DomainError):
            palm_accuracy(p, 5)

    def test_scalar_and_array(self):
        p = PalmParams(90, 0.1, 0, 1, 1)
        assert isinstance(palm_accuracy(p, 3), float)
        assert palm_accuracy(p, np.array([3.0])).shape == (1,)

    def test_monotone_random_pairs(self, rng):
        for p, top in interior_draws(rng, 1000):
            b1, b2 = np.sort(rng.uniform(0, top, size=2))
            if b1 == b2:
                continue
            assert palm_accuracy(p, b1) < palm_accuracy(p, b2)

    @given(
        st.floats(0.1, 100), st.floats(1e-4, 0.9999), st.floats(0, 20),
        st.floats(0.05, 5), st.floats(0.1, 100), st.floats(0, 1e4),
    )
    @settings(max_examples=200)
    def test_bounds(self, a_max, delta, alpha, beta, b, budget):
        value = palm_accuracy(PalmParams(a_max, delta, alpha, beta, b), budget)
        assert 0.0 <= value <= a_max

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(a_max=101, delta=0.1, alpha=0, beta=1),
            dict(a_max=90, delta=1.5, alpha=0, beta=1),
            dict(a_max=90, delta=0.1, alpha=0, beta=0),
            dict(a_max=90, delta=0.1, alpha=math.inf, beta=1),
            dict(a_max=90, delta=0.1, alpha=0, beta=1, b=0),
        ],
    )
    def test_invalid_params(self, kwargs):
        with pytest.raises(DomainError):
            PalmParams(**kwargs)


class TestGeneralizedAccuracy:
    def test_one_sample(self):
        assert generalized_accuracy(PalmParams(100, 0.2, 0, 1), 1) == pytest.approx(20.0)

    def test_nonzero_without_labels(self):
        assert generalized_accuracy(PalmParams(50, 0.3, 2, 1), 0) == pytest.approx(25.5)

    def test_alias(self, rng):
        for _ in range(100):
            p = random_params(rng, b=1.0)
            budget = rng.uniform(0, 500)
            assert generalized_accuracy(p, budget) == palm_accuracy(p, budget)

    def test_ignores_b(self):
        p = PalmParams(60, 0.2, 1.0, 0.7, b=25.0)
        assert generalized_accuracy(p, 40) == palm_accuracy(p.with_b(1.0), 40)

    def test_zero_budget_closed_form(self, rng):
        for _ in range(50):
            p = random_params(rng, b=1.0)
            expected = p.a_max * (1 - (1 - p.delta) ** (p.alpha ** p.beta))
            assert generalized_accuracy(p, 0) == pytest.approx(expected, rel=1e-12)
        assert generalized_accuracy(PalmParams(50, 0.3, 0.0, 0.7), 0) == 0.0


class TestSmallDelta:
    def test_zero_delta(self):
        p = PalmParams(90, 0.0, 1.0, 1.0)
        np.testing.assert_array_equal(palm_accuracy_small_delta(p, np.arange(10.0)), 0.0)

    def test_against_exact(self):
        p = PalmParams(90, 0.001, 0, 1, 1)
        approx = palm_accuracy_small_delta(p, 1000)
        assert approx == pytest.approx(90 * (1 - math.exp(-1)), rel=1e-12)
        assert abs(approx - palm_accuracy(p, 1000)) < 0.03

    def test_exponent_fifty(self):
        # mpmath: 90 * (exp(-0.5) - 0.99**50) = 0.13721...
        p = PalmParams(90, 0.01, 0, 1, 1)
        diff = abs(palm_accuracy(p, 50) - palm_accuracy_small_delta(p, 50))
        assert diff == pytest.approx(0.13721333175870958, rel=1e-9)
        assert diff < 0.15

    def test_exponent_scan(self):
        exponents = np.arange(0, 101, dtype=float)
        for delta in (1e-4, 1e-3, 5e-3, 1e-2):
            p = PalmParams(100, delta, 0, 1, 1)
            gap = np.abs(palm_accuracy(p, exponents) - palm_accuracy_small_delta(p, exponents))
            assert gap.max() < 0.5


class TestSlope:
    def test_finite_difference(self, rng):
        for p, budget in interior_draws(rng, 100):
            h = 1e-4 * max(1.0, budget)
            if budget - 2 * h <= 0:
                h = 0.25 * budget
            fd = central_difference(lambda x: palm_accuracy(p, x), budget, h)
            assert palm_slope(p, budget) == pytest.approx(fd, rel=1e-5)

    def test_vanishes_without_coverage(self):
        assert palm_slope(PalmParams(90, 0.0, 1, 1, 1), 10) == 0.0
        assert palm_slope(PalmParams(90, 1e-300, 1, 1, 1), 10) < 1e-297

    def test_positive(self, rng):
        for p, budget in interior_draws(rng, 200):
            assert palm_slope(p, budget) > 0

    def test_singular_origin(self):
        with pytest.raises(DomainError):
            palm_slope(PalmParams(90, 0.1, 0, 0.5, 1), 0)
        assert palm_slope(PalmParams(90, 0.1, 0, 2.0, 1), 0) == 0.0
        unit = PalmParams(90, 0.1, 0, 1.0, 1)
        assert palm_slope(unit, 0) == pytest.approx(-90 * math.log(0.9))


class TestParamGradient:
    def test_linear_in_a_max(self, rng):
        for _ in range(50):
            p = random_params(rng)
            budget = rng.uniform(1, 100) * p.b
            grad = palm_param_gradient(p, budget)
            assert grad[0] == pytest.approx(palm_accuracy(p, budget) / p.a_max, rel=1e-14)

    def test_finite_differences(self, rng):
        steps = np.array([1e-4, 1e-5, 1e-4, 1e-4])
        for p, budget in interior_draws(rng, 200):
            grad = palm_param_gradient(p, budget)
            theta = p.as_array()
            for k in range(4):
                h = steps[k] * max(1.0, abs(theta[k]))

                def f(v, k=k):
                    t = theta.copy()
                    t[k] = v
                    return palm_accuracy(PalmParams.from_array(t, p.b), budget)

                fd = central_difference(f, theta[k], h)
                assert grad[k] == pytest.approx(fd, rel=1e-5)

    def test_delta_partial_positive(self, rng):
        for p, budget in interior_draws(rng, 100):
            assert palm_param_gradient(p, budget)[1] > 0

    def test_shape(self):
        p = PalmParams(90, 0.1, 1, 1, 1)
        assert palm_param_gradient(p, 3.0).shape == (4,)
        assert palm_param_gradient(p, np.arange(1.0, 6.0)).shape == (5, 4)

    def test_origin_rejected(self):
        with pytest.raises(DomainError):
            palm_param_gradient(PalmParams(90, 0.1, 0, 1, 1), 0)


def _bisect_budget(p, target):
    lo, hi = 0.0, 1.0
    while palm_accuracy(p, hi) < target:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if palm_accuracy(p, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestInvertBudget:
    def test_half_ceiling(self):
        p = PalmParams(90, 0.1, 0, 1, 1)
        value = invert_budget(p, 45)
        # mpmath bisection: 6.57881347896058...
        assert value == pytest.approx(6.578813478960584, rel=1e-12)
        assert value == pytest.approx(_bisect_budget(p, 45), rel=1e-9)

    def test_zero_target(self):
        assert invert_budget(PalmParams(90, 0.1, 0, 1, 1), 0) == 0.0

    def test_clamped_below(self):
        p = PalmParams(90, 0.1, 5, 1, 1)
        assert invert_budget(p, 10) == 0.0

    def test_round_trip(self, rng):
        for p, budget in interior_draws(rng, 100, high=13.0):
            acc = palm_accuracy(p, budget)
            assert invert_budget(p, acc) == pytest.approx(budget, rel=1e-6)

    def test_forward(self, rng):
        for _ in range(100):
            p = random_params(rng)
            floor = palm_accuracy(p, 0)
            if floor >= p.a_max * 0.999:
                continue
            target = rng.uniform(floor, p.a_max * 0.999)
            budget = invert_budget(p, target)
            assert palm_accuracy(p, budget) == pytest.approx(target, abs=1e-8)

    def test_ceiling(self):
        p = PalmParams(87.1, 0.536, 0.392, 0.381, 20)
        budget = invert_budget(p, p.a_max * (1 - 1e-9))
        assert palm_accuracy(p, budget) >= p.a_max * (1 - 2e-9)

    def test_unreachable(self):
        with pytest.raises(TargetUnreachable) as info:
            invert_budget(PalmParams(90, 0.1, 0, 1, 1), 95)
        assert info.value.gap == pytest.approx(5.0)
        with pytest.raises(TargetUnreachable):
            invert_budget(PalmParams(90, 0.1, 0, 1, 1), 90)

    @pytest.mark.parametrize("delta", [0.0, 1.0])
    def test_degenerate(self, delta):
        with pytest.raises(DegenerateModel):
            invert_budget(PalmParams(90, delta, 0, 1, 1), 45)
