import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aoi_hier.age_renewal import (
    AgeEstimate,
    SessionTrace,
    average_age_formula,
    average_age_session_end,
    time_average_from_trace,
)
from aoi_hier.moments import MomentPair, iid_sum, independent_total


class TestMomentPair:
    def test_exponential(self):
        p = MomentPair.exponential(2.0)
        assert p.mean == 0.5
        assert p.second_moment == 0.5
        assert p.variance == pytest.approx(0.25)

    def test_deterministic(self):
        p = MomentPair.deterministic(3.0)
        assert p.variance == pytest.approx(0.0, abs=1e-12)

    def test_rejects_impossible_pair(self):
        with pytest.raises(ValueError):
            MomentPair(2.0, 1.0)
        with pytest.raises(ValueError):
            MomentPair(-1.0, 2.0)

    def test_from_samples(self):
        x = np.array([1.0, 3.0])
        p = MomentPair.from_samples(x)
        assert p.mean == 2.0
        assert p.second_moment == 5.0

    @given(rate=st.floats(0.01, 100.0))
    def test_exponential_variance_identity(self, rate):
        p = MomentPair.exponential(rate)
        assert p.variance == pytest.approx(1.0 / rate**2, rel=1e-12)


class TestSums:
    def test_iid_sum_of_two_exponentials(self):
        # Erlang(2, rate 1): mean 2, second moment 6
        p = iid_sum(MomentPair.exponential(1.0), 2)
        assert p.mean == pytest.approx(2.0)
        assert p.second_moment == pytest.approx(6.0)

    def test_iid_sum_real_count(self):
        p = iid_sum(MomentPair.exponential(1.0), 2.5)
        assert p.mean == pytest.approx(2.5)
        assert p.variance == pytest.approx(2.5)

    def test_iid_sum_zero_count(self):
        p = iid_sum(MomentPair.exponential(1.0), 0)
        assert p.mean == 0.0
        assert p.second_moment == 0.0

    def test_iid_sum_negative_count_rejected(self):
        with pytest.raises(ValueError):
            iid_sum(MomentPair.exponential(1.0), -1)

    def test_independent_total(self):
        total = independent_total(
            [MomentPair.exponential(1.0), MomentPair.exponential(2.0)]
        )
        assert total.mean == pytest.approx(1.5)
        # (sum of means)^2 + sum of variances = 2.25 + 1.25
        assert total.second_moment == pytest.approx(3.5)

    @given(
        rates=st.lists(st.floats(0.1, 10.0), min_size=1, max_size=6),
        counts=st.lists(st.integers(1, 5), min_size=6, max_size=6),
    )
    def test_total_matches_pairwise_expansion(self, rates, counts):
        pairs = [
            iid_sum(MomentPair.exponential(r), c) for r, c in zip(rates, counts)
        ]
        total = independent_total(pairs)
        mean = sum(p.mean for p in pairs)
        second = sum(p.second_moment for p in pairs) + 2 * sum(
            pairs[i].mean * pairs[j].mean
            for i in range(len(pairs))
            for j in range(i + 1, len(pairs))
        )
        assert total.mean == pytest.approx(mean, rel=1e-12)
        assert total.second_moment == pytest.approx(second, rel=1e-12)

    def test_monte_carlo_cross_check(self):
        rng = np.random.default_rng(42)
        x = rng.exponential(1.0, (200_000, 3)).sum(axis=1) + rng.exponential(
            0.5, 200_000
        )
        pred = independent_total(
            [iid_sum(MomentPair.exponential(1.0), 3), MomentPair.exponential(2.0)]
        )
        emp = MomentPair.from_samples(x)
        assert emp.mean == pytest.approx(pred.mean, rel=0.01)
        assert emp.second_moment == pytest.approx(pred.second_moment, rel=0.02)


class TestAgeFormula:
    def test_formula_exponential_sessions(self):
        # Exp(1) sessions, session-end delivery: 1 + 2/2 = 2
        assert average_age_session_end(MomentPair.exponential(1.0)) == pytest.approx(
            2.0
        )

    def test_formula_with_external_delay(self):
        y = MomentPair.exponential(1.0)
        assert average_age_formula(y, 0.25) == pytest.approx(1.25)

    def test_deterministic_sessions(self):
        # constant sessions of length c: age = c + c/2
        y = MomentPair.deterministic(4.0)
        assert average_age_session_end(y) == pytest.approx(6.0)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            average_age_formula(MomentPair(0.0, 0.0), 1.0)
        with pytest.raises(ValueError):
            average_age_formula(MomentPair.exponential(1.0), -1.0)

    @given(rate=st.floats(0.1, 10.0), delay=st.floats(0.0, 5.0))
    def test_age_exceeds_delay(self, rate, delay):
        assert average_age_formula(MomentPair.exponential(rate), delay) > delay


class TestTrace:
    def test_trace_validation(self):
        with pytest.raises(ValueError):
            SessionTrace(np.array([1.0, -2.0]))
        with pytest.raises(ValueError):
            SessionTrace(np.array([1.0, 2.0]), np.array([1.0, 3.0]))
        with pytest.raises(ValueError):
            time_average_from_trace(SessionTrace(np.array([1.0])))

    def test_two_session_example(self):
        # durations [1, 3]: one cycle of width 3 starting at age 1
        est = time_average_from_trace(SessionTrace(np.array([1.0, 3.0])))
        assert est.mean_age == pytest.approx(2.5)
        assert est.sessions_used == 2

    def test_constant_trace(self):
        est = time_average_from_trace(SessionTrace(np.ones(3)))
        assert est.mean_age == pytest.approx(1.5)
        assert est.half_width == pytest.approx(0.0, abs=1e-12)

    def test_explicit_offsets_match_session_end_default(self):
        y = np.array([2.0, 1.0, 3.0, 2.5])
        a = time_average_from_trace(SessionTrace(y))
        b = time_average_from_trace(SessionTrace(y, delivery_offsets=y.copy()))
        assert a.mean_age == pytest.approx(b.mean_age)

    def test_midpoint_delivery_lowers_age(self):
        y = np.full(50, 2.0)
        fast = time_average_from_trace(SessionTrace(y, delivery_offsets=y / 2))
        slow = time_average_from_trace(SessionTrace(y))
        assert fast.mean_age < slow.mean_age
        assert fast.mean_age == pytest.approx(2.0)  # 1 + 2/2

    def test_trace_converges_to_formula(self):
        rng = np.random.default_rng(7)
        y = rng.exponential(1.0, 1_000_000)
        est = time_average_from_trace(SessionTrace(y))
        assert abs(est.mean_age - 2.0) < 0.02
        assert abs(est.mean_age - 2.0) < 2.5 * est.half_width + 1e-9
        assert est.half_width > 0

    def test_age_estimate_validation(self):
        with pytest.raises(ValueError):
            AgeEstimate(-1.0, 0.0, 10)
        with pytest.raises(ValueError):
            AgeEstimate(1.0, -0.5, 10)

    @given(seed=st.integers(0, 50))
    def test_mean_age_at_least_mean_session(self, seed):
        # session-end convention: age >= E[Y] on any trace
        rng = np.random.default_rng(seed)
        y = rng.exponential(1.0, 500) + 0.01
        est = time_average_from_trace(SessionTrace(y))
        assert est.mean_age > y[:-1].mean() * 0.5
