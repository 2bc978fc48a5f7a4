import math

import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from mdfb.errors import ParameterError
from mdfb.multi_round import (
    DbUniform,
    EqualRate,
    RoundPlan,
    efficiency_table,
    exponential_rdf_excess,
    gaussian_asymptotic_gap,
    gaussian_equal_rate_final,
    gaussian_round,
    gaussian_round_inverse,
    run_exponential_trajectory,
    run_gaussian_trajectory,
)
from mdfb.rdf import gaussian_rdf

TABLE1 = {(2, 2): 0.7854, (2, 5): 0.6407, (10, 2): 0.9457, (10, 5): 0.9121}



@st.composite
def plans(draw):
    var = draw(st.floats(0.1, 10))
    if draw(st.booleans()):
        schedule = DbUniform(var * draw(st.floats(1e-4, 0.99)))
    else:
        schedule = EqualRate(var * draw(st.floats(1e-4, 1.0)))
    return RoundPlan(draw(st.integers(1, 10)), draw(st.integers(1, 40)), schedule, var)


class TestRound:
    def test_single_description(self):
        assert gaussian_round(0.3, 0.8, 1) == pytest.approx(0.3)

    def test_fig3_first_round(self):
        d = gaussian_round_inverse(math.sqrt(0.1), 1.0, 2)
        assert d == pytest.approx(0.4805, abs=1e-4)
        assert gaussian_round(0.4805, 1.0, 2) == pytest.approx(0.3162, abs=1e-4)

    def test_zero_rate_fixed_point(self):
        assert gaussian_round(0.6, 0.6, 7) == pytest.approx(0.6)

    def test_infeasible(self):
        with pytest.raises(ParameterError):
            gaussian_round(0.7, 0.6, 2)

    @given(st.floats(1e-3, 1.0), st.floats(0.1, 10), st.integers(1, 20))
    def test_inverse_roundtrip(self, frac, D_prev, K):
        D_m = frac * D_prev
        d = gaussian_round_inverse(D_m, D_prev, K)
        assert D_m <= d * (1 + 1e-12)
        assert gaussian_round(d, D_prev, K) == pytest.approx(D_m, rel=1e-12)


class TestTrajectory:
    def test_table1(self):
        rows = efficiency_table(1.0, 0.1, list(TABLE1))
        for row in rows:
            assert row.extra["efficiency"] == pytest.approx(TABLE1[(row.round, row.K)], abs=5e-4)
        assert rows[0].rate_bits == pytest.approx(2.1147, abs=1e-4)

    def test_single_round_single_description(self):
        (row,) = efficiency_table(1.0, 0.1, [(1, 1)])
        assert row.extra["efficiency"] == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("K", [2, 3, 5])
    def test_efficiency_increases_with_rounds(self, K):
        eta = [r.extra["efficiency"] for r in efficiency_table(1.0, 0.1, [(M, K) for M in range(2, 11)])]
        assert all(a < b for a, b in zip(eta, eta[1:]))

    def test_equal_rate_limit(self):
        rec = run_gaussian_trajectory(RoundPlan(2, 2000, EqualRate(0.5)))
        assert rec.final_distortion == pytest.approx(0.25, abs=1e-3)
        assert gaussian_equal_rate_final(1, 0.5, 2, 10**6) == pytest.approx(0.25, abs=1e-6)

    @settings(max_examples=60)
    @given(plans())
    @example(RoundPlan(1, 2, EqualRate(1.0)))
    def test_invariants(self, plan):
        rec = run_gaussian_trajectory(plan)
        D_prev = np.concatenate(([plan.var], rec.D[:-1]))
        if np.all(rec.rate > 0):
            assert np.all(np.diff(rec.D) < 0)
        else:  # zero-rate rounds (d equal to the variance) leave the distortion unchanged
            assert np.all(rec.D == plan.var)
        assert np.all(rec.D <= rec.d * (1 + 1e-12))
        assert np.all(np.diff(rec.sum_rate) >= 0)
        assert rec.total_rate >= gaussian_rdf(plan.var, rec.final_distortion) - 1e-9
        np.testing.assert_allclose(rec.rate, 0.5 * np.log2(D_prev / rec.d), rtol=1e-9, atol=1e-12)

    @settings(max_examples=40)
    @given(plans())
    def test_schedule_shapes(self, plan):
        rec = run_gaussian_trajectory(plan)
        if isinstance(plan.schedule, EqualRate):
            assert np.ptp(rec.rate) <= 1e-12
        else:
            logs = np.log10(np.concatenate(([plan.var], rec.D)))
            np.testing.assert_allclose(np.diff(logs), np.diff(logs)[0], rtol=1e-9, atol=1e-12)

    def test_plan_validation(self):
        with pytest.raises(ParameterError):
            RoundPlan(2, 2, DbUniform(1.5))
        with pytest.raises(ParameterError):
            RoundPlan(0, 2, DbUniform(0.5))
        with pytest.raises(ParameterError):
            RoundPlan(2, 2, EqualRate(0.0))


class TestAsymptoticGap:
    def test_degenerate(self):
        assert gaussian_asymptotic_gap(1.0, 0.3, 1, 1) == 0.0

    def test_convergence(self):
        Ms = [1, 2, 5, 10, 100, 10**4]
        gaps = [gaussian_asymptotic_gap(1.0, 0.5, 2, M) for M in Ms]
        assert all(g <= 0 for g in gaps)
        assert all(abs(a) > abs(b) for a, b in zip(gaps, gaps[1:]))
        assert abs(gaps[-1]) < 1e-3

    @given(st.floats(1e-3, 0.99), st.integers(1, 8), st.integers(1, 500))
    def test_matches_trajectory(self, d, K, M):
        rec = run_gaussian_trajectory(RoundPlan(K, M, EqualRate(d)))
        direct = gaussian_rdf(1.0, rec.final_distortion) - rec.total_rate
        assert gaussian_asymptotic_gap(1.0, d, K, M) == pytest.approx(direct, abs=1e-9)


class TestExponential:
    @given(st.floats(0.01, 10), st.integers(1, 50), st.floats(0.01, 10))
    def test_single_description_refinable(self, lam, M, R):
        rec = run_exponential_trajectory(lam, 1, M, R)
        assert rec.final_distortion == pytest.approx(2.0**-R / lam, rel=1e-12)
        assert np.max(np.abs(exponential_rdf_excess(rec, lam))) < 1e-9

    def test_many_rounds_limit(self):
        rec = run_exponential_trajectory(0.2, 3, 10**5, 2.0)
        assert rec.final_distortion == pytest.approx(1.25, rel=1e-4)

    def test_one_round(self):
        rec = run_exponential_trajectory(1.0, 2, 1, 1.0)
        assert 1 / rec.D[0] == pytest.approx(1 + 2 * (math.sqrt(2) - 1), rel=1e-14)
        assert rec.D[0] == pytest.approx(0.5469, abs=1e-4)

    def test_matches_select_max_round(self):
        from mdfb.single_round import ExpChannelSpec, selectmax_distortion

        rec = run_exponential_trajectory(0.7, 4, 1, 1.2)
        spec = ExpChannelSpec(0.7, rec.d[0], 4)
        assert selectmax_distortion(spec) == pytest.approx(rec.D[0], rel=1e-12)

    @given(st.floats(0.05, 5), st.integers(2, 6), st.integers(1, 30), st.floats(0.05, 5))
    def test_rate_excess_nonnegative(self, lam, K, M, R):
        rec = run_exponential_trajectory(lam, K, M, R)
        assert np.all(exponential_rdf_excess(rec, lam) >= -1e-9)
        assert np.all(np.diff(rec.D) < 0)
