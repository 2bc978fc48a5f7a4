import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdfb.errors import ParameterError
from mdfb.md_feedback import (
    ErasureTrace,
    IidBernoulli,
    independent_noise_endpoint,
    md_efficiency,
    md_min_sum_rate,
    md_symmetric_rate,
    run_feedback_simulation,
    uncond_combined_distortion,
    uncond_sum_rate,
)
from mdfb.multi_round import DbUniform, RoundPlan, run_gaussian_trajectory
from mdfb.rdf import gaussian_rdf

# direct mpmath evaluation of the two-term rate at K=2, var=1, D=0.5, D_all=0.2
MD_RATE_REF = 0.603759374819711


@st.composite
def md_points(draw):
    K = draw(st.integers(2, 12))
    var = draw(st.floats(0.2, 5))
    D = var * draw(st.floats(0.01, 0.99))
    D_all = D * draw(st.floats(0.001, 0.999))
    return var, D, D_all, K


class TestSymmetricRate:
    def test_value(self):
        assert md_symmetric_rate(1, 0.5, 0.2, 2) == pytest.approx(MD_RATE_REF, rel=1e-12)

    @settings(max_examples=200)
    @given(md_points())
    def test_lower_bounds(self, pt):
        var, D, D_all, K = pt
        R = md_symmetric_rate(var, D, D_all, K)
        assert R >= gaussian_rdf(var, D) - 1e-9
        assert R >= gaussian_rdf(var, D_all) / K - 1e-9

    @pytest.mark.parametrize("K", [2, 3, 7])
    @pytest.mark.parametrize("D", [0.2, 0.6, 0.95])
    def test_independent_noise_endpoint(self, K, D):
        D_all = independent_noise_endpoint(1.0, D, K)
        N = D / (1 - D)
        assert D_all == pytest.approx(uncond_combined_distortion(1.0, N, K), rel=1e-12)
        assert md_symmetric_rate(1.0, D, D_all, K) == pytest.approx(0.5 * math.log2(1 / D), abs=1e-9)

    def test_ordering_errors(self):
        with pytest.raises(ParameterError):
            md_symmetric_rate(1, 0.2, 0.5, 2)
        with pytest.raises(ParameterError):
            md_symmetric_rate(1, 0.5, 0.2, 1)


class TestEfficiency:
    @pytest.mark.parametrize("K", [2, 4, 6, 8, 10])
    def test_fig5_grid_bounded(self, K):
        eps = 1e-3
        D = 1 - eps
        top = independent_noise_endpoint(1.0, D, K)
        for D_all in np.geomspace(1e-3, top, 50)[:-1]:
            e = md_efficiency(1.0, eps, D_all, K)
            assert 0 < e.single <= 1 + 1e-9
            assert 0 < e.full <= 1 + 1e-9

    def test_endpoint_single_efficiency(self):
        D = 1 - 1e-3
        e = md_efficiency(1.0, 1e-3, independent_noise_endpoint(1.0, D, 4), 4)
        assert e.single == pytest.approx(1.0, abs=1e-9)


class TestUnconditional:
    def test_values(self):
        assert uncond_combined_distortion(1, 1, 1) == 0.5
        assert uncond_combined_distortion(1, 1, 10**9) < 1e-8

    @given(st.floats(0.1, 10), st.floats(0.01, 10), st.integers(1, 30))
    def test_information_form(self, var, N, K):
        assert uncond_combined_distortion(var, N, K) == pytest.approx(1 / (1 / var + K / N), rel=1e-12)

    @pytest.mark.parametrize("K", [2, 5])
    def test_md_beats_unconditional(self, K):
        for D_all in (0.05, 0.2, 0.5, 0.9):
            md, _ = md_min_sum_rate(1.0, D_all, K)
            assert md <= uncond_sum_rate(1.0, D_all, K) + 1e-9
            assert md >= gaussian_rdf(1.0, D_all) - 1e-9


def _table1_rates(M, K):
    return run_gaussian_trajectory(RoundPlan(K, M, DbUniform(0.1))).rate


class TestFeedback:
    def test_single_description_successive_refinement(self):
        rec = run_feedback_simulation(1.0, 1, 6, 0.3, ErasureTrace.all_received(1, 6))
        assert rec.final_distortion == pytest.approx(2 ** (-2 * 6 * 0.3), rel=1e-12)

    @pytest.mark.parametrize("M,K,eta", [(2, 2, 0.7854), (2, 5, 0.6407), (10, 2, 0.9457), (10, 5, 0.9121)])
    def test_table1(self, M, K, eta):
        rec = run_feedback_simulation(1.0, K, M, _table1_rates(M, K), ErasureTrace.all_received(K, M))
        assert rec.final_distortion == pytest.approx(0.1, rel=1e-12)
        assert gaussian_rdf(1.0, rec.final_distortion) / rec.received_rate == pytest.approx(eta, abs=5e-4)

    def test_total_erasure_round(self):
        trace = ErasureTrace.explicit(3, [(0, 1), (), (2,)])
        rec = run_feedback_simulation(1.0, 3, 3, 0.2, trace)
        assert rec.D[1] == rec.D[0]
        assert rec.received[1] == rec.received[0]
        assert rec.transmitted[1] > rec.transmitted[0]

    def test_malformed(self):
        with pytest.raises(ParameterError):
            ErasureTrace.explicit(2, [(0, 2)])
        with pytest.raises(ParameterError):
            ErasureTrace.explicit(2, [(1, 1)])
        with pytest.raises(ParameterError):
            run_feedback_simulation(1.0, 2, 3, 0.2, ErasureTrace.all_received(2, 2))
        with pytest.raises(ParameterError):
            run_feedback_simulation(1.0, 2, 2, 0.0, ErasureTrace.all_received(2, 2))

    def test_bernoulli_deterministic(self):
        a = ErasureTrace.from_model(4, 20, IidBernoulli(0.3, 9))
        assert a == ErasureTrace.from_model(4, 20, IidBernoulli(0.3, 9))
        assert 0.5 < a.counts.mean() / 4 < 0.9

    def test_sample_mode_matches_analytic(self):
        trace = ErasureTrace.from_model(3, 5, IidBernoulli(0.4, 1))
        ana = run_feedback_simulation(1.0, 3, 5, 0.25, trace)
        smp = run_feedback_simulation(1.0, 3, 5, 0.25, trace, mode="sample", seed=4)
        np.testing.assert_allclose(smp.D, ana.D, rtol=0.02)

    @settings(max_examples=60, deadline=None)
    @given(
        st.integers(1, 5),
        st.integers(1, 8),
        st.floats(0.01, 1.0),
        st.floats(0, 1),
        st.integers(0, 2**31),
    )
    def test_trace_invariants(self, K, M, r, p_loss, seed):
        trace = ErasureTrace.from_model(K, M, IidBernoulli(p_loss, seed))
        rec = run_feedback_simulation(1.0, K, M, r, trace)
        D = np.concatenate(([1.0], rec.D))
        steps = np.diff(D)
        assert np.all(steps <= 0)
        assert np.all(steps[rec.k >= 1] < 0)
        assert np.all(rec.received <= rec.transmitted + 1e-12)
        assert rec.received_excess() >= -1e-9
        # only the multiset of counts matters
        perm = np.random.default_rng(seed).permutation(M)
        shuffled = ErasureTrace(K, tuple(trace.received[i] for i in perm))
        assert run_feedback_simulation(1.0, K, M, r, shuffled).final_distortion == pytest.approx(rec.final_distortion, rel=1e-12)

    def test_identity_symmetry(self):
        base = run_feedback_simulation(1.0, 3, 2, 0.3, ErasureTrace.explicit(3, [(0,), (1, 2)]))
        for a, b in itertools.product(itertools.combinations(range(3), 1), itertools.combinations(range(3), 2)):
            rec = run_feedback_simulation(1.0, 3, 2, 0.3, ErasureTrace.explicit(3, [a, b]))
            assert rec.final_distortion == pytest.approx(base.final_distortion, rel=1e-14)

    @pytest.mark.parametrize("k_pattern", [None, "drop_first"])
    def test_excess_shrinks_with_rate(self, k_pattern):
        K, total = 3, 3.0
        excess = []
        for r in (0.5, 0.1, 0.02):
            M = round(total / (K * r))
            if k_pattern is None:
                trace = ErasureTrace.all_received(K, M)
            else:
                trace = ErasureTrace.explicit(K, [range(1, K)] * M)
            excess.append(run_feedback_simulation(1.0, K, M, r, trace).received_excess())
        assert all(e >= 0 for e in excess)
        assert excess[0] > excess[1] > excess[2]
