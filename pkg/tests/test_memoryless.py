"""Threshold family, exact evaluator, and both optimisers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankstop.core import evaluate_policy
from rankstop.exact_dp import optimal_value
from rankstop.memoryless import (
    CFamilySpec,
    ThresholdVector,
    expected_rank_exact,
    optimize_c,
    optimize_free,
    phi_family,
)


def analytic_n2(phi1: float) -> float:
    """Exact expected rank at n=2 with first threshold phi1."""
    return 1.0 + phi1**2 / 2.0 + (1.0 - phi1) ** 2 / 2.0


class TestPhiFamily:
    def test_direct_substitution(self):
        tv = phi_family(CFamilySpec(c=2.0, n=3))
        assert tv.phi == pytest.approx([0.5, 2 / 3, 1.0])

    def test_last_threshold_is_one(self):
        for c in (1.1, 1.9469, 7.0):
            assert phi_family(CFamilySpec(c=c, n=17)).phi[-1] == 1.0

    def test_first_threshold_large_n(self):
        tv = phi_family(CFamilySpec(c=1.9469, n=10**4))
        assert tv.phi[0] == pytest.approx(1.9469 / (10**4 - 1 + 1.9469), rel=1e-12)

    def test_rejects_c_at_most_one(self):
        with pytest.raises(ValueError):
            CFamilySpec(c=1.0, n=5)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=10**6))
def test_exact_value_is_a_valid_rank(n, seed):
    gen = np.random.default_rng(seed)
    phi = np.clip(gen.random(n), 1e-6, 1.0)
    phi[-1] = 1.0
    value = expected_rank_exact(ThresholdVector(n=n, phi=phi))
    assert 1.0 - 1e-12 <= value <= (n + 1) / 2 + 1e-12


class TestExpectedRankExact:
    def test_single_observation(self):
        assert expected_rank_exact(ThresholdVector(n=1, phi=np.array([1.0]))) == 1.0

    def test_n2_closed_form(self):
        tv = ThresholdVector(n=2, phi=np.array([0.5, 1.0]))
        assert expected_rank_exact(tv) == pytest.approx(1.25, abs=1e-12)
        assert expected_rank_exact(tv) == pytest.approx(analytic_n2(0.5), abs=1e-12)

    def test_matches_analytic_curve_at_n2(self):
        for phi1 in (0.1, 0.37, 0.8, 1.0):
            tv = ThresholdVector(n=2, phi=np.array([phi1, 1.0]))
            assert expected_rank_exact(tv) == pytest.approx(
                analytic_n2(phi1), abs=1e-12
            )

    def test_early_threshold_one_short_circuits(self):
        tv = ThresholdVector(n=4, phi=np.array([1.0, 0.5, 0.5, 1.0]))
        # everything is accepted at the first observation
        assert expected_rank_exact(tv) == pytest.approx(1.0 + 3.0 / 2.0, abs=1e-12)

    def test_family_constant_near_limit(self):
        # the quoted 2.3318 is the large-n limit; at n = 10^4 the exact
        # family value still sits 0.0021 below it
        tv = phi_family(CFamilySpec(c=1.9469, n=10**4))
        assert expected_rank_exact(tv) == pytest.approx(2.3318, abs=0.003)
        gaps = [
            abs(expected_rank_exact(phi_family(CFamilySpec(c=1.9469, n=n))) - 2.3318)
            for n in (10**4, 10**5)
        ]
        assert gaps[1] < gaps[0]  # still converging toward the limit

    def test_monotone_and_general_paths_agree(self):
        phi = np.sort(np.random.default_rng(3).random(50))
        phi[-1] = 1.0
        tv = ThresholdVector(n=50, phi=phi)
        fast_path = expected_rank_exact(tv)
        shuffled = phi.copy()
        shuffled[10], shuffled[11] = shuffled[11], shuffled[10]  # break monotonicity
        tv2 = ThresholdVector(n=50, phi=shuffled)
        slow_path = expected_rank_exact(tv2)
        assert np.isfinite(slow_path)
        tv3 = ThresholdVector(n=50, phi=phi.copy())
        assert expected_rank_exact(tv3) == pytest.approx(fast_path, rel=1e-12)

    def test_monte_carlo_agreement(self):
        cases = [
            phi_family(CFamilySpec(c=1.9469, n=5)),
            phi_family(CFamilySpec(c=3.0, n=37)),
            ThresholdVector(n=5, phi=np.array([0.6, 0.2, 0.5, 0.3, 1.0])),
        ]
        for i, tv in enumerate(cases):
            exact = expected_rank_exact(tv)
            rep = evaluate_policy(tv, tv.n, 1_000_000, seed=60 + i)
            assert abs(rep.mean_rank - exact) < 4 * rep.std_error


class TestOptimizeC:
    def test_headline_constants(self):
        res = optimize_c(10_000)
        assert res.c_star == pytest.approx(1.9469, abs=0.01)
        assert res.value == pytest.approx(2.3318, abs=0.003)

    def test_single_observation(self):
        assert optimize_c(1).value == 1.0

    def test_family_cannot_beat_free_optimum_at_n2(self):
        res = optimize_c(2)
        assert res.value >= 1.25 - 1e-12

    def test_distance_to_limit_shrinks_with_n(self):
        values = [optimize_c(n).value for n in (100, 1000, 10_000)]
        gaps = [abs(v - 2.3318) for v in values]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.003

    def test_large_n_value_in_proven_bracket(self):
        assert 2.29 < optimize_c(10_000).value < 2.34

    def test_interval_validation(self):
        with pytest.raises(ValueError):
            optimize_c(10, search_interval=(0.5, 2.0))


class TestOptimizeFree:
    def test_n1_and_n2(self):
        assert optimize_free(1).value == 1.0
        res = optimize_free(2)
        assert res.value == pytest.approx(1.25, abs=1e-6)
        assert res.vector.phi[0] == pytest.approx(0.5, abs=1e-3)

    def test_budget_cap(self):
        with pytest.raises(ValueError):
            optimize_free(21)

    def test_free_dominates_family(self):
        for n in (3, 8, 20):
            free = optimize_free(n).value
            for c in (1.2, 1.9469, 3.0, 6.0):
                fam = expected_rank_exact(phi_family(CFamilySpec(c=c, n=n)))
                assert free <= fam + 1e-9

    def test_free_values_nondecreasing_in_n(self):
        vals = [optimize_free(n).value for n in range(1, 13)]
        assert all(b - a > -1e-9 for a, b in zip(vals, vals[1:]))

    def test_bounded_below_by_full_history_optimum(self):
        for n in (2, 3, 4):
            assert optimize_free(n).value >= optimal_value(n).value - 1e-9
