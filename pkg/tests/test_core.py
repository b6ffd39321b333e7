"""Instance generation, rank accounting, and Monte Carlo evaluation."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rankstop import core


class AlwaysFirst:
    def decide(self, k, x, history, n):
        return True


class NeverAccept:
    def decide(self, k, x, history, n):
        return False


def enumeration_mean_rank(n: int, accept_at: int) -> float:
    """Average final rank of the accept_at-th observation over all orders."""
    total = 0
    for perm in itertools.permutations(range(1, n + 1)):
        total += perm[accept_at - 1]
    return total / math.factorial(n)


class TestSampleInstance:
    def test_single_observation(self):
        inst = core.sample_instance(1, seed=0)
        assert inst.n == 1
        assert 0.0 <= inst.values[0] <= 1.0
        rv = core.rank_view(inst.values)
        assert rv.relative_ranks[0] == 1
        assert rv.final_ranks[0] == 1

    def test_fixed_seed_reproduces(self):
        a = core.sample_instance(5, seed=123)
        b = core.sample_instance(5, seed=123)
        assert np.array_equal(a.values, b.values)

    def test_large_sample_mean(self):
        inst = core.sample_instance(10**6, seed=7)
        bound = 3.0 * (1.0 / math.sqrt(12.0)) / 1000.0
        assert abs(inst.values.mean() - 0.5) < bound

    def test_timed_arrivals_increasing(self):
        inst = core.sample_instance(200, seed=3, timed=True, horizon=5.0)
        assert np.all(np.diff(inst.arrival_times) > 0)
        assert inst.arrival_times[0] >= 0.0
        assert inst.arrival_times[-1] <= 5.0

    def test_zero_n_rejected(self):
        with pytest.raises(ValueError):
            core.sample_instance(0, seed=1)


class TestLossOf:
    def test_direct_count(self):
        inst = core.GameInstance(n=3, values=np.array([0.2, 0.7, 0.4]))
        assert core.loss_of(inst, 3) == 2

    def test_argmin_has_rank_one(self):
        inst = core.sample_instance(50, seed=11)
        argmin = int(np.argmin(inst.values)) + 1
        assert core.loss_of(inst, argmin) == 1

    def test_losses_are_a_permutation(self):
        inst = core.sample_instance(12, seed=5)
        losses = sorted(core.loss_of(inst, k) for k in range(1, 13))
        assert losses == list(range(1, 13))
        assert sum(losses) == 12 * 13 // 2

    def test_out_of_range_index(self):
        inst = core.sample_instance(3, seed=1)
        with pytest.raises(ValueError):
            core.loss_of(inst, 0)
        with pytest.raises(ValueError):
            core.loss_of(inst, 4)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
        min_size=1,
        max_size=30,
    )
)
def test_ranks_stay_a_permutation_under_ties(values):
    rv = core.rank_view(np.array(values))
    assert sorted(rv.final_ranks.tolist()) == list(range(1, len(values) + 1))
    for k, r in enumerate(rv.relative_ranks, start=1):
        assert 1 <= r <= k


def test_tie_break_is_by_arrival_index():
    rv = core.rank_view(np.array([0.5, 0.5, 0.5]))
    assert rv.final_ranks.tolist() == [1, 2, 3]


class TestEvaluatePolicy:
    def test_always_first_n2(self):
        exact = enumeration_mean_rank(2, accept_at=1)
        assert exact == 1.5
        rep = core.evaluate_policy(AlwaysFirst(), 2, 200_000, seed=2)
        assert abs(rep.mean_rank - exact) < 4 * rep.std_error

    def test_optimal_n2_rule(self):
        class HalfRule:
            def decide(self, k, x, history, n):
                return x <= 0.5

        rep = core.evaluate_policy(HalfRule(), 2, 300_000, seed=3)
        assert abs(rep.mean_rank - 1.25) < 4 * rep.std_error

    def test_single_observation(self):
        rep = core.evaluate_policy(NeverAccept(), 1, 500, seed=4)
        assert rep.mean_rank == 1.0
        assert rep.std_error == 0.0

    def test_forced_acceptance_at_horizon(self):
        rep = core.evaluate_policy(NeverAccept(), 2, 100_000, seed=5)
        assert abs(rep.mean_rank - 1.5) < 4 * rep.std_error

    def test_mean_rank_within_bounds(self):
        for policy in (AlwaysFirst(), NeverAccept()):
            rep = core.evaluate_policy(policy, 6, 2_000, seed=6)
            assert 1.0 <= rep.mean_rank <= 6.0

    def test_report_records_generator_and_seed(self):
        rep = core.evaluate_policy(AlwaysFirst(), 3, 100, seed=9)
        assert rep.generator == "philox4x64"
        assert rep.seed == 9
        assert rep.replications == 100

    def test_replicates_are_order_independent(self):
        a = core.evaluate_policy(AlwaysFirst(), 4, 10_000, seed=8)
        b = core.evaluate_policy(AlwaysFirst(), 4, 10_000, seed=8)
        assert a == b

    def test_argument_validation(self):
        with pytest.raises(ValueError):
            core.evaluate_policy(AlwaysFirst(), 3, 0, seed=1)


class TestCorrelation:
    def test_small_n_matches_theory(self):
        for n, k in ((2, 1), (3, 2)):
            est = core.correlation_check(n, 150_000, k, seed=10)
            theory = math.sqrt((n - 1) / (n + 1))
            assert abs(est - theory) < 0.01

    def test_rejects_degenerate_n(self):
        with pytest.raises(ValueError):
            core.correlation_check(1, 100, 1, seed=1)
