"""Acceptance suite: one test per exit criterion, stated tolerances.

Each test prints a PASS/FAIL line (visible with ``pytest -s`` or in the
captured output of a failing run), so the whole gate reads as a
checklist.  Monte Carlo criteria use counted replications and empirical
standard errors; exact criteria pin their tolerances directly.
"""

import itertools
import math
import sys
from fractions import Fraction

import numpy as np
import pytest

from rankstop import core, rng
from rankstop.cloud import CloudPolicy, PerturbScales, SearchConfig, evaluate_batch, winner_rule_search
from rankstop.exact_dp import optimal_value, secretary_rule, secretary_success_prob
from rankstop.memoryless import CFamilySpec, expected_rank_exact, optimize_c, optimize_free, phi_family
from rankstop.namur import CompatibilityLedger, Objective, TOP_PERCENT, default_basket, fit_distribution, load_default_table
from rankstop.namur.basket import CdfEntry, DistributionBasket
from rankstop.ode import OdeProblem, ode_solve
from rankstop.poisson import ContinuousThreshold, h_from_simulation, mc_threshold_value, value_W

from test_exact_dp import brute_force_secretary, grid_oracle_v3
from test_namur import play_machine


def check(name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}: {name} ({detail})"
    print(line, file=sys.stderr)
    assert ok, line


def test_correlation_law():
    """corr(X_k, R_k) = sqrt((n-1)/(n+1)) at n in {2, 3, 99}, 1e6 reps,
    within 5 empirical standard errors."""
    batches = 50
    per_batch = 20_000
    for n, k in ((2, 1), (3, 2), (99, 50)):
        theory = math.sqrt((n - 1) / (n + 1))
        estimates = np.array(
            [
                core.correlation_check(n, per_batch, k, seed=1_000 * n + b)
                for b in range(batches)
            ]
        )
        mean = estimates.mean()
        se = estimates.std(ddof=1) / math.sqrt(batches)
        check(
            f"correlation law n={n}",
            abs(mean - theory) < 5 * se,
            f"estimate {mean:.6f} vs {theory:.6f}, 5se={5 * se:.2e}",
        )


def test_memoryless_constants():
    """optimize_c at n=1e4: c* = 1.9469 +- 0.01, value = 2.3318 +- 0.003."""
    res = optimize_c(10_000)
    check(
        "memoryless family constants",
        abs(res.c_star - 1.9469) <= 0.01 and abs(res.value - 2.3318) <= 0.003,
        f"c*={res.c_star:.4f}, value={res.value:.4f}",
    )


def test_exact_small_n():
    """v1 exact; v2 vs analytic oracle 1e-6; v3 vs grid oracle 1e-3;
    v4 error bound <= 1e-3 with v3 <= v4 <= 3.869."""
    v1 = optimal_value(1)
    check("exact v1", v1.value == 1.0, f"v1={v1.value}")
    # analytic oracle: accept x iff x <= 1/2; two linear pieces
    oracle_v2 = (0.5 + 0.5**2 / 2.0) + (2.0 * 0.5 - (1.0 - 0.5**2) / 2.0)
    v2 = optimal_value(2)
    check("exact v2", abs(v2.value - oracle_v2) <= 1e-6,
          f"v2={v2.value:.8f} vs oracle {oracle_v2}")
    v3 = optimal_value(3)
    oracle3 = grid_oracle_v3()
    check("exact v3 vs grid oracle", abs(v3.value - oracle3) <= 1e-3,
          f"v3={v3.value:.6f} vs {oracle3:.6f}")
    v4 = optimal_value(4)
    check(
        "exact v4 bound and ordering",
        v4.quadrature_error_bound <= 1e-3 and v3.value <= v4.value <= 3.869,
        f"v4={v4.value:.6f} +-{v4.quadrature_error_bound:.1e}",
    )


def test_dominance_suite():
    """v_n <= free optimum for n in {2,3,4}; free optima nondecreasing;
    family value at n=1e4 inside (2.29, 2.34)."""
    frees = {n: optimize_free(n).value for n in (2, 3, 4)}
    ok = all(optimal_value(n).value <= frees[n] + 1e-9 for n in (2, 3, 4))
    ok = ok and frees[2] <= frees[3] <= frees[4]
    check("dominance v_n <= free_n, free nondecreasing", ok,
          f"free={ {n: round(v, 5) for n, v in frees.items()} }")
    fam = expected_rank_exact(phi_family(CFamilySpec(c=optimize_c(10_000).c_star, n=10_000)))
    check("family value in proven bracket", 2.29 < fam < 2.34, f"value={fam:.4f}")


def test_secretary_criterion():
    """Rational-arithmetic match with full enumeration for n <= 7; 1/e
    within 1e-3 at n = 1e4."""
    ok = True
    for n in range(1, 8):
        rule = secretary_rule(n)
        exact = secretary_success_prob(n, rule.cutoff)
        brute = brute_force_secretary(n, rule.cutoff)
        ok = ok and isinstance(exact, Fraction) and exact == brute
    check("secretary exact n<=7", ok, "formula == enumeration as Fractions")
    big = secretary_rule(10_000)
    check(
        "secretary 1/e asymptote",
        abs(big.success_prob - 1.0 / math.e) < 1e-3,
        f"P={big.success_prob:.6f} vs 1/e={1.0 / math.e:.6f}",
    )


def test_baseline_identity():
    """Zero cloud parameters = memoryless rule decision-for-decision on
    1e3 instances; batch mean at n=1e4 within 4 se of 2.3318."""
    n = 120
    zero = CloudPolicy()
    tv = phi_family(CFamilySpec(c=1.9469, n=n))
    mismatches = 0
    for s in range(1_000):
        inst = core.sample_instance(n, seed=777_000 + s)
        for k in range(1, n + 1):
            x = float(inst.values[k - 1])
            hist = inst.values[: k - 1]
            base = True if k == n else tv.decide(k, x, hist, n)
            mismatches += zero.decide(k, x, hist, n) != base
    check("baseline identity decisions", mismatches == 0,
          f"{mismatches} mismatches over 1000 instances")
    mean, se = evaluate_batch(zero, 10_000, 120_000, seed=4242)
    check(
        "baseline batch mean near 2.3318",
        abs(mean - 2.3318) < 4 * se,
        f"mean={mean:.4f}, 4se={4 * se:.4f}",
    )


def rigged_two_point_evaluator(target: int, trial_seed: int):
    def evaluate(policy: CloudPolicy, r: int):
        gen = rng.stream(trial_seed, "rig", r, policy.theta_pre)
        mean = 2.0 if policy.theta_pre == target else 3.0
        return mean + 0.05 * float(gen.standard_normal()), 0.05

    return evaluate


def test_winner_rule_soundness():
    """On the rigged two-point environment the dominant parameter's
    occupancy strictly increases across successive 100-round windows in
    at least 95 of 100 seeded trials."""
    passes = 0
    for trial in range(100):
        cfg = SearchConfig(
            n=10,
            batch=1,
            rounds=200,
            seed=50_000 + trial,
            scales=PerturbScales(
                d_pc=0.0, p_pc=0.0, accept_margin=0.0, count_step=1, count_max=8
            ),
        )
        state = winner_rule_search(
            cfg, evaluator=rigged_two_point_evaluator(4, 50_000 + trial)
        )
        occ = [
            sum(r.policy.theta_pre == 4 for r in state.history[i : i + 100]) / 100.0
            for i in (0, 100)
        ]
        passes += occ[1] > occ[0]
    check("winner's-rule occupancy growth", passes >= 95, f"{passes}/100 trials")


def test_poisson_cross_validation():
    """Threshold-play value formula equals simulation within 4 se at
    1e5 replications on the (c, t) grid {1.5, 2} x {5, 20}."""
    for c, t in itertools.product((1.5, 2.0), (5.0, 20.0)):
        ct = ContinuousThreshold(c=c, horizon=t)
        w = value_W(ct).value
        mean, se = mc_threshold_value(ct, 100_000, seed=int(100 * c + t))
        check(
            f"poisson W cross-validation c={c} t={t}",
            abs(mean - w) < 4 * se,
            f"W={w:.4f}, mc={mean:.4f}, 4se={4 * se:.4f}",
        )


def test_ode_criterion():
    """Zero gap: limit 1.0 +- 0.01 at t_max=1e3; tolerance halving stays
    within the reported error; simulated-table limit in (1.0, 3.87)."""
    base = OdeProblem(t_max=1_000.0)
    res = ode_solve(base)
    check("ode zero-gap limit", abs(res.limit_estimate - 1.0) <= 0.01,
          f"limit={res.limit_estimate:.5f}")
    halved = ode_solve(OdeProblem(t_max=1_000.0, rtol=base.rtol / 2, atol=base.atol / 2))
    check(
        "ode tolerance-halving self-consistency",
        abs(res.limit_estimate - halved.limit_estimate) < res.error_estimate,
        f"shift={abs(res.limit_estimate - halved.limit_estimate):.2e} "
        f"< {res.error_estimate:.2e}",
    )
    table = h_from_simulation(
        np.array([2.0, 5.0, 10.0, 20.0, 40.0]),
        np.linspace(0.0, 1.0, 21),
        4_000,
        seed=616,
    )
    res_t = ode_solve(OdeProblem(t_max=1_000.0, h_model=table))
    check(
        "ode simulated-table limit in (1.0, 3.87)",
        1.0 < res_t.limit_estimate < 3.87,
        f"limit={res_t.limit_estimate:.4f}",
    )


def test_namur_inference_criterion():
    """Distribution fit picks the true entry >= 99 percent at 1e3
    samples; scripted-player identification >= 80 percent of trials."""
    basket = DistributionBasket(
        entries=(
            CdfEntry(name="uniform", family="uniform"),
            CdfEntry(name="ramp", family="power", params={"k": 2.0}),
        )
    )
    trials = 1_000
    hits = 0
    for i in range(trials):
        data = basket.entries[1].sample(rng.stream(880_000 + i, "acc-fit"), 1_000)
        hits += fit_distribution(data, basket) == 1
    check("distribution fit consistency", hits / trials >= 0.99,
          f"{hits}/{trials} correct")

    objective = Objective(TOP_PERCENT, 20.0)
    table = load_default_table()
    wins = 0
    trials = 50
    for trial in range(trials):
        ledger = CompatibilityLedger()
        for g in range(50):
            s = play_machine(objective, seed=900_000 + trial * 1_000 + g, table=table)
            ledger.update(s.outcome_rank, s.n_total)
        top = ledger.argmax()
        wins += top.kind == TOP_PERCENT and top.param in (10.0, 20.0, 30.0)
    check("secret-objective identification", wins / trials >= 0.8,
          f"{wins}/{trials} grid-adjacent argmax")
