"""Command-line surface for every experiment.

Machine-readable JSON goes to stdout, a one-line human summary to
stderr.  Exit codes: 0 success, 2 argument errors, 3 resource-bound
refusals (requests outside a documented feasibility budget).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import core
from .cloud import CloudPolicy, PerturbScales, SearchConfig, winner_rule_search
from .errors import ResourceBoundError
from .exact_dp import optimal_value, secretary_rule, secretary_rule_sum_form, truncated_value
from .memoryless import CFamilySpec, optimize_c, optimize_free, phi_family
from .ode import OdeProblem, ode_solve
from .poisson import ContinuousThreshold, HTable, h_from_simulation, value_W


def _emit(payload: dict, summary: str) -> None:
    print(json.dumps(payload))
    print(summary, file=sys.stderr)


def _cmd_exact(args) -> int:
    ev = optimal_value(args.n, tol=args.tol)
    _emit(
        {"n": ev.n, "value": ev.value, "method": ev.method,
         "error_bound": ev.quadrature_error_bound},
        f"v_{ev.n} = {ev.value:.6f} ({ev.method}, +-{ev.quadrature_error_bound:.1e})",
    )
    return 0


def _cmd_secretary(args) -> int:
    rule = secretary_rule_sum_form(args.n) if args.sum_form else secretary_rule(args.n)
    variant = "sum-form" if args.sum_form else "backward-induction"
    _emit(
        {"n": rule.n, "cutoff": rule.cutoff, "success_prob": rule.success_prob,
         "variant": variant},
        f"cutoff {rule.cutoff}, win probability {rule.success_prob:.6f} ({variant})",
    )
    return 0


def _cmd_truncate(args) -> int:
    spec = truncated_value(args.n, args.level)
    _emit(
        {"n": spec.n, "level": spec.level, "value": spec.value,
         "method": "truncated-dp", "error_bound": 1e-6},
        f"truncated value v_{spec.n}({spec.level}) = {spec.value:.6f}",
    )
    return 0


def _cmd_ml_opt(args) -> int:
    if args.free:
        res = optimize_free(args.n)
        fam = optimize_c(args.n, search_interval=(args.c_min, args.c_max))
        _emit(
            {"n": args.n, "phi": res.vector.phi.tolist(), "value": res.value,
             "tolerance": 1e-5, "converged": res.converged,
             "family_value": fam.value, "family_gap": fam.value - res.value},
            f"free optimum at n={args.n}: value {res.value:.6f} "
            f"({res.sweeps} sweeps; one-parameter family gives {fam.value:.6f})",
        )
    else:
        res = optimize_c(args.n, search_interval=(args.c_min, args.c_max))
        _emit(
            {"n": args.n, "c_star": res.c_star, "value": res.value,
             "tolerance": 1e-4, "unimodal": res.unimodal},
            f"family optimum at n={args.n}: c*={res.c_star:.4f}, "
            f"value {res.value:.6f}",
        )
    return 0


def _cmd_correlate(args) -> int:
    k = args.k if args.k is not None else max(1, args.n // 2)
    est = core.correlation_check(args.n, args.reps, k, args.seed)
    theory = math.sqrt((args.n - 1) / (args.n + 1))
    _emit(
        {"n": args.n, "k": k, "replications": args.reps, "estimate": est,
         "theory": theory},
        f"corr(X_{k}, R_{k}) at n={args.n}: {est:.5f} (theory {theory:.5f})",
    )
    return 0


def _cmd_cloud_search(args) -> int:
    config = SearchConfig(
        n=args.n,
        batch=args.batch,
        rounds=args.rounds,
        seed=args.seed,
        scales=PerturbScales(width_seed=args.width_seed),
        single_run=args.single_run,
    )
    state = winner_rule_search(config)
    for rec in state.history:
        print(
            json.dumps(
                {
                    "round": rec.round,
                    "policy": dataclasses.asdict(rec.policy),
                    "mean": rec.mean,
                    "se": rec.se,
                    "kept_or_perturbed": rec.action,
                }
            )
        )
    print(
        f"best mean {state.best_value:.4f} vs U={state.baseline_u} "
        f"after {len(state.history)} rounds",
        file=sys.stderr,
    )
    return 0


def _cmd_poisson_w(args) -> int:
    ct = ContinuousThreshold(c=args.c, horizon=args.t)
    res = value_W(ct)
    _emit(
        {"c": args.c, "t": args.t, "value": res.value,
         "error_estimate": res.error_estimate},
        f"threshold-play value W(c={args.c}, t={args.t}) = {res.value:.5f}",
    )
    return 0


def _load_h(spec: str, args):
    if spec == "zero":
        return None
    if spec == "sim":
        grid_t = np.array([2.0, 5.0, 10.0, 20.0, 40.0])
        grid_x = np.linspace(0.0, 1.0, 21)
        return h_from_simulation(grid_t, grid_x, args.table_reps, args.seed)
    if spec.startswith("table:"):
        return HTable.from_json(Path(spec[len("table:"):]).read_text())
    raise ValueError(f"unknown h spec {spec!r} (use zero, sim, or table:PATH)")


def _cmd_ode(args) -> int:
    h_model = _load_h(args.h, args)
    if args.save_table and h_model is not None:
        Path(args.save_table).write_text(h_model.to_json())
    problem = OdeProblem(t_max=args.tmax, h_model=h_model, rtol=args.rtol,
                         atol=args.atol)
    res = ode_solve(problem)
    _emit(
        {
            "t_max": args.tmax,
            "h": args.h,
            "limit_estimate": res.limit_estimate,
            "steady_state": res.steady_state,
            "error_estimate": res.error_estimate,
            "w_end": float(res.w[-1]),
        },
        f"limit estimate {res.limit_estimate:.4f} "
        f"(steady state {res.steady_state:.4f})",
    )
    return 0


def _cmd_play(args) -> int:
    from .namur import default_basket, new_session

    basket = default_basket()
    session = new_session(args.m, basket, args.seed)
    width = 60
    print(f"Basket: {basket.names()}; N hidden in 1..{args.m}", file=sys.stderr)
    while not session.closed:
        arrival = session.advance()
        seen = session.arrivals_seen()
        axis = ["."] * width
        for a in seen:
            pos = min(width - 1, int(a["t"] * width))
            axis[pos] = str(a["rel_rank"] % 10)
        print(f"a[{''.join(axis)}]b", file=sys.stderr)
        print(
            f"arrival {session.revealed}: t={arrival['t']:.3f} "
            f"relative rank {arrival['rel_rank']}",
            file=sys.stderr,
        )
        if session.revealed == session.n_total:
            print("(this is the last arrival)", file=sys.stderr)
        answer = input("accept? [y/N] ").strip().lower()
        session.decide(answer == "y")
    record = session.record()
    _emit(record, f"closed: final rank {record['outcome']['final_rank']} "
                  f"of N={record['outcome']['N']} (F={record['outcome']['true_F']})")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app, parse_config

    if args.config:
        config = parse_config(args.config)
    else:
        config = ServiceConfig(bind=args.bind, data_dir=args.data_dir)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankstop",
        description="Sequential selection laboratory: exact rank optima, "
        "threshold families, cloud-override search, Poisson embedding, and "
        "the Namur game.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="optimal expected rank v_n for n <= 4")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(fn=_cmd_exact)

    p = sub.add_parser("secretary", help="best-choice cutoff rule")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sum-form", action="store_true",
                   help="use the harmonic sum-condition variant")
    p.set_defaults(fn=_cmd_secretary)

    p = sub.add_parser("truncate", help="optimal truncated-loss value")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--level", type=int, required=True)
    p.set_defaults(fn=_cmd_truncate)

    p = sub.add_parser("ml-opt", help="memoryless threshold optimisation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--family", choices=["c"], default=None,
                   help="optimise the one-parameter family (default)")
    p.add_argument("--free", action="store_true",
                   help="optimise all thresholds (n <= 20)")
    p.add_argument("--c-min", type=float, default=1.05)
    p.add_argument("--c-max", type=float, default=8.0)
    p.set_defaults(fn=_cmd_ml_opt)

    p = sub.add_parser("correlate", help="Monte Carlo corr(X_k, R_k)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, default=1_000_000)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(fn=_cmd_correlate)

    p = sub.add_parser("cloud-search", help="randomized winner's-rule search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rounds", type=int, default=200)
    p.add_argument("--batch", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--width-seed", type=float, default=0.01,
                   help="width a zero window jumps to when first perturbed")
    p.add_argument("--single-run", action="store_true",
                   help="score rounds by a single game instead of a batch")
    p.set_defaults(fn=_cmd_cloud_search)

    p = sub.add_parser("poisson-w", help="threshold-play value in the "
                                         "Poisson embedding")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(fn=_cmd_poisson_w)

    p = sub.add_parser("ode", help="horizon-evolution equation solver")
    p.add_argument("--h", default="zero",
                   help="zero, sim, or table:PATH")
    p.add_argument("--tmax", type=float, default=1000.0)
    p.add_argument("--rtol", type=float, default=1e-6)
    p.add_argument("--atol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--table-reps", type=int, default=5000)
    p.add_argument("--save-table", default=None,
                   help="persist a simulated h table to this path")
    p.set_defaults(fn=_cmd_ode)

    p = sub.add_parser("play", help="play one game in the terminal")
    p.add_argument("--m", type=int, default=30)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=_cmd_play)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--config", default=None)
    p.add_argument("--bind", default="127.0.0.1:8732")
    p.add_argument("--data-dir", default="./namur-data")
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        args.seed = int.from_bytes(__import__("os").urandom(4), "big")
    try:
        return args.fn(args)
    except ResourceBoundError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
