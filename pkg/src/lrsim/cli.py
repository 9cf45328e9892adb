"""Command-line driver: sweep, fit, plan, verify, bounds, qsp-check, cheb, estimate.

Exit codes: 0 success, 2 validation/schema failure, 3 infeasible budget.
All outputs are deterministic for fixed seeds and inputs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import chebyshev, errorfit, estimate, planner, qsp
from .errors import BudgetInfeasibleError, LrsimError, SchemaError
from .lattice import BoundInputs, hamiltonian_from_json_dict
from .operators import spectral_norm
from .oracle import EvolutionRequest, evolve, heisenberg_staircase_sweep

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(path).write_text(text)


def _emit_json(path: str | None, doc: dict) -> None:
    _write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def _parse_ells(text: str) -> list[int]:
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(v) for v in text.split(",") if v != ""]


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.config:
        doc = json.loads(Path(args.config).read_text())
        allowed = {"n", "seed", "t_grid", "ells", "positions", "normalize"}
        if not set(doc) <= allowed:
            raise SchemaError(f"unknown config keys: {sorted(set(doc) - allowed)}")
        n = int(doc.get("n", args.n))
        seed = int(doc.get("seed", args.seed))
        ts = [float(v) for v in doc.get("t_grid", _parse_float_list(args.t_grid))]
        ells = [int(v) for v in doc.get("ells", _parse_ells(args.ells))]
        positions = doc.get("positions", args.positions)
        normalize = bool(doc.get("normalize", not args.no_normalize))
    else:
        n, seed = args.n, args.seed
        ts = _parse_float_list(args.t_grid)
        ells = _parse_ells(args.ells)
        positions = args.positions
        normalize = not args.no_normalize
    if n > 11:
        raise SchemaError("sweeps cap at n = 11")
    samples, _ = heisenberg_staircase_sweep(n, seed, ts, ells, positions, normalize)
    _write_text(args.output, errorfit.samples_to_csv(samples))
    return EXIT_OK


def _cmd_fit(args: argparse.Namespace) -> int:
    samples = errorfit.samples_from_csv(Path(args.samples).read_text())
    result = errorfit.fit(samples)
    _emit_json(args.output, result.to_json_dict())
    return EXIT_OK


def _load_fit(path: str | None) -> errorfit.FitModel | None:
    if path is None:
        return None
    return errorfit.fit_result_from_json_dict(json.loads(Path(path).read_text())).model


def _cmd_plan(args: argparse.Namespace) -> int:
    ham = hamiltonian_from_json_dict(json.loads(Path(args.hamiltonian).read_text()))
    model = _load_fit(args.fit)
    if args.staircase:
        a, b = (int(v) for v in args.staircase.split(","))
        plan = planner.plan_staircase_1d(ham, args.t, a, b, model)
    elif args.merged_reps > 1:
        plan = planner.plan_merged_stacks(ham, args.t, args.ell, args.merged_reps, model=model)
    elif ham.lattice.boundary == "periodic":
        plan = planner.plan_ring_1d(ham, args.t, args.ell, model)
    else:
        plan = planner.plan_recursive_1d(ham, args.t, args.ell, args.block, model)
    _write_text(args.output, planner.plan_dumps(plan) + "\n")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    ham = hamiltonian_from_json_dict(json.loads(Path(args.hamiltonian).read_text()))
    plan = planner.plan_from_json_dict(json.loads(Path(args.plan).read_text()), ham.n)
    applied = planner.apply_plan(plan, ham)
    sim_time = plan.simulated_time(ham.n)
    exact = evolve(EvolutionRequest(ham, 0.0, sim_time))
    distance = spectral_norm(applied.matrix - exact.matrix)
    passed = bool(distance <= max(plan.predicted_error, 1e-12))
    _emit_json(
        args.output,
        {
            "simulated_time": sim_time,
            "spectral_distance": distance,
            "predicted_error": plan.predicted_error,
            "error_source": plan.error_source,
            "pass": passed,
        },
    )
    return EXIT_OK if passed else EXIT_VALIDATION


def _cmd_bounds(args: argparse.Namespace) -> int:
    inputs = BoundInputs(
        zeta0=args.zeta0, zeta=args.zeta, mu=args.mu, eta=args.eta, k_cap=args.kcap, degree=args.degree
    )
    q = bounds_mod.BoundQuery(
        inputs, args.t, args.ell, x_size=args.x_size, norm_a=args.norm_a, norm_b=args.norm_b
    )
    doc = {
        "strict": bounds_mod.bound_strict_local(q),
        "strict_restriction": bounds_mod.bound_strict_local(q, "restriction"),
        "commutator_aware": bounds_mod.bound_commutator_aware(q),
        "commutator_aware_restriction": bounds_mod.bound_commutator_aware(q, "restriction"),
        "strict_tail": bounds_mod.bound_strict_commutator_tail(
            inputs.k_cap, args.t, float(args.ell), args.norm_b
        ),
    }
    if args.solve_eps is not None:
        doc["overlap_for_eps"] = bounds_mod.solve_overlap(
            args.solve_eps, args.t, inputs, args.solve_kind, x_size=args.x_size,
            norm_a=args.norm_a, norm_b=args.norm_b,
        )
    _emit_json(args.output, doc)
    return EXIT_OK


def _cmd_qsp_check(args: argparse.Namespace) -> int:
    trunc = qsp.jacobi_anger(args.alpha_t, args.epsilon)
    thetas = np.linspace(0.0, 2 * np.pi, args.grid)
    sup = max(
        abs(np.exp(-1j * args.alpha_t * np.sin(th)) - trunc.series_value(th)) for th in thetas
    )
    doc = {
        "q": trunc.order,
        "stated_bound": trunc.error_bound,
        "tight_tail_bound": trunc.tight_tail_bound(),
        "measured_sup_error": float(sup),
        "pass": bool(sup <= trunc.error_bound),
    }
    _emit_json(args.output, doc)
    return EXIT_OK if doc["pass"] else EXIT_VALIDATION


_CHEB_FUNCTIONS = {
    "exp": (math.exp, lambda rho: math.exp((rho + 1 / rho) / 2)),
    "cos": (math.cos, lambda rho: math.cosh((rho - 1 / rho) / 2)),
}


def _cmd_cheb(args: argparse.Namespace) -> int:
    if args.function not in _CHEB_FUNCTIONS:
        raise SchemaError(f"unknown function {args.function!r}; choose from {sorted(_CHEB_FUNCTIONS)}")
    f, sup_m = _CHEB_FUNCTIONS[args.function]
    bound_m = args.sup_m if args.sup_m is not None else sup_m(args.rho)
    degree = chebyshev.degree_for_accuracy(args.rho, bound_m, args.epsilon)
    expansion = chebyshev.expand(f, args.rho, bound_m, degree)
    xs = np.linspace(-1.0, 1.0, args.grid)
    sup = float(np.max(np.abs(chebyshev.evaluate_many(expansion, xs) - np.array([f(x) for x in xs]))))
    bound = chebyshev.truncation_bound(args.rho, bound_m, degree)
    doc = {
        "degree": degree,
        "lemma_bound": bound,
        "measured_sup_error": sup,
        "decay_ok": expansion.decay_ok,
        "pass": bool(sup <= bound),
    }
    _emit_json(args.output, doc)
    return EXIT_OK if doc["pass"] else EXIT_VALIDATION


def _cmd_estimate(args: argparse.Namespace) -> int:
    model = _load_fit(args.fit)
    if model is None:
        raise SchemaError("estimate requires --fit (a fitted error model)")
    report = estimate.heisenberg_estimate(
        n=args.n,
        total_time=args.total_time,
        eps=args.epsilon,
        ell=args.ell,
        model=model,
        merged=args.merged,
        seed=args.seed,
        t_max=args.t_max,
        budget_split=args.budget_split,
        uniform_prep=args.uniform_prep,
    )
    _emit_json(args.output, report.to_json_dict())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lrsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="staircase-error grid for the Heisenberg benchmark (CSV)")
    p.add_argument("--n", type=int, default=11)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--t-grid", default="0.5,1,2")
    p.add_argument("--ells", default="2:7")
    p.add_argument("--positions", choices=["proper", "all"], default="proper")
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--config", default=None, help="JSON config overriding the flags")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("fit", help="fit the error model to a sweep CSV")
    p.add_argument("--samples", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("plan", help="compile a decomposition plan (JSON)")
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--ell", type=int, default=4)
    p.add_argument("--block", type=int, default=8)
    p.add_argument("--staircase", default=None, help="a,b for a single 3-step staircase")
    p.add_argument("--merged-reps", type=int, default=1)
    p.add_argument("--fit", default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("verify", help="apply a plan and compare against exact evolution")
    p.add_argument("--plan", required=True)
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("bounds", help="evaluate the analytic Lieb-Robinson bounds")
    p.add_argument("--zeta0", type=float, required=True)
    p.add_argument("--zeta", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--kcap", type=float, default=0.0)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--x-size", type=int, default=1)
    p.add_argument("--norm-a", type=float, default=1.0)
    p.add_argument("--norm-b", type=float, default=1.0)
    p.add_argument("--solve-eps", type=float, default=None)
    p.add_argument("--solve-kind", default="strict")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("qsp-check", help="Jacobi-Anger truncation order and measured sup error")
    p.add_argument("--alpha-t", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--grid", type=int, default=1001)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_qsp_check)

    p = sub.add_parser("cheb", help="Chebyshev degree selection and measured grid error")
    p.add_argument("--function", default="exp")
    p.add_argument("--rho", type=float, default=2.0)
    p.add_argument("--sup-m", type=float, default=None)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--grid", type=int, default=1001)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_cheb)

    p = sub.add_parser("estimate", help="block-decomposition gate-cost report (JSON)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--T", dest="total_time", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--fit", required=True)
    p.add_argument("--merged", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-max", type=float, default=1.0)
    p.add_argument("--budget-split", type=float, default=3.0)
    p.add_argument("--uniform-prep", action="store_true")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_estimate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetInfeasibleError as exc:
        print(f"budget infeasible: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (SchemaError, LrsimError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
