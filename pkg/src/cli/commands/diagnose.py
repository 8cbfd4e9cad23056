"""
diagnose: DPGM 수렴 기록 (step norm, 목적 함수, KL descent gap) CSV
"""

import argparse
from dataclasses import replace

from core.harness.diagnostics import (
    convergence_diagnostics,
    diagnostic_instance,
    initial_objective,
    stable_params,
    write_diagnostics,
)
from core.solvers.dpgm import stability_bound
from core.solvers.strategy import SolverParams

from ..deps import add_common_args, add_gen_args, build_experiment, emit_json


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "diagnose",
        help="per-iteration DPGM convergence log",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    add_common_args(parser)
    add_gen_args(parser)
    parser.add_argument("--iterations", type=int, default=200, help="DPGM iterations T_max")
    parser.add_argument("--lam", type=float, default=1.0, help="entropy weight")
    parser.add_argument("--beta", type=float, default=None, help="step size (default: 0.9 x stability bound)")
    parser.add_argument("--sinkhorn-T", type=int, default=100, help="Sinkhorn rounds per step")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    spec = build_experiment(args, "convergence")
    gen = spec.gen if args.n_in is not None else replace(spec.gen, n_in=10, k=min(spec.gen.k, 9))
    M = diagnostic_instance(gen, spec.affinity.sigma_aff)
    if args.beta is None:
        params = stable_params(M, lam=args.lam, max_iter=args.iterations, sinkhorn_T=args.sinkhorn_T)
    else:
        params = SolverParams.from_beta_lambda(
            args.beta, args.lam, max_iter=args.iterations, sinkhorn_T=args.sinkhorn_T
        )

    rows = convergence_diagnostics(M, params, args.iterations)
    output = spec.output if args.output else "diagnostics.csv"
    write_diagnostics(output, rows)
    emit_json(
        {
            "output": output,
            "stability_bound": stability_bound(M),
            "w_p": params.w_p,
            "w_z": params.w_z,
            "initial_objective": initial_objective(M, params),
            "final_objective": rows[-1].objective if rows else None,
            "final_running_mean": rows[-1].running_mean if rows else None,
        }
    )
    return 0
