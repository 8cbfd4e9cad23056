"""
sample-sweep: EQAN-R 샘플링 비율 gamma 에 따른 정확도 (CSV)
"""

import argparse

from core.harness.matchers import load_model_matcher
from core.harness.sampling_sweep import DEFAULT_GAMMAS, run_sampling_sweep
from db.run_registry import RunRegistry

from ..deps import add_common_args, add_eval_args, add_gen_args, build_experiment, emit_json


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "sample-sweep",
        help="accuracy of an eqan-r checkpoint across sampling ratios",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    add_common_args(parser)
    add_gen_args(parser)
    add_eval_args(parser)
    parser.add_argument("--checkpoint", required=True, help="eqan-r checkpoint path")
    parser.add_argument("--grid", type=float, nargs="+", default=None, help="gamma values (default: built-in grid)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    spec = build_experiment(args, "sampling-sweep", default_grid=DEFAULT_GAMMAS)
    model = load_model_matcher(spec.checkpoint).model
    rows = run_sampling_sweep(spec, model, registry=RunRegistry(args.registry), label=spec.checkpoint)
    emit_json([row.to_csv_row() for row in rows])
    return 0
