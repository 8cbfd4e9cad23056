"""
ablate: 구조 ablation variant 학습/평가 (CSV)
"""

import argparse

from core.harness.ablation import DEFAULT_VARIANTS, VARIANTS, run_ablation
from db.run_registry import RunRegistry

from ..deps import (
    add_common_args,
    add_eval_args,
    add_gen_args,
    add_model_args,
    add_train_args,
    build_experiment,
    emit_json,
)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "ablate",
        help="train and evaluate architecture ablation variants",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    add_common_args(parser)
    add_gen_args(parser)
    add_model_args(parser)
    add_train_args(parser)
    add_eval_args(parser)
    parser.add_argument(
        "--variants",
        nargs="+",
        default=None,
        metavar="ID",
        help=f"variant ids (default: {' '.join(DEFAULT_VARIANTS)}); known: {', '.join(sorted(VARIANTS))}",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    spec = build_experiment(args, "ablation")
    rows = run_ablation(spec, registry=RunRegistry(args.registry))
    emit_json([row.to_csv_row() for row in rows])
    return 0
