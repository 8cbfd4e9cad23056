"""
sweep: noise / outlier / rotation 강건성 곡선 (CSV), 또는 registry 의 행 재계산
"""

import argparse
import logging

from core.errors import InputError
from core.harness.ablation import replay_ablation_row
from core.harness.matchers import build_matcher, load_model_matcher
from core.harness.robustness import DEFAULT_GRIDS, SWEEP_KINDS, replay_sweep_row, run_robustness_sweep
from core.harness.sampling_sweep import replay_sampling_row
from db.run_registry import RunRegistry
from dtypes.experiment import load_experiment

from ..deps import (
    add_common_args,
    add_eval_args,
    add_gen_args,
    add_model_args,
    build_experiment,
    emit_json,
)

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "sweep",
        help="robustness sweep over noise, outliers or rotation",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    add_common_args(parser)
    add_gen_args(parser)
    add_model_args(parser)
    add_eval_args(parser)
    parser.add_argument("--kind", default=None, choices=list(SWEEP_KINDS), help="sweep kind (default: config value)")
    parser.add_argument("--grid", type=float, nargs="+", default=None, help="grid values (default: per-kind grid)")
    parser.add_argument("--replay", default=None, metavar="HASH", help="recompute one recorded row by config hash")
    parser.set_defaults(handler=run)


def replay(registry: RunRegistry, config_hash: str) -> dict:
    """
    기록된 행을 다시 계산하고 기록값과 비교.

    Raises:
        InputError: 해시가 registry 에 없는 경우
    """
    entry = registry.get(config_hash)
    if entry is None:
        raise InputError(f"no recorded run matches {config_hash!r} in {registry.registry_path}")
    config = entry["config"]
    if entry["kind"] == "ablation":
        row = replay_ablation_row(config)
    elif entry["kind"] == "sampling-sweep":
        label = config["matcher"].get("label")
        row = replay_sampling_row(config, load_model_matcher(label).model)
    else:
        row = replay_sweep_row(config)
    return {
        "config_hash": row.config_hash,
        "recorded": entry["value"],
        "recomputed": row.mean_accuracy,
        "identical": row.mean_accuracy == entry["value"],
    }


def run(args: argparse.Namespace) -> int:
    registry = RunRegistry(args.registry)
    if args.replay:
        emit_json(replay(registry, args.replay))
        return 0

    kind = args.kind
    if kind is None and args.config:
        kind = load_experiment(args.config).kind
    kind = kind or "noise-sweep"
    spec = build_experiment(args, kind, default_grid=DEFAULT_GRIDS.get(kind, ()))

    matcher = build_matcher(spec.checkpoint, spec.solver, spec.affinity)
    rows = run_robustness_sweep(spec, matcher, registry=registry)
    logger.info("%s: %d rows written to %s", spec.kind, len(rows), spec.output)
    emit_json([row.to_csv_row() for row in rows])
    return 0
