"""
eval: 체크포인트 (없으면 고전 solver) 의 held-out 정확도
"""

import argparse

from core.graph.generator import derive_seed
from core.harness.evaluation import evaluate_stream, std
from core.harness.matchers import build_matcher

from ..deps import add_common_args, add_eval_args, add_gen_args, add_model_args, build_experiment, emit_json


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "eval",
        help="evaluate a checkpoint or a classical solver on generated pairs",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    add_common_args(parser)
    add_gen_args(parser)
    add_model_args(parser)
    add_eval_args(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    spec = build_experiment(args, "eval")
    matcher = build_matcher(spec.checkpoint, spec.solver, spec.affinity)
    seeds = [derive_seed(spec.gen.seed, r) for r in range(spec.repeats)]
    accuracies = [evaluate_stream(matcher, spec.gen, s, spec.eval_pairs).mean for s in seeds]
    emit_json(
        {
            "matcher": matcher.describe(),
            "mean_accuracy": sum(accuracies) / len(accuracies),
            "std_accuracy": std(accuracies),
            "per_seed": accuracies,
            "seeds": seeds,
            "eval_pairs": spec.eval_pairs,
        },
        args.output,
    )
    return 0
