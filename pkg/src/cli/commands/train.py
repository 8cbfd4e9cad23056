"""
train: EQAN 학습 후 최고 held-out 모델을 체크포인트로 저장
"""

import argparse
from dataclasses import asdict, replace

from core.train.trainer import Trainer

from ..deps import add_common_args, add_gen_args, add_model_args, add_train_args, build_experiment, emit_json

DEFAULT_CHECKPOINT = "runs/eqan.bin"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "train",
        help="train an EQAN model on synthetic pairs",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    add_common_args(parser)
    add_gen_args(parser)
    add_model_args(parser)
    add_train_args(parser)
    parser.add_argument("--metrics", default=None, help="training metrics CSV (iter, loss, eval_acc, wallclock)")
    parser.add_argument("--eval-pairs", type=int, default=None, help="held-out pairs (default: 200)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    spec = build_experiment(args, "train")
    train_cfg = spec.train
    if args.eval_pairs is not None:
        train_cfg = replace(train_cfg, eval_pairs=args.eval_pairs)
    checkpoint = spec.checkpoint or DEFAULT_CHECKPOINT

    trainer = Trainer(spec.model, train_cfg, spec.gen, metrics_path=args.metrics)
    result = trainer.fit(checkpoint_path=checkpoint)
    emit_json(
        {
            "iterations": result.iterations,
            "final_loss": result.losses[-1] if result.losses else None,
            "best_accuracy": result.best_accuracy,
            "eval_history": result.eval_history,
            "checkpoint": str(result.checkpoint) if result.checkpoint else None,
            "model": spec.model.to_dict(),
            "train": asdict(train_cfg),
        },
        args.output,
    )
    return 0
