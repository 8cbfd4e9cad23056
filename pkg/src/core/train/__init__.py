"""
Training Module

Tape 기반 gradient, BCE 매칭 loss, warm-up Adam, 학습 루프를 제공합니다.
"""

from .loss import matching_loss, target_matrix
from .optimizer import WarmupAdam, adam_step
from .tape import Tape, backward
from .trainer import MetricsWriter, TrainResult, Trainer, evaluate_model, train

__all__ = [
    "Tape",
    "backward",
    "matching_loss",
    "target_matrix",
    "WarmupAdam",
    "adam_step",
    "Trainer",
    "TrainResult",
    "MetricsWriter",
    "evaluate_model",
    "train",
]
