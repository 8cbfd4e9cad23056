# Config Module
"""설정 관련 모듈"""

from .models import (
    FULL_SCALE_MODEL,
    FULL_SCALE_TRAIN,
    AffinityConfig,
    ExperimentConfig,
    GenConfig,
    ModelConfig,
    SolverConfig,
    TrainConfig,
)

__all__ = [
    "GenConfig",
    "AffinityConfig",
    "SolverConfig",
    "ModelConfig",
    "TrainConfig",
    "ExperimentConfig",
    "FULL_SCALE_MODEL",
    "FULL_SCALE_TRAIN",
]
