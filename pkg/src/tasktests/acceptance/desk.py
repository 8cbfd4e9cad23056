"""desk-scale 학습 설정"""

from config.models import GenConfig, ModelConfig, TrainConfig
from core.harness import ablation_gen_config

DESK_GEN = ablation_gen_config(GenConfig(seed=0))
DESK_MODEL = ModelConfig()
DESK_TRAIN = TrainConfig(seed=0, lr=1e-3, warmup_iters=100)
