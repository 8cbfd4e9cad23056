# Database Module
"""파일 기반 저장소 (모델 체크포인트, 실험 run registry)"""

from .checkpoint import load_checkpoint, save_checkpoint
from .run_registry import RunRegistry

__all__ = [
    "save_checkpoint",
    "load_checkpoint",
    "RunRegistry",
]
