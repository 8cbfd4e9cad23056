"""
Experiment File Schema

실험 설정 JSON 파일 스키마. 모든 섹션은 선택이며 빠진 값은 기본값을 씁니다.

    {
        "kind": "noise-sweep",
        "grid": [0.0, 0.05, 0.1],
        "gen": {"k": 5, "seed": 3},
        "model": {"layers": 3, "channels": 8},
        "train": {"total_iters": 5000},
        "repeats": 5,
        "output": "results/noise.csv"
    }
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from config.models import (
    AffinityConfig,
    ExperimentConfig,
    GenConfig,
    ModelConfig,
    SolverConfig,
    TrainConfig,
)
from core.errors import ConfigError


class ExperimentFile(BaseModel):
    """실험 파일 최상위 스키마"""

    model_config = ConfigDict(extra="forbid")

    kind: str = Field(default="noise-sweep", description="실험 종류")
    grid: List[float] = Field(default_factory=list, description="sweep grid 값")
    gen: Dict[str, Any] = Field(default_factory=dict, description="GenConfig 필드")
    train: Dict[str, Any] = Field(default_factory=dict, description="TrainConfig 필드")
    model: Dict[str, Any] = Field(default_factory=dict, description="ModelConfig 필드")
    solver: Dict[str, Any] = Field(default_factory=dict, description="SolverConfig 필드")
    affinity: Dict[str, Any] = Field(default_factory=dict, description="AffinityConfig 필드")
    variants: List[str] = Field(default_factory=list, description="ablation variant id")
    repeats: int = Field(default=5, ge=1, description="반복 수")
    eval_pairs: int = Field(default=200, ge=1, description="grid 점당 평가 쌍 수")
    checkpoint: Optional[str] = Field(default=None, description="학습된 모델 경로")
    output: str = Field(default="results.csv", description="결과 CSV 경로")
    workers: int = Field(default=1, ge=1, description="grid 점 병렬 worker 수")

    @field_validator("train")
    @classmethod
    def validate_train(cls, v):
        if "adam_betas" in v:
            betas = v["adam_betas"]
            if not isinstance(betas, (list, tuple)) or len(betas) != 2:
                raise ValueError("adam_betas must be a pair")
            v = {**v, "adam_betas": tuple(betas)}
        return v

    def to_config(self, **overrides) -> ExperimentConfig:
        """
        dataclass 설정으로 변환. overrides 는 최상위 필드를 덮어씁니다.

        Raises:
            ConfigError: 알 수 없는 필드 또는 불변식 위반
        """
        try:
            values = dict(
                kind=self.kind,
                grid=tuple(self.grid),
                gen=GenConfig(**self.gen),
                train=TrainConfig(**self.train),
                model=ModelConfig(**self.model),
                solver=SolverConfig(**self.solver),
                affinity=AffinityConfig(**self.affinity),
                variants=tuple(self.variants),
                repeats=self.repeats,
                eval_pairs=self.eval_pairs,
                checkpoint=self.checkpoint,
                output=self.output,
                workers=self.workers,
            )
        except TypeError as e:
            raise ConfigError(f"Invalid experiment section: {e}") from e
        values.update({key: value for key, value in overrides.items() if value is not None})
        return ExperimentConfig(**values)


def load_experiment(path: Path | str, **overrides) -> ExperimentConfig:
    """
    JSON 실험 파일 로드.

    Raises:
        ConfigError: JSON/스키마 오류
        FileNotFoundError: 파일 없음
    """
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
    try:
        payload = ExperimentFile.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"{path}: {e.error_count()} invalid field(s): {e.errors()[0]['msg']}") from e
    return payload.to_config(**overrides)
