"""
Sampling Size Sweep

EQAN-R 모델의 샘플링 비율 gamma 에 따른 정확도 곡선.
각 grid 점은 gamma 만 바꾼 모델 복사본으로 평가하며, 같은 쌍에서 mask 를
전부 1 로 고정한 dense 정확도도 함께 기록합니다.
"""

import copy
import logging
from dataclasses import asdict, replace
from typing import Any, Dict, List, Optional

from config.models import ExperimentConfig, GenConfig
from core.ensemble.model import EnsembleQAPNet
from core.errors import ConfigError
from core.graph.generator import derive_seed

from .evaluation import evaluate_stream, run_ordered, std
from .matchers import ModelMatcher
from .records import SweepRow, record_rows, write_rows

logger = logging.getLogger(__name__)

DEFAULT_GAMMAS = (0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0)


def with_gamma(model: EnsembleQAPNet, gamma: float) -> EnsembleQAPNet:
    """gamma 만 바꾼 모델 복사본"""
    clone = copy.deepcopy(model)
    clone.config = replace(model.config, gamma=float(gamma))
    return clone.eval()


def run_sampling_sweep(
    spec: ExperimentConfig,
    model: EnsembleQAPNet,
    registry=None,
    label: Optional[str] = None,
    write: bool = True,
) -> List[SweepRow]:
    """
    Args:
        spec: kind="sampling-sweep", grid = gamma 값들
        model: eqan-r 모델
        registry: RunRegistry (선택)
        label: 행 설정에 남길 체크포인트 경로
        write: spec.output 에 CSV 저장 여부

    Raises:
        ConfigError: eqan-r 이 아닌 모델 또는 gamma <= 0
    """
    if model.config.mode != "eqan-r":
        raise ConfigError(f"sampling sweep needs an eqan-r model, got mode={model.config.mode}")
    if any(not g > 0 for g in spec.grid):
        raise ConfigError("sampling sweep gammas must be > 0")
    seed = spec.gen.seed
    dense = ModelMatcher(model, name="eqan-r-dense", force_full_mask=True, label=label)

    def point(gamma):
        def task():
            matcher = ModelMatcher(with_gamma(model, gamma), name="eqan-r", label=label)
            seeds = [derive_seed(seed, r) for r in range(spec.repeats)]
            sampled = [evaluate_stream(matcher, spec.gen, s, spec.eval_pairs).mean for s in seeds]
            full = [evaluate_stream(dense, spec.gen, s, spec.eval_pairs).mean for s in seeds]
            row = SweepRow(
                kind="sampling-sweep",
                x=gamma,
                mean_accuracy=sum(sampled) / len(sampled),
                std_accuracy=std(sampled),
                repeats=spec.repeats,
                seed=seed,
                config={
                    "kind": "sampling-sweep",
                    "x": gamma,
                    "gen": asdict(spec.gen),
                    "repeats": spec.repeats,
                    "eval_pairs": spec.eval_pairs,
                    "seed": seed,
                    "matcher": matcher.describe(),
                },
                extra={"dense_accuracy": sum(full) / len(full)},
            )
            logger.info(
                "gamma=%s: accuracy %.4f (dense %.4f)",
                gamma,
                row.mean_accuracy,
                row.extra["dense_accuracy"],
            )
            return row

        return task

    rows = run_ordered([point(g) for g in spec.grid], workers=spec.workers)
    if write:
        write_rows(spec.output, rows)
    if registry is not None:
        record_rows(registry, rows)
    return rows


def replay_sampling_row(config: Dict[str, Any], model: EnsembleQAPNet) -> SweepRow:
    """registry 에 기록된 sampling-sweep 행을 같은 모델로 다시 계산"""
    spec = ExperimentConfig(
        kind="sampling-sweep",
        grid=(config["x"],),
        gen=GenConfig(**config["gen"]),
        repeats=config["repeats"],
        eval_pairs=config["eval_pairs"],
    )
    return run_sampling_sweep(spec, model, label=config["matcher"].get("label"), write=False)[0]
