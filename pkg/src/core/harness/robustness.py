"""
Robustness Sweeps

noise / outlier / rotation 에 대한 정확도 곡선.

    noise-sweep:    n_in=50, n_out=0,  sigma = x            (x in [0, 0.2])
    outlier-sweep:  n_in=35, n_out = x, sigma=0.1           (x in 0..50)
    rotation-sweep: n_in=30, n_out=15, sigma=0.1, 회전 [0, x] 도  (x in 0..90)

grid 점마다 repeats 개의 data seed 로 eval_pairs 개 쌍을 평가해 평균/표준편차를 냅니다.
grid 점은 worker pool 에서 병렬로 계산하고 grid 순서대로 합칩니다.
"""

import logging
from dataclasses import asdict, replace
from typing import Any, Dict, List, Optional

from config.models import ExperimentConfig, GenConfig
from core.errors import ConfigError
from core.graph.generator import derive_seed

from .evaluation import evaluate_stream, run_ordered, std
from .matchers import Matcher, matcher_from_description
from .records import SweepRow, record_rows, write_rows

logger = logging.getLogger(__name__)

SWEEP_KINDS = ("noise-sweep", "outlier-sweep", "rotation-sweep")

DEFAULT_GRIDS = {
    "noise-sweep": (0.0, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15, 0.175, 0.2),
    "outlier-sweep": (0, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50),
    "rotation-sweep": (0, 15, 30, 45, 60, 75, 90),
}


def sweep_gen_config(kind: str, x: float, base: GenConfig = GenConfig()) -> GenConfig:
    """
    grid 값 x 에 해당하는 생성 설정 (k, dim, seed 는 base 에서)

    Raises:
        ConfigError: 알 수 없는 sweep 종류
    """
    if kind == "noise-sweep":
        return replace(base, n_in=50, n_out=0, sigma=float(x), max_rotation_deg=0.0, query_edges="copy")
    if kind == "outlier-sweep":
        return replace(base, n_in=35, n_out=int(x), sigma=0.1, max_rotation_deg=0.0, query_edges="copy")
    if kind == "rotation-sweep":
        return replace(base, n_in=30, n_out=15, sigma=0.1, dim=2, max_rotation_deg=float(x), query_edges="copy")
    raise ConfigError(f"Unknown sweep kind: {kind}. Supported kinds: {', '.join(SWEEP_KINDS)}")


def evaluate_grid_point(
    matcher: Matcher,
    kind: str,
    x: float,
    gen: GenConfig,
    repeats: int,
    eval_pairs: int,
    seed: int,
) -> SweepRow:
    """grid 점 하나: repeat r 은 data seed derive_seed(seed, r) 사용"""
    accuracies = [
        evaluate_stream(matcher, gen, derive_seed(seed, r), eval_pairs).mean for r in range(repeats)
    ]
    config: Dict[str, Any] = {
        "kind": kind,
        "x": x,
        "gen": asdict(gen),
        "repeats": repeats,
        "eval_pairs": eval_pairs,
        "seed": seed,
        "matcher": matcher.describe(),
    }
    return SweepRow(
        kind=kind,
        x=x,
        mean_accuracy=sum(accuracies) / len(accuracies),
        std_accuracy=std(accuracies),
        repeats=repeats,
        seed=seed,
        config=config,
    )


def run_robustness_sweep(
    spec: ExperimentConfig, matcher: Matcher, registry=None
) -> List[SweepRow]:
    """
    sweep 실행 후 CSV 저장 (spec.output) 과 registry 기록.

    Args:
        spec: kind 가 *-sweep 인 실험 설정
        matcher: 평가할 매처 (build_matcher 로 생성)
        registry: RunRegistry (None 이면 기록 안 함)

    Raises:
        ConfigError: 지원하지 않는 sweep 종류
    """
    if spec.kind not in SWEEP_KINDS:
        raise ConfigError(f"{spec.kind} is not a robustness sweep")
    seed = spec.gen.seed

    def point(x):
        def task():
            gen = sweep_gen_config(spec.kind, x, spec.gen)
            row = evaluate_grid_point(matcher, spec.kind, x, gen, spec.repeats, spec.eval_pairs, seed)
            logger.info(
                "%s x=%s: accuracy %.4f +- %.4f", spec.kind, x, row.mean_accuracy, row.std_accuracy
            )
            return row

        return task

    rows = run_ordered([point(x) for x in spec.grid], workers=spec.workers)
    write_rows(spec.output, rows)
    if registry is not None:
        record_rows(registry, rows)
    return rows


def replay_sweep_row(config: Dict[str, Any], matcher: Optional[Matcher] = None) -> SweepRow:
    """registry 에 기록된 행 설정으로 같은 행을 다시 계산"""
    matcher = matcher if matcher is not None else matcher_from_description(config["matcher"])
    return evaluate_grid_point(
        matcher,
        config["kind"],
        config["x"],
        GenConfig(**config["gen"]),
        config["repeats"],
        config["eval_pairs"],
        config["seed"],
    )
