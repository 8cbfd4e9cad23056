"""
CLI Dependencies

서브커맨드들이 공유하는 환경 설정과 설정 조립 함수.

- .env 로드 (src/.env) 와 GMATCH_NUM_THREADS 로 torch 스레드 수 설정
- 로깅 초기화
- 공통 flag 등록과 ExperimentConfig 조립 (파일 -> full-scale preset -> flag 순)
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional, Tuple

import torch
from dotenv import load_dotenv

from config.models import (
    FULL_SCALE_MODEL,
    FULL_SCALE_TRAIN,
    ExperimentConfig,
    GenConfig,
    ModelConfig,
    SolverConfig,
    TrainConfig,
)
from core.errors import ConfigError
from dtypes.experiment import load_experiment

# .env 파일 로드 (src/.env)
_env_path = Path(__file__).parent.parent / ".env"
load_dotenv(_env_path)

logger = logging.getLogger(__name__)

THREADS_ENV = "GMATCH_NUM_THREADS"


# ============================================================================
# Environment
# ============================================================================


def configure_threads() -> Optional[int]:
    """
    GMATCH_NUM_THREADS 가 있으면 torch intra-op 스레드 수로 설정.

    Raises:
        ConfigError: 양의 정수가 아닌 값
    """
    raw = os.getenv(THREADS_ENV)
    if not raw:
        return None
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if threads < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    torch.set_num_threads(threads)
    return threads


def configure_logging(level: str = "INFO") -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="[%(name)s] %(message)s",
        force=True,
    )


# ============================================================================
# Common Flags
# ============================================================================


def add_common_args(parser: argparse.ArgumentParser) -> None:
    """설정 파일과 모든 서브커맨드가 공유하는 override flag"""
    group = parser.add_argument_group("configuration")
    group.add_argument("--config", default=None, help="experiment JSON file")
    group.add_argument("--full-scale", action="store_true", help="use L=5, C=32, 80000 iterations")
    group.add_argument("--seed", type=int, default=None, help="data and model seed (default: config value, 0)")
    group.add_argument("--output", default=None, help="result path (default: config value)")
    group.add_argument("--workers", type=int, default=None, help="worker threads for grid points (default: 1)")


def add_gen_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("synthetic graphs")
    group.add_argument("--n-in", type=int, default=None, help="inlier count (default: 35)")
    group.add_argument("--n-out", type=int, default=None, help="outlier count (default: 0)")
    group.add_argument("--sigma", type=float, default=None, help="noise std (default: 0.0)")
    group.add_argument("--k", type=int, default=None, help="k-nearest-neighbor edges (default: 5)")
    group.add_argument("--dim", type=int, default=None, choices=[2, 3], help="point dimension (default: 2)")
    group.add_argument("--max-rotation", type=float, default=None, help="max rotation in degrees (default: 0)")
    group.add_argument(
        "--query-edges", default=None, choices=["knn", "copy"], help="query edge rule (default: knn)"
    )


def add_model_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("model")
    group.add_argument("--layers", type=int, default=None, help="ensemble blocks L (default: 3)")
    group.add_argument("--channels", type=int, default=None, help="channels C (default: 8)")
    group.add_argument("--mode", default=None, choices=["eqan", "eqan-u", "eqan-r"], help="model variant (default: eqan)")
    group.add_argument("--solver", default=None, choices=["dpgm", "gagm", "sm"], help="QAP solver (default: dpgm)")
    group.add_argument("--gamma", type=float, default=None, help="eqan-r sampling ratio (default: 1.0)")
    group.add_argument("--checkpoint", default=None, help="model checkpoint path")


def add_train_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("training")
    group.add_argument("--iters", type=int, default=None, help="total iterations (default: 5000)")
    group.add_argument("--batch", type=int, default=None, help="pairs per iteration (default: 8)")
    group.add_argument("--lr", type=float, default=None, help="Adam learning rate (default: 1e-4)")
    group.add_argument("--warmup", type=int, default=None, help="warm-up iterations (default: 500)")
    group.add_argument("--dtype", default=None, choices=["float32", "float64"], help="parameter dtype (default: float32)")


def add_eval_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("evaluation")
    group.add_argument("--repeats", type=int, default=None, help="independent data seeds (default: 5)")
    group.add_argument("--eval-pairs", type=int, default=None, help="pairs per evaluation (default: 200)")
    group.add_argument("--registry", default="runs.json", help="run registry JSON for reproducible rows")


# ============================================================================
# Config Assembly
# ============================================================================


def _pick(args: argparse.Namespace, **names) -> dict:
    """namespace 에서 None 이 아닌 flag 만 {필드명: 값} 으로"""
    return {
        field: getattr(args, attr)
        for field, attr in names.items()
        if getattr(args, attr, None) is not None
    }


def build_experiment(
    args: argparse.Namespace, kind: str, default_grid: Tuple[float, ...] = ()
) -> ExperimentConfig:
    """
    설정 파일 (있으면) -> full-scale preset -> flag override 순으로 조립.
    grid 는 flag, 파일, default_grid 순으로 처음 비어 있지 않은 값을 씁니다.

    Raises:
        ConfigError: 잘못된 값
    """
    spec = load_experiment(args.config) if getattr(args, "config", None) else ExperimentConfig(kind="train")

    model: ModelConfig = spec.model
    train: TrainConfig = spec.train
    if getattr(args, "full_scale", False):
        model = replace(model, **FULL_SCALE_MODEL)
        train = replace(train, **FULL_SCALE_TRAIN)

    seed = getattr(args, "seed", None)
    gen_changes = _pick(
        args, n_in="n_in", n_out="n_out", sigma="sigma", k="k",
        dim="dim",
        max_rotation_deg="max_rotation",
        query_edges="query_edges",
    )
    if seed is not None:
        gen_changes["seed"] = seed
    gen: GenConfig = replace(spec.gen, **gen_changes)

    model = replace(
        model,
        **_pick(args, layers="layers", channels="channels", mode="mode", solver="solver", gamma="gamma", dim="dim"),
    )
    train_changes = _pick(args, total_iters="iters", batch="batch", lr="lr", warmup_iters="warmup", dtype="dtype")
    if seed is not None:
        train_changes["seed"] = seed
    if "total_iters" in train_changes and "warmup_iters" not in train_changes:
        train_changes["warmup_iters"] = min(train.warmup_iters, train_changes["total_iters"])
    train = replace(train, **train_changes)

    solver: SolverConfig = spec.solver
    if getattr(args, "solver", None) is not None:
        solver = replace(solver, kind=args.solver)

    top = _pick(
        args,
        repeats="repeats",
        eval_pairs="eval_pairs",
        checkpoint="checkpoint",
        output="output",
        workers="workers",
    )
    grid = tuple(getattr(args, "grid", None) or spec.grid or default_grid)
    variants = tuple(args.variants) if getattr(args, "variants", None) else spec.variants
    return replace(
        spec,
        kind=kind,
        grid=grid,
        gen=gen,
        model=model,
        train=train,
        solver=solver,
        variants=variants,
        **top,
    )


# ============================================================================
# Output
# ============================================================================


def emit_json(payload: Any, path: Optional[str] = None) -> None:
    """JSON 결과를 path (있으면) 또는 stdout 으로"""
    text = json.dumps(payload, indent=2, ensure_ascii=False, default=str)
    if path:
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text + "\n", encoding="utf-8")
        logger.info("wrote %s", out)
    else:
        sys.stdout.write(text + "\n")
