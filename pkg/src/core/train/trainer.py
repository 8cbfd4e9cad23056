"""
Trainer

합성 그래프 쌍 스트림으로 EQAN 을 학습합니다.

동작 플로우:
    1. train 스트림 (seed 파생 0) 에서 batch 개 쌍을 꺼냄
    2. 쌍마다 forward -> matching_loss, batch 평균
    3. Tape 로 gradient 계산 -> WarmupAdam step
    4. log_every 마다 loss 로그, eval_every 마다 held-out 스트림 (seed 파생 1)
       정확도 평가 후 최고 모델 체크포인트 저장
    5. gradient 가 non-finite 면 마지막 정상 상태로 되돌리고 중단
"""

import copy
import csv
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Union

import torch
from torch import nn

from config.models import GenConfig, ModelConfig, TrainConfig
from core.assignment.metrics import MatchResult
from core.ensemble.init_module import PairInput
from core.ensemble.model import EnsembleQAPNet
from core.errors import ConfigError, DomainError, TrainingAbortedError
from core.graph.generator import GraphPair, PairStream, derive_seed
from db.checkpoint import save_checkpoint

from .loss import matching_loss
from .optimizer import WarmupAdam
from .tape import Tape, backward

logger = logging.getLogger(__name__)

DTYPES = {"float32": torch.float32, "float64": torch.float64}

TRAIN_STREAM = 0
EVAL_STREAM = 1


# ============================================================================
# Metrics Writer
# ============================================================================


class MetricsWriter:
    """iteration 별 (iter, loss, eval_acc, wallclock) CSV 기록"""

    FIELDS = ["iter", "loss", "eval_acc", "wallclock"]

    def __init__(self, path: Union[Path, str, None]):
        self.path = Path(path) if path else None
        self._start = time.perf_counter()
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "w", newline="", encoding="utf-8") as f:
                csv.writer(f).writerow(self.FIELDS)

    def write(self, iteration: int, loss: float, eval_acc: Optional[float] = None) -> None:
        if self.path is None:
            return
        with open(self.path, "a", newline="", encoding="utf-8") as f:
            csv.writer(f).writerow(
                [
                    iteration,
                    f"{loss:.6g}",
                    "" if eval_acc is None else f"{eval_acc:.6f}",
                    f"{time.perf_counter() - self._start:.3f}",
                ]
            )


# ============================================================================
# Train Result
# ============================================================================


@dataclass
class TrainResult:
    """학습 결과 요약"""

    model: nn.Module
    iterations: int = 0
    losses: List[float] = field(default_factory=list)
    eval_history: List[tuple] = field(default_factory=list)  # (iter, accuracy)
    best_accuracy: Optional[float] = None
    checkpoint: Optional[Path] = None

    def __repr__(self) -> str:
        return (
            f"TrainResult(iterations={self.iterations}, "
            f"best_accuracy={self.best_accuracy}, checkpoint={self.checkpoint})"
        )


# ============================================================================
# Evaluation helper
# ============================================================================


def model_dtype(model: nn.Module) -> torch.dtype:
    return next(model.parameters()).dtype


def evaluate_model(model: nn.Module, pairs: List[GraphPair], seed: int = 0) -> float:
    """held-out 쌍들의 평균 매칭 정확도 (eval 모드, no_grad)"""
    was_training = model.training
    model.eval()
    dtype = model_dtype(model)
    accuracies = []
    try:
        with torch.no_grad():
            for idx, pair in enumerate(pairs):
                inp = PairInput.from_graphs(pair.reference, pair.query, dtype=dtype)
                out = model(inp, seed=derive_seed(seed, idx))
                result = MatchResult.from_scores(
                    out.Q,
                    out.R,
                    gt=pair.gt,
                    n_real_rows=pair.reference.n,
                    n_real_cols=pair.query.n,
                )
                accuracies.append(result.accuracy)
    finally:
        model.train(was_training)
    return float(sum(accuracies) / len(accuracies))


# ============================================================================
# Trainer Class
# ============================================================================


class Trainer:
    """
    EQAN 학습기.

    사용법:
        trainer = Trainer(ModelConfig(), TrainConfig(total_iters=200), GenConfig())
        result = trainer.fit(checkpoint_path="runs/eqan.bin")

        # EQAN 이외의 모델 (예: NaiveEnsemble) 도 같은 루프로 학습 가능 (체크포인트 제외)
        trainer = Trainer(ModelConfig(), cfg, gen, model=NaiveEnsemble())
    """

    def __init__(
        self,
        model_config: ModelConfig,
        train_config: TrainConfig,
        gen_config: GenConfig,
        model: Optional[nn.Module] = None,
        metrics_path: Union[Path, str, None] = None,
    ):
        self.model_config = model_config
        self.cfg = train_config
        self.gen = gen_config
        self.dtype = DTYPES[train_config.dtype]

        if model is None:
            model = EnsembleQAPNet(model_config, seed=train_config.seed, dtype=self.dtype)
        self.model = model.to(self.dtype)
        self.optimizer = WarmupAdam(self.model.parameters(), train_config)
        self.metrics = MetricsWriter(metrics_path)

        self.train_stream = PairStream(gen_config, derive_seed(train_config.seed, TRAIN_STREAM))
        self.eval_stream = PairStream(gen_config, derive_seed(train_config.seed, EVAL_STREAM))
        self._eval_pairs: Optional[List[GraphPair]] = None
        self._last_good = None

    # ------------------------------------------------------------------
    # Steps
    # ------------------------------------------------------------------

    def batch_loss(self, pairs: List[GraphPair], iteration: int) -> torch.Tensor:
        """batch 평균 loss (forward 만)"""
        total = None
        for pair in pairs:
            inp = PairInput.from_graphs(pair.reference, pair.query, dtype=self.dtype)
            out = self.model(inp, seed=derive_seed(pair.seed, iteration))
            loss = matching_loss(out.Q, pair.gt)
            total = loss if total is None else total + loss
        return total / len(pairs)

    def train_step(self, iteration: int) -> float:
        """
        한 iteration: batch loss -> tape backward -> Adam.

        Raises:
            TrainingAbortedError: loss/gradient 가 non-finite
        """
        start = iteration * self.cfg.batch
        pairs = [self.train_stream.pair_at(start + b) for b in range(self.cfg.batch)]

        self.model.train()
        tape = Tape(self.model.named_parameters())
        with tape:
            try:
                loss = self.batch_loss(pairs, iteration)
            except DomainError as e:
                raise TrainingAbortedError(f"iteration {iteration}: {e}") from e
            tape.record(loss)
        value = float(loss.detach())
        if not math.isfinite(value):
            raise TrainingAbortedError(f"non-finite loss at iteration {iteration}")

        grads = backward(tape)
        params = dict(self.model.named_parameters())
        self.optimizer.step({params[name]: g for name, g in grads.items()})
        return value

    def evaluate(self) -> float:
        if self._eval_pairs is None:
            self._eval_pairs = self.eval_stream.take(self.cfg.eval_pairs)
        return evaluate_model(self.model, self._eval_pairs, seed=self.cfg.seed)

    # ------------------------------------------------------------------
    # Main Loop
    # ------------------------------------------------------------------

    def fit(self, checkpoint_path: Union[Path, str, None] = None) -> TrainResult:
        """
        total_iters 만큼 학습.

        Args:
            checkpoint_path: 최고 held-out 정확도 모델 저장 경로 (None 이면 저장 안 함)

        Raises:
            ConfigError: EnsembleQAPNet 이 아닌 모델에 checkpoint_path 를 준 경우
            TrainingAbortedError: non-finite 발생. 모델은 직전 정상 상태로 복원되고
                checkpoint_path 가 있으면 last_good 에 그 저장 경로
        """
        if checkpoint_path is not None and not isinstance(self.model, EnsembleQAPNet):
            raise ConfigError(f"checkpoints are only supported for EnsembleQAPNet, got {type(self.model).__name__}")

        result = TrainResult(model=self.model)
        best_state = None
        logger.info(
            "training %s: %d iterations, batch %d, %d parameters",
            type(self.model).__name__,
            self.cfg.total_iters,
            self.cfg.batch,
            sum(p.numel() for p in self.model.parameters()),
        )

        for iteration in range(self.cfg.total_iters):
            self._last_good = copy.deepcopy(self.model.state_dict())
            try:
                loss = self.train_step(iteration)
            except TrainingAbortedError as e:
                self.model.load_state_dict(self._last_good)
                last_good = None
                if checkpoint_path is not None:
                    last_good = str(
                        save_checkpoint(
                            self.model,
                            Path(str(checkpoint_path) + ".last_good"),
                            metadata={"iteration": iteration, "aborted": str(e)},
                        )
                    )
                logger.error("training aborted: %s", e)
                raise TrainingAbortedError(str(e), last_good=last_good) from e

            result.losses.append(loss)
            result.iterations = iteration + 1
            done = iteration + 1

            eval_acc = None
            if done % self.cfg.eval_every == 0 or done == self.cfg.total_iters:
                eval_acc = self.evaluate()
                result.eval_history.append((done, eval_acc))
                if result.best_accuracy is None or eval_acc > result.best_accuracy:
                    result.best_accuracy = eval_acc
                    best_state = copy.deepcopy(self.model.state_dict())
                    if checkpoint_path is not None:
                        result.checkpoint = save_checkpoint(
                            self.model,
                            checkpoint_path,
                            metadata={
                                "iteration": done,
                                "eval_accuracy": eval_acc,
                                "train": asdict(self.cfg),
                                "gen": asdict(self.gen),
                            },
                        )
                logger.info("iter %d: held-out accuracy %.4f", done, eval_acc)

            if done % self.cfg.log_every == 0:
                logger.info(
                    "iter %d: loss %.4f (lr %.1e)", done, loss, self.optimizer.lr_at(iteration)
                )
            self.metrics.write(done, loss, eval_acc)

        if best_state is not None:
            self.model.load_state_dict(best_state)
        self.model.eval()
        return result


def train(
    model_config: ModelConfig,
    train_config: TrainConfig,
    gen_config: GenConfig,
    checkpoint_path: Union[Path, str, None] = None,
    metrics_path: Union[Path, str, None] = None,
) -> TrainResult:
    """Trainer 생성 후 fit 까지 한 번에"""
    trainer = Trainer(model_config, train_config, gen_config, metrics_path=metrics_path)
    return trainer.fit(checkpoint_path)
