"""
Matcher Strategy

실험 harness 가 평가하는 매칭 방법의 공통 인터페이스.

- SolverMatcher: 학습 없는 고전 solver (DPGM / GAGM / SM)
- ModelMatcher: 학습된 (또는 초기화된) EnsembleQAPNet
- NaiveMatcher: 가중 평균 NaiveEnsemble
"""

from dataclasses import asdict
from pathlib import Path
from typing import Optional, Protocol, Tuple, runtime_checkable

import torch
from torch import nn

from config.models import AffinityConfig, SolverConfig
from core.affinity.builder import build_affinity
from core.assignment.metrics import MatchResult
from core.ensemble.init_module import PairInput
from core.ensemble.model import EnsembleQAPNet
from core.ensemble.naive import NaiveEnsemble
from core.errors import InputError
from core.graph.generator import GraphPair
from core.solvers.factory import SolverFactory
from db.checkpoint import load_checkpoint


@runtime_checkable
class Matcher(Protocol):
    """
    매칭 방법 인터페이스.

    사용법:
        matcher = SolverMatcher(SolverConfig(kind="dpgm"))
        result = matcher.match(pair, seed=0)
        result.accuracy
    """

    name: str

    def scores(self, pair: GraphPair, seed: int = 0) -> Tuple[torch.Tensor, torch.Tensor]:
        """(Q, R) soft 점수 (padding 포함 n x n)"""
        ...

    def match(self, pair: GraphPair, seed: int = 0) -> MatchResult:
        ...

    def describe(self) -> dict:
        """재현용 설정 요약 (config hash 에 포함)"""
        ...


def _result(Q: torch.Tensor, R: torch.Tensor, pair: GraphPair) -> MatchResult:
    return MatchResult.from_scores(
        Q,
        R,
        gt=pair.gt,
        n_real_rows=pair.reference.n,
        n_real_cols=pair.query.n,
    )


# ============================================================================
# Classical Solver
# ============================================================================


class SolverMatcher:
    """고전 solver baseline (64-bit, 학습 없음)"""

    def __init__(
        self,
        config: SolverConfig = SolverConfig(),
        affinity: AffinityConfig = AffinityConfig(),
    ):
        self.config = config
        self.affinity = affinity
        self.solver = SolverFactory.create(config)
        self.name = f"single-{config.kind}"

    def scores(self, pair: GraphPair, seed: int = 0) -> Tuple[torch.Tensor, torch.Tensor]:
        inp = PairInput.from_graphs(pair.reference, pair.query, dtype=torch.float64)
        M = build_affinity(
            inp.F1,
            inp.F2,
            inp.g1,
            inp.g2,
            sigma_aff=self.affinity.sigma_aff,
            unary_mode=self.affinity.unary_mode,
        )
        z = self.solver.solve(M).reshape(inp.n, inp.n)
        return z, z

    def match(self, pair: GraphPair, seed: int = 0) -> MatchResult:
        return _result(*self.scores(pair, seed), pair)

    def describe(self) -> dict:
        return {
            "matcher": self.name,
            "solver": asdict(self.config),
            "affinity": asdict(self.affinity),
        }


# ============================================================================
# Learned Models
# ============================================================================


class ModelMatcher:
    """
    nn.Module (EnsembleQAPNet 등) 추론 매처. eval 모드 + no_grad 로 실행합니다.

    Args:
        model: ForwardResult 를 반환하는 모델
        name: 결과 표의 이름
        force_full_mask: eqan-r 에서 mask 를 전부 1 로 고정 (dense 비교용)
        label: describe() 에 넣을 식별자 (예: 체크포인트 경로)
    """

    def __init__(
        self,
        model: nn.Module,
        name: str = "eqan",
        force_full_mask: bool = False,
        label: Optional[str] = None,
    ):
        self.model = model.eval()
        self.name = name
        self.force_full_mask = force_full_mask
        self.label = label

    @property
    def dtype(self) -> torch.dtype:
        return next(self.model.parameters()).dtype

    def _forward(self, inp: PairInput, seed: int):
        if isinstance(self.model, EnsembleQAPNet):
            return self.model(inp, seed=seed, force_full_mask=self.force_full_mask)
        return self.model(inp, seed=seed)

    def scores(self, pair: GraphPair, seed: int = 0) -> Tuple[torch.Tensor, torch.Tensor]:
        inp = PairInput.from_graphs(pair.reference, pair.query, dtype=self.dtype)
        with torch.no_grad():
            out = self._forward(inp, seed)
        return out.Q, out.R

    def match(self, pair: GraphPair, seed: int = 0) -> MatchResult:
        return _result(*self.scores(pair, seed), pair)

    def describe(self) -> dict:
        info = {"matcher": self.name, "label": self.label, "force_full_mask": self.force_full_mask}
        if isinstance(self.model, EnsembleQAPNet):
            info["model"] = self.model.config.to_dict()
        return info


class NaiveMatcher(ModelMatcher):
    """가중 평균 ensemble 매처"""

    def __init__(self, model: NaiveEnsemble, name: str = "naive", label: Optional[str] = None):
        super().__init__(model, name=name, label=label)

    def describe(self) -> dict:
        info = super().describe()
        info["model"] = {
            "channels": self.model.channels,
            "steps": self.model.steps,
            "solver": self.model.solver.kind,
        }
        return info


# ============================================================================
# Construction
# ============================================================================


def load_model_matcher(checkpoint: Path | str, force_full_mask: bool = False) -> ModelMatcher:
    """
    체크포인트에서 ModelMatcher 생성.

    Raises:
        InputError: 체크포인트 파일이 없는 경우
    """
    path = Path(checkpoint)
    if not path.exists():
        raise InputError(f"checkpoint not found: {path}")
    model = load_checkpoint(path)
    return ModelMatcher(model, name=model.config.mode, force_full_mask=force_full_mask, label=str(path))


def build_matcher(
    checkpoint: Optional[str],
    solver: SolverConfig = SolverConfig(),
    affinity: AffinityConfig = AffinityConfig(),
) -> Matcher:
    """체크포인트가 있으면 학습 모델, 없으면 고전 solver baseline"""
    if checkpoint:
        return load_model_matcher(checkpoint)
    return SolverMatcher(solver, affinity)


def matcher_from_description(description: dict) -> Matcher:
    """
    describe() 결과로부터 같은 매처를 다시 구성 (registry replay 용).

    Raises:
        InputError: 체크포인트 없이 학습 모델을 가리키는 기록
    """
    if "solver" in description:
        return SolverMatcher(
            SolverConfig(**description["solver"]),
            AffinityConfig(**description["affinity"]),
        )
    label = description.get("label")
    if not label:
        raise InputError(f"cannot rebuild matcher {description.get('matcher')!r} without a checkpoint")
    return load_model_matcher(label, force_full_mask=description.get("force_full_mask", False))
