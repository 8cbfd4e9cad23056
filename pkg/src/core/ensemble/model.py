"""
Ensemble Quadratic Assignment Network

    V(0), M = InitModule(G1, G2)
    V(l)    = EnsembleBlock(l)(V(l-1); M(l-1))          l = 1..L
    R       = exp(Conv1x1(Concat(V(0), ..., V(L))))
    Q       = Sinkhorn(R)

mode:
    - "eqan":   모든 block 이 초기 M 사용
    - "eqan-u": block 사이에서 update_affinity 로 M 재계산
    - "eqan-r": 각 block 에서 random mask 로 일부 association node 만 갱신
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Union

import torch
import torch.nn.functional as F
from torch import nn

from config.models import ModelConfig
from core.affinity.builder import build_affinity
from core.affinity.matrix import AffinityMatrix
from core.errors import ConfigError, InputError
from core.graph.types import Graph
from core.solvers.factory import SolverFactory
from core.solvers.sinkhorn import log_sinkhorn

from .block import EnsembleBlock
from .init_module import InitModule, PairInput, inverse_softplus
from .sampling import MaskSTE, SampleMask, sample_mask

logger = logging.getLogger(__name__)


@dataclass
class ForwardResult:
    """
    forward 결과.

    Attributes:
        Q: (n, n) soft prediction (Sinkhorn(R))
        R: (n, n) reward 행렬 (양수)
        V_all: ((L+1)C, n, n) 모든 block 특징 concat
        preactivations: ReLU 직전 텐서 목록 (init, block 1..L)
        masks: EQAN-R mask 목록 (block 순서)
        affinities: 각 block 이 사용한 affinity
    """

    Q: torch.Tensor
    R: torch.Tensor
    V_all: torch.Tensor
    preactivations: List[torch.Tensor] = field(default_factory=list)
    masks: List[SampleMask] = field(default_factory=list)
    affinities: List[AffinityMatrix] = field(default_factory=list)


class EnsembleQAPNet(nn.Module):
    """
    EQAN 모델.

    사용법:
        model = EnsembleQAPNet(ModelConfig(layers=3, channels=8), seed=0)
        model = EnsembleQAPNet(config, seed=0, dtype=torch.float64)
        pair = PairInput.from_graphs(reference, query)
        result = model(pair)                 # result.Q, result.R
        result = model(pair, seed=7)         # eqan-r mask 시드
    """

    def __init__(
        self,
        config: ModelConfig = ModelConfig(),
        seed: Optional[int] = 0,
        dtype: torch.dtype = torch.float32,
    ):
        super().__init__()
        if not isinstance(config, ModelConfig):
            raise TypeError(f"EnsembleQAPNet requires ModelConfig, got {type(config).__name__}")
        self.config = config

        with torch.random.fork_rng(devices=[]):
            if seed is not None:
                torch.manual_seed(seed)
            self.init = InitModule(config.dim, config.channels)
            solver = SolverFactory.from_kind(config.solver)
            self.blocks = nn.ModuleList(
                EnsembleBlock(
                    config.channels,
                    solver,
                    layer,
                    learn_solver_params=config.learn_solver_params,
                    affinity_update=config.mode == "eqan-u" and layer < config.layers,
                )
                for layer in range(1, config.layers + 1)
            )
            in_channels = config.channels * (
                config.layers + 1 if config.decision_feature == "all" else 1
            )
            self.decision = nn.Conv2d(in_channels, 1, kernel_size=1)

        self.to(dtype)
        # float64 모델은 sigma 를 반올림 없이 보관
        sigma = torch.tensor(inverse_softplus(config.sigma_aff), dtype=dtype)
        if config.learn_sigma:
            self.raw_sigma = nn.Parameter(sigma)
        else:
            self.register_buffer("raw_sigma", sigma)

    # ------------------------------------------------------------------
    # Properties
    # ------------------------------------------------------------------

    @property
    def sigma_aff(self) -> torch.Tensor:
        return F.softplus(self.raw_sigma)

    @property
    def mode(self) -> str:
        return self.config.mode

    def decision_T(self) -> int:
        return self.config.sinkhorn_T_train if self.training else self.config.sinkhorn_T_eval

    # ------------------------------------------------------------------
    # Forward
    # ------------------------------------------------------------------

    def initial_affinity(self, pair: PairInput) -> AffinityMatrix:
        dtype = self.decision.weight.dtype
        return build_affinity(
            pair.F1.to(dtype),
            pair.F2.to(dtype),
            pair.g1,
            pair.g2,
            sigma_aff=self.sigma_aff,
            unary_mode=self.config.unary_mode,
            dtype=dtype,
        )

    def forward(
        self,
        pair: Union[PairInput, tuple],
        seed: Union[int, torch.Generator, None] = None,
        force_full_mask: bool = False,
    ) -> ForwardResult:
        """
        Args:
            pair: PairInput 또는 (G1, G2) 그래프 튜플
            seed: eqan-r mask 시드 (None 이면 0)
            force_full_mask: eqan-r 에서 mask 를 전부 1 로 고정

        Raises:
            InputError: 좌표 차원이 모델과 다른 경우
            ConfigError: eqan-r 인데 gamma <= 0
        """
        dtype = self.decision.weight.dtype
        if isinstance(pair, tuple):
            pair = PairInput.from_graphs(*pair, dtype=dtype)
        if pair.F1.shape[1] != self.config.dim:
            raise InputError(f"model expects d={self.config.dim}, got d={pair.F1.shape[1]}")
        if self.mode == "eqan-r" and not self.config.gamma > 0:
            raise ConfigError("mode eqan-r requires gamma > 0")

        F1, F2 = pair.F1.to(dtype), pair.F2.to(dtype)
        M = self.initial_affinity(pair)
        V, pre = self.init(F1, F2)

        features = [V]
        preactivations = [pre]
        masks: List[SampleMask] = []
        affinities: List[AffinityMatrix] = []
        generator = self._generator(seed)
        S = M.unary
        T_block = self.config.sinkhorn_T_train

        for block in self.blocks:
            mask, mask_values = None, None
            if self.mode == "eqan-r":
                mask, mask_values = self._draw_mask(S, generator, force_full_mask)
                masks.append(mask)
            affinities.append(M)
            out = block(V, M, T=T_block, eps=self.config.eps, mask=mask, mask_values=mask_values)
            if self.mode == "eqan-u":
                M = block.next_affinity(out.V, M)
            S = out.V_tilde.mean(dim=0)
            V = out.V
            features.append(V)
            preactivations.append(out.preactivation)

        V_all = torch.cat(features, dim=0)
        decision_in = V_all if self.config.decision_feature == "all" else V
        logits = self.decision(decision_in.unsqueeze(0)).squeeze(0).squeeze(0)
        R = torch.exp(logits)
        Q = log_sinkhorn(logits, self.decision_T()).exp()
        return ForwardResult(
            Q=Q,
            R=R,
            V_all=V_all,
            preactivations=preactivations,
            masks=masks,
            affinities=affinities,
        )

    def _generator(self, seed) -> torch.Generator:
        if isinstance(seed, torch.Generator):
            return seed
        return torch.Generator().manual_seed(0 if seed is None else int(seed))

    def _draw_mask(self, S: torch.Tensor, generator: torch.Generator, force_full: bool):
        """(mask, blending 값). blending 값은 guided sampling 일 때 STE 로 S 와 연결"""
        if force_full:
            S = S.detach()
            B = torch.ones(self.config.channels, *S.shape, dtype=S.dtype)
            q = torch.full_like(S, 1.0 / S.numel())
            return SampleMask(B=B, S=S, q=q, n_samples=S.numel()), None

        mask = sample_mask(S, self.config.gamma, self.config.channels, generator, scheme=self.config.sampling)
        if mask.is_full:
            return mask, None
        # uniform scheme 이거나 S 합이 0 이면 q 가 S 와 무관하므로 STE 경로 없음
        if self.config.sampling == "uniform" or float(mask.S.sum()) == 0.0:
            return mask, mask.B
        S_grad = S if self.config.ste_to_inputs else S.detach()
        return mask, MaskSTE.apply(S_grad, mask.B, mask.q)

    def num_parameters(self) -> int:
        return sum(p.numel() for p in self.parameters())

    def extra_repr(self) -> str:
        c = self.config
        return f"mode={c.mode}, solver={c.solver}, L={c.layers}, C={c.channels}, d={c.dim}"


def match_pair(model: EnsembleQAPNet, g1: Graph, g2: Graph, seed: int = 0) -> ForwardResult:
    """eval 모드 + no_grad 로 한 쌍 추론"""
    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            return model(PairInput.from_graphs(g1, g2, dtype=model.decision.weight.dtype), seed=seed)
    finally:
        model.train(was_training)
