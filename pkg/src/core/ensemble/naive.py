"""
Naive Ensemble

C 개의 solver 를 서로 독립적으로 K step 실행한 뒤 마지막에만 학습 가능한
스칼라 가중치로 평균합니다. 채널 사이 정보 교환 (1x1 conv) 이 없는 비교 기준입니다.

    z_c = solver^K(M; w_c)            c = 1..C
    Q   = sum_c a_c z_c,  a = softmax(raw)
"""

from typing import Optional, Union

import torch
import torch.nn.functional as F
from torch import nn

from config.models import AffinityConfig, SolverKind
from core.affinity.builder import build_affinity
from core.solvers.factory import SolverFactory
from core.solvers.strategy import qap_layer

from .init_module import PairInput, inverse_softplus
from .model import ForwardResult


class NaiveEnsemble(nn.Module):
    """
    가중 평균 ensemble.

    Args:
        channels: 독립 solver 수
        steps: solver 반복 수 K
        solver: solver 종류
        affinity: affinity 구성 설정 (sigma 는 고정)
        seed: 채널별 solver 파라미터 초기화 시드 (대칭성 깨기)
    """

    def __init__(
        self,
        channels: int = 8,
        steps: int = 3,
        solver: SolverKind = "dpgm",
        affinity: AffinityConfig = AffinityConfig(),
        sinkhorn_T: int = 5,
        sinkhorn_T_eval: int = 50,
        seed: Optional[int] = 0,
    ):
        super().__init__()
        self.channels = channels
        self.steps = steps
        self.affinity = affinity
        self.sinkhorn_T = sinkhorn_T
        self.sinkhorn_T_eval = sinkhorn_T_eval
        self.solver = SolverFactory.from_kind(solver)

        generator = torch.Generator().manual_seed(0 if seed is None else seed)
        initial = self.solver.initial_weights(1)
        self.raw_weights = nn.ParameterDict()
        for name in self.solver.weight_names:
            spread = 0.5 + torch.rand(channels, generator=generator)
            raw = torch.tensor([inverse_softplus(initial[name] * float(s)) for s in spread])
            self.raw_weights[name] = nn.Parameter(raw)
        self.raw_mix = nn.Parameter(torch.zeros(channels))

    def solver_weights(self):
        return {name: F.softplus(raw) for name, raw in self.raw_weights.items()}

    def mixing_weights(self) -> torch.Tensor:
        return torch.softmax(self.raw_mix, dim=0)

    def forward(self, pair: Union[PairInput, tuple], seed=None) -> ForwardResult:
        dtype = self.raw_mix.dtype
        if isinstance(pair, tuple):
            pair = PairInput.from_graphs(*pair, dtype=dtype)
        M = build_affinity(
            pair.F1.to(dtype),
            pair.F2.to(dtype),
            pair.g1,
            pair.g2,
            sigma_aff=self.affinity.sigma_aff,
            unary_mode=self.affinity.unary_mode,
            dtype=dtype,
        )
        n = pair.n
        T = self.sinkhorn_T if self.training else self.sinkhorn_T_eval
        weights = self.solver_weights()

        z = torch.full((self.channels, n, n), 1.0 / n, dtype=dtype)
        for _ in range(self.steps):
            z = qap_layer(z, M, self.solver, weights, T)

        Q = torch.einsum("c,cij->ij", self.mixing_weights(), z)
        return ForwardResult(Q=Q, R=Q, V_all=z, affinities=[M])
