"""
Ensemble Block

C 개의 단일 채널 QAP solver step 을 병렬로 적용하고 1x1 conv 로 채널 정보를 섞습니다.

    Ṽ_c = solver_step(V_c + eps, M; w(l, c))
    V'  = ReLU(Conv1x1(Ṽ))

solver 내부 파라미터는 softplus 로 양수를 유지합니다. EQAN-U 에서는 block 이
자신의 출력으로 다음 block 의 affinity 를 만들 (w, u) 벡터도 가집니다.
"""

from dataclasses import dataclass
from typing import Dict, Optional

import torch
import torch.nn.functional as F
from torch import nn

from core.affinity.builder import update_affinity
from core.affinity.matrix import AffinityMatrix
from core.solvers.strategy import QAPSolver

from .init_module import inverse_softplus
from .sampling import SampleMask, blend_log


@dataclass
class BlockOutput:
    """한 block 의 출력"""

    V: torch.Tensor
    V_tilde: torch.Tensor
    preactivation: torch.Tensor


class EnsembleBlock(nn.Module):
    """
    EQAN block.

    Args:
        channels: 채널 수 C
        solver: QAP layer 로 쓸 solver
        layer: block 번호 (1부터)
        learn_solver_params: False 면 solver 파라미터를 (0, 1) 균등 난수로 고정
        affinity_update: True 면 다음 block 용 affinity 갱신 벡터 (w, u) 보유
    """

    def __init__(
        self,
        channels: int,
        solver: QAPSolver,
        layer: int,
        learn_solver_params: bool = True,
        affinity_update: bool = False,
    ):
        super().__init__()
        self.channels = channels
        self.solver = solver
        self.layer = layer
        self.learn_solver_params = learn_solver_params
        self.mix = nn.Conv2d(channels, channels, kernel_size=1)

        initial = solver.initial_weights(layer)
        for name in solver.weight_names:
            if learn_solver_params:
                raw = torch.full((channels,), inverse_softplus(initial[name]))
                self.register_parameter(f"raw_{name}", nn.Parameter(raw))
            else:
                fixed = torch.rand(channels).clamp_min(1e-3)
                self.register_buffer(f"fixed_{name}", fixed)

        if affinity_update:
            self.affinity_w = nn.Parameter(torch.full((channels,), 1.0 / channels))
            self.affinity_u = nn.Parameter(torch.zeros(channels))
        else:
            self.affinity_w = None
            self.affinity_u = None

    def solver_weights(self) -> Dict[str, torch.Tensor]:
        """채널별 양수 solver 파라미터 (C,)"""
        weights = {}
        for name in self.solver.weight_names:
            if self.learn_solver_params:
                weights[name] = F.softplus(getattr(self, f"raw_{name}"))
            else:
                weights[name] = getattr(self, f"fixed_{name}")
        return weights

    def forward(
        self,
        V: torch.Tensor,
        M: AffinityMatrix,
        T: int = 5,
        eps: float = 1e-5,
        mask: Optional[SampleMask] = None,
        mask_values: Optional[torch.Tensor] = None,
    ) -> BlockOutput:
        """
        Args:
            V: (C, n1, n2) 입력 특징
            M: 이 block 이 사용할 affinity
            T: solver 내부 Sinkhorn 반복 수
            eps: log 0 방지 상수
            mask: EQAN-R mask (None 이거나 full 이면 dense step)
            mask_values: mask.B 대신 blending 에 쓸 값 (STE 연결용)
        """
        z = V + eps
        log_candidate = self.solver.propose_log(z, M, self.solver_weights())
        if mask is not None and not mask.is_full:
            B = mask_values if mask_values is not None else mask.B
            log_candidate = blend_log(log_candidate, torch.log(z), B.to(z.dtype))
        V_tilde = self.solver.normalize_log(log_candidate, T)
        pre = self.mix(V_tilde.unsqueeze(0)).squeeze(0)
        return BlockOutput(V=torch.relu(pre), V_tilde=V_tilde, preactivation=pre)

    def next_affinity(self, V: torch.Tensor, M: AffinityMatrix) -> AffinityMatrix:
        """EQAN-U: 현재 출력으로 다음 block 의 affinity 계산"""
        if self.affinity_w is None:
            return M
        return update_affinity(V, self.affinity_w, self.affinity_u, M.topology)

    def extra_repr(self) -> str:
        return f"channels={self.channels}, solver={self.solver.kind}, layer={self.layer}"
