"""
Initialization Module

그래프 쌍을 association 특징 텐서 V(0) 와 초기 affinity M 으로 변환합니다.

    V̂_{:, i, j} = [ |F1_i - F2_j|, F1_i, F2_j ]   (3d 채널)
    V(0)        = ReLU(Conv1x1(V̂))
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import torch
from torch import nn

from core.affinity.matrix import AssociationTopology
from core.errors import InputError
from core.graph.generator import normalize_points, pad_graph
from core.graph.types import Graph


# ============================================================================
# Pair Input
# ============================================================================


@dataclass(frozen=True)
class PairInput:
    """
    모델 입력으로 준비된 그래프 쌍 (같은 크기로 padding, 좌표 정규화 완료).

    Attributes:
        g1, g2: padding 된 그래프
        F1, F2: (n, d) 정규화 좌표 특징
        topology: association 구조
    """

    g1: Graph
    g2: Graph
    F1: torch.Tensor
    F2: torch.Tensor
    topology: AssociationTopology

    @property
    def n(self) -> int:
        return self.g1.n

    @classmethod
    def from_graphs(cls, g1: Graph, g2: Graph, dtype: torch.dtype = torch.float32) -> "PairInput":
        """
        작은 쪽 그래프를 dummy 로 채워 크기를 맞추고 각 그래프 좌표를 정규화.

        Raises:
            InputError: 빈 그래프 또는 좌표 차원 불일치
        """
        if g1.n == 0 or g2.n == 0:
            raise InputError("graphs must be nonempty")
        if g1.dim != g2.dim:
            raise InputError(f"coordinate dimensions differ: {g1.dim} vs {g2.dim}")
        n = max(g1.n, g2.n)
        g1, g2 = pad_graph(g1, n), pad_graph(g2, n)
        return cls(
            g1=g1,
            g2=g2,
            F1=torch.as_tensor(normalize_points(g1), dtype=dtype),
            F2=torch.as_tensor(normalize_points(g2), dtype=dtype),
            topology=AssociationTopology.from_graphs(g1, g2),
        )

    def to(self, dtype: torch.dtype) -> "PairInput":
        return PairInput(self.g1, self.g2, self.F1.to(dtype), self.F2.to(dtype), self.topology)


# ============================================================================
# Association Features
# ============================================================================


def association_features(F1: torch.Tensor, F2: torch.Tensor) -> torch.Tensor:
    """
    V̂ (3d, n1, n2) 구성.

    Raises:
        InputError: 특징 차원 불일치
    """
    if F1.dim() != 2 or F2.dim() != 2 or F1.shape[1] != F2.shape[1]:
        raise InputError(
            f"features must be (n1, d) and (n2, d), got {tuple(F1.shape)} and {tuple(F2.shape)}"
        )
    n1, n2 = F1.shape[0], F2.shape[0]
    left = F1.t()[:, :, None].expand(-1, n1, n2)
    right = F2.t()[:, None, :].expand(-1, n1, n2)
    return torch.cat([(left - right).abs(), left, right], dim=0)


class InitModule(nn.Module):
    """V̂ -> ReLU(Conv1x1) 로 C 채널 association 특징 생성"""

    def __init__(self, dim: int, channels: int):
        super().__init__()
        self.dim = dim
        self.conv = nn.Conv2d(3 * dim, channels, kernel_size=1)

    def forward(self, F1: torch.Tensor, F2: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        """
        Returns:
            (V0, preactivation): 둘 다 (C, n1, n2)
        """
        if F1.shape[1] != self.dim:
            raise InputError(f"expected {self.dim}-dimensional features, got {F1.shape[1]}")
        features = association_features(F1, F2)
        pre = self.conv(features.unsqueeze(0)).squeeze(0)
        return torch.relu(pre), pre


def inverse_softplus(value: float) -> float:
    """softplus(x) = value 인 x"""
    return float(value + np.log(-np.expm1(-value)))
