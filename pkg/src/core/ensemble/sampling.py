"""
Random Sampling (EQAN-R)

각 block/채널에서 association node 중 N_s = ceil(gamma * n * sqrt(n)) 개만 solver 로
갱신하고 나머지는 입력값을 복사합니다.

- sample_mask: 가중치 S 에 비례하는 확률 q 로 N_s 개 위치를 비복원 추출
- sampled_step: mask 위치만 solver 후보로 바꾸는 blending
- MaskSTE: mask 에 대한 gradient 를 S 로 전달하는 straight-through estimator
"""

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Union

import torch

from config.models import SamplingScheme
from core.affinity.matrix import AffinityMatrix
from core.errors import DomainError, InputError
from core.solvers.strategy import QAPSolver, Weight

logger = logging.getLogger(__name__)


# ============================================================================
# Sample Mask
# ============================================================================


@dataclass(frozen=True)
class SampleMask:
    """
    채널별 random mask.

    Attributes:
        B: (C, n1, n2) {0, 1} mask
        S: (n1, n2) sampling 가중치 (detach 된 값)
        q: (n1, n2) 추출 확률 (합 1)
        n_samples: 채널당 추출 수 N_s
    """

    B: torch.Tensor
    S: torch.Tensor
    q: torch.Tensor
    n_samples: int

    @property
    def is_full(self) -> bool:
        return self.n_samples >= self.q.numel()

    @property
    def active_entries(self) -> int:
        return int(self.B.sum())


def sample_count(n: int, gamma: float) -> int:
    """N_s = ceil(gamma * n * sqrt(n))"""
    return int(math.ceil(gamma * n * math.sqrt(n) - 1e-9))


def sampling_probabilities(S: torch.Tensor, scheme: SamplingScheme = "guided") -> torch.Tensor:
    """q = S / sum(S). 합이 0 이거나 uniform scheme 이면 균등 분포"""
    if scheme == "uniform":
        return torch.full_like(S, 1.0 / S.numel())
    total = S.sum()
    if float(total) <= 0.0:
        logger.warning("sampling weights sum to zero; falling back to uniform q")
        return torch.full_like(S, 1.0 / S.numel())
    return S / total


def _draw(q_flat: torch.Tensor, count: int, generator: torch.Generator) -> torch.Tensor:
    positive = torch.nonzero(q_flat > 0).reshape(-1)
    if positive.numel() >= count:
        return torch.multinomial(q_flat, count, replacement=False, generator=generator)
    # 양수 확률 항목이 부족하면 전부 고르고 나머지는 0 확률 항목에서 균등 추출
    zeros = torch.nonzero(q_flat <= 0).reshape(-1)
    extra = zeros[torch.randperm(zeros.numel(), generator=generator)[: count - positive.numel()]]
    return torch.cat([positive, extra])


def sample_mask(
    S: torch.Tensor,
    gamma: float,
    C: int,
    seed: Union[int, torch.Generator] = 0,
    scheme: SamplingScheme = "guided",
) -> SampleMask:
    """
    채널마다 독립적으로 N_s 개 위치를 q 가중 비복원 추출.

    Args:
        S: (n1, n2) 음이 아닌 sampling 가중치
        gamma: sampling 비율 (> 0)
        C: 채널 수
        seed: 정수 시드 또는 torch.Generator
        scheme: "guided" (q = S / sum S) 또는 "uniform"

    Raises:
        InputError: S 가 2D 가 아니거나 음수 항목을 가진 경우
        DomainError: gamma <= 0
    """
    if S.dim() != 2:
        raise InputError(f"S must be (n1, n2), got {tuple(S.shape)}")
    if not gamma > 0:
        raise DomainError(f"gamma must be > 0, got {gamma}")
    S = S.detach()
    if (S < 0).any() or not torch.isfinite(S).all():
        raise InputError("sampling weights must be finite and nonnegative")

    generator = seed if isinstance(seed, torch.Generator) else torch.Generator().manual_seed(int(seed))
    q = sampling_probabilities(S, scheme)
    total = q.numel()
    n_samples = min(sample_count(max(S.shape), gamma), total)

    B = torch.zeros(C, total, dtype=S.dtype)
    if n_samples >= total:
        B.fill_(1.0)
    else:
        q_flat = q.reshape(-1).to(torch.float64)
        for c in range(C):
            B[c, _draw(q_flat, n_samples, generator)] = 1.0
    return SampleMask(B=B.reshape(C, *S.shape), S=S, q=q, n_samples=n_samples)


# ============================================================================
# Straight-Through Estimator
# ============================================================================


def ste_backward(dL_dB: torch.Tensor, S: torch.Tensor, q: torch.Tensor) -> torch.Tensor:
    """
    dL/dS_ij = (1 / sum S) * sum_{c,t,k} dL/dB_{c,t,k} * (delta_{t:i} delta_{k:j} - q_ij)

    Raises:
        DomainError: sum S = 0
    """
    if dL_dB.dim() != 3 or tuple(dL_dB.shape[1:]) != tuple(S.shape) or S.shape != q.shape:
        raise InputError(
            f"shape mismatch: dL_dB {tuple(dL_dB.shape)}, S {tuple(S.shape)}, q {tuple(q.shape)}"
        )
    total = S.sum()
    if float(total) == 0.0:
        raise DomainError("STE needs sum(S) > 0")
    return (dL_dB.sum(dim=0) - q * dL_dB.sum()) / total


class MaskSTE(torch.autograd.Function):
    """forward 는 추출된 mask B 를 그대로 반환, backward 는 ste_backward 로 S 에 전달"""

    @staticmethod
    def forward(ctx, S: torch.Tensor, B: torch.Tensor, q: torch.Tensor) -> torch.Tensor:
        ctx.save_for_backward(S, q)
        return B.clone()

    @staticmethod
    def backward(ctx, grad_B: torch.Tensor):
        S, q = ctx.saved_tensors
        if float(S.sum()) == 0.0:
            return torch.zeros_like(S), None, None
        return ste_backward(grad_B, S, q), None, None


# ============================================================================
# Sampled Step
# ============================================================================


def blend_log(
    log_candidate: torch.Tensor, log_previous: torch.Tensor, B: torch.Tensor
) -> torch.Tensor:
    """
    log(B * exp(log_candidate) + (1 - B) * exp(log_previous)).

    두 항에 공통 상수를 빼서 계산하므로 exp overflow 가 없고, B 에 대한 gradient 는
    스케일 변환 전과 같습니다.
    """
    shift = torch.maximum(
        log_candidate.amax(dim=(-2, -1), keepdim=True),
        log_previous.amax(dim=(-2, -1), keepdim=True),
    ).detach()
    mixed = B * torch.exp(log_candidate - shift) + (1.0 - B) * torch.exp(log_previous - shift)
    return torch.log(torch.clamp(mixed, min=torch.finfo(mixed.dtype).tiny)) + shift


def sampled_step(
    z: torch.Tensor,
    z_prev: torch.Tensor,
    M: AffinityMatrix,
    solver: QAPSolver,
    weights: Optional[Mapping[str, Weight]],
    B: torch.Tensor,
) -> torch.Tensor:
    """
    정규화 전 blending: B=1 위치는 solver 후보, B=0 위치는 z_prev 를 복사.

    Returns:
        blend 된 z' (Sinkhorn 전, 양수)
    """
    log_candidate = solver.propose_log(z, M, weights or {})
    return torch.exp(blend_log(log_candidate, torch.log(z_prev), B))
