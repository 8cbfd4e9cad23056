"""
Sinkhorn Normalization

양수 행렬을 행/열 교대 스케일링으로 doubly stochastic 집합에 투영합니다.

- sinkhorn: 곱셈형 (a = 1 / (X b), b = 1 / (X^T a)), 분모는 1e-30 으로 하한
- log_sinkhorn: 같은 반복을 log 영역에서 수행 (exp 전 logits 를 그대로 받음)

두 함수 모두 마지막 두 축에 대해 동작하므로 (C, n, n) 배치 입력을 받습니다.
T 회 반복을 그대로 펼쳐서 autograd 가 통과합니다.
"""

import torch

from core.errors import DomainError

DIVISION_GUARD = 1e-30


def sinkhorn(X: torch.Tensor, T: int = 5) -> torch.Tensor:
    """
    Sinkhorn-Knopp 변환.

    Args:
        X: (..., n, n) 양수 행렬
        T: 반복 횟수

    Returns:
        Diag(a) X Diag(b)

    Raises:
        DomainError: 0 이하 또는 non-finite 항목
    """
    if T < 1:
        raise DomainError(f"Sinkhorn needs T >= 1, got {T}")
    if not torch.isfinite(X).all():
        raise DomainError("Sinkhorn input contains non-finite entries")
    if (X <= 0).any():
        raise DomainError("Sinkhorn input must be strictly positive")

    b = torch.ones_like(X[..., 0, :])
    for _ in range(T):
        a = 1.0 / torch.clamp((X * b.unsqueeze(-2)).sum(dim=-1), min=DIVISION_GUARD)
        b = 1.0 / torch.clamp((X * a.unsqueeze(-1)).sum(dim=-2), min=DIVISION_GUARD)
    return a.unsqueeze(-1) * X * b.unsqueeze(-2)


def log_sinkhorn(log_X: torch.Tensor, T: int = 5) -> torch.Tensor:
    """
    log 영역 Sinkhorn. sinkhorn(exp(log_X), T) 의 log 를 반환합니다.

    Raises:
        DomainError: NaN 또는 +inf 항목
    """
    if T < 1:
        raise DomainError(f"Sinkhorn needs T >= 1, got {T}")
    if torch.isnan(log_X).any() or torch.isposinf(log_X).any():
        raise DomainError("log-Sinkhorn input contains NaN or +inf")

    log_b = torch.zeros_like(log_X[..., 0, :])
    for _ in range(T):
        log_a = -torch.logsumexp(log_X + log_b.unsqueeze(-2), dim=-1)
        log_b = -torch.logsumexp(log_X + log_a.unsqueeze(-1), dim=-2)
    return log_X + log_a.unsqueeze(-1) + log_b.unsqueeze(-2)


def stochasticity_error(Y: torch.Tensor) -> float:
    """max |row sum - 1|, |col sum - 1|"""
    rows = (Y.sum(dim=-1) - 1).abs().max()
    cols = (Y.sum(dim=-2) - 1).abs().max()
    return float(torch.maximum(rows, cols))
