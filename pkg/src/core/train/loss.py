"""
Matching Loss

inlier 행에 대한 binary cross entropy:

    loss = - sum_{i in inliers, j} [ x*_ij log Q_ij + (1 - x*_ij) log(1 - Q_ij) ]

Q 는 [1e-12, 1 - 1e-12] 로 clamp 합니다.
"""

import numpy as np
import torch

from core.errors import DomainError, InputError

CLAMP_LOW = 1e-12
CLAMP_HIGH = 1.0 - 1e-12


def target_matrix(gt, n_cols: int, dtype: torch.dtype = torch.float64) -> torch.Tensor:
    """정답 인덱스 (inlier 행 i -> 열 gt[i]) 를 (len(gt), n_cols) 0/1 텐서로"""
    idx = torch.as_tensor(np.asarray(gt), dtype=torch.long)
    if idx.dim() != 1:
        raise InputError(f"gt must be a 1D index array, got shape {tuple(idx.shape)}")
    if idx.numel() and (idx.min() < 0 or idx.max() >= n_cols):
        raise InputError("gt references a column outside the prediction")
    if torch.unique(idx).numel() != idx.numel():
        raise InputError("gt must be injective")
    target = torch.zeros(idx.numel(), n_cols, dtype=dtype)
    target[torch.arange(idx.numel()), idx] = 1.0
    return target


def matching_loss(Q: torch.Tensor, gt) -> torch.Tensor:
    """
    Args:
        Q: (n, n) soft prediction
        gt: 길이 m 정답 (앞쪽 m 개 행이 inlier)

    Returns:
        스칼라 loss (inlier 행 합)

    Raises:
        DomainError: Q 에 non-finite 항목
        InputError: gt 가 Q 와 맞지 않는 경우
    """
    if not torch.isfinite(Q).all():
        raise DomainError("prediction contains non-finite entries")
    target = target_matrix(gt, Q.shape[1], dtype=Q.dtype)
    if target.shape[0] > Q.shape[0]:
        raise InputError(f"gt has {target.shape[0]} rows but Q has {Q.shape[0]}")
    pred = torch.clamp(Q[: target.shape[0]], CLAMP_LOW, CLAMP_HIGH)
    return -(target * torch.log(pred) + (1.0 - target) * torch.log1p(-pred)).sum()
