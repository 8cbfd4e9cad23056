"""
Matching Metrics

- matching_accuracy: ground truth 쌍 중 올바르게 맞춘 비율 (inlier 만)
- graph_similarity: r = tr(Q R)
- MatchResult: soft 예측 + hard 순열 + 정확도
"""

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
import torch

from core.errors import DomainError, InputError

from .hungarian import hungarian

ScoreSource = Literal["prediction", "reward"]


def matching_accuracy(pred: np.ndarray, gt: np.ndarray) -> float:
    """
    |{i : pred[i] == gt[i]}| / |gt|.

    Args:
        pred: 행 -> 열 할당 (길이 >= len(gt))
        gt: inlier 행 i 의 정답 열 (음수 항목은 정답 없음으로 제외)

    Raises:
        DomainError: 유효한 정답 쌍이 없는 경우
        InputError: pred 가 gt 보다 짧은 경우
    """
    pred = np.asarray(pred, dtype=np.int64).reshape(-1)
    gt = np.asarray(gt, dtype=np.int64).reshape(-1)
    valid = gt >= 0
    if not valid.any():
        raise DomainError("matching accuracy needs a nonempty ground truth")
    if pred.shape[0] < gt.shape[0]:
        raise InputError(f"prediction covers {pred.shape[0]} rows but gt has {gt.shape[0]}")
    hits = pred[: gt.shape[0]][valid] == gt[valid]
    return float(hits.sum()) / float(valid.sum())


def graph_similarity(Q, R) -> float:
    """
    r = tr(Q R).

    Raises:
        InputError: shape 불일치
    """
    Q = torch.as_tensor(Q)
    R = torch.as_tensor(R)
    if Q.dim() != 2 or Q.shape != R.shape:
        raise InputError(f"Q and R must have equal matrix shapes, got {tuple(Q.shape)} and {tuple(R.shape)}")
    return float(torch.sum(Q * R.transpose(0, 1).to(Q.dtype)))


def assignment_matrix(gt: np.ndarray, n_cols: int, n_rows: Optional[int] = None) -> np.ndarray:
    """정답 할당 x* (n_rows, n_cols) 0/1 행렬 (gt < 0 인 행은 0)"""
    gt = np.asarray(gt, dtype=np.int64)
    n_rows = gt.shape[0] if n_rows is None else n_rows
    x = np.zeros((n_rows, n_cols))
    rows = np.flatnonzero(gt >= 0)
    x[rows, gt[rows]] = 1.0
    return x


# ============================================================================
# Match Result
# ============================================================================


@dataclass
class MatchResult:
    """
    매칭 결과.

    Attributes:
        perm: 실제 행 -> 열 (dummy 열에 배정되면 -1)
        Q: soft prediction
        R: reward 행렬
        accuracy: gt 가 주어졌을 때의 정확도 (없으면 None)
        similarity: tr(Q R)
    """

    perm: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    accuracy: Optional[float] = None
    similarity: Optional[float] = None

    @classmethod
    def from_scores(
        cls,
        Q,
        R=None,
        gt: Optional[np.ndarray] = None,
        n_real_rows: Optional[int] = None,
        n_real_cols: Optional[int] = None,
        score_source: ScoreSource = "prediction",
    ) -> "MatchResult":
        """
        soft 점수에서 Hungarian 으로 hard 순열을 뽑고 정확도/유사도 계산.

        Args:
            Q: (n, n) soft prediction
            R: (n, n) reward (None 이면 Q)
            gt: inlier 정답 (reference inlier i -> query 열)
            n_real_rows, n_real_cols: dummy 를 제외한 실제 노드 수
            score_source: "prediction" 이면 Q, "reward" 면 R 로 할당
        """
        Q_np = torch.as_tensor(Q).detach().cpu().double().numpy()
        R_np = Q_np if R is None else torch.as_tensor(R).detach().cpu().double().numpy()
        if score_source not in ("prediction", "reward"):
            raise InputError(f"Invalid score source: {score_source}")
        score = Q_np if score_source == "prediction" else R_np

        perm = hungarian(score)
        rows = perm.shape[0] if n_real_rows is None else n_real_rows
        perm = perm[:rows]
        if n_real_cols is not None:
            perm = np.where(perm < n_real_cols, perm, -1)

        accuracy = matching_accuracy(perm, gt) if gt is not None else None
        return cls(
            perm=perm,
            Q=Q_np,
            R=R_np,
            accuracy=accuracy,
            similarity=graph_similarity(Q_np, R_np),
        )

    def to_dict(self) -> dict:
        return {
            "perm": self.perm.tolist(),
            "accuracy": self.accuracy,
            "similarity": self.similarity,
        }
