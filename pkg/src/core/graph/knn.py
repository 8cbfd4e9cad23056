"""
k-Nearest-Neighbor Edge Construction

각 노드를 유클리드 거리 기준 k 개 최근접 이웃과 연결한 뒤 대칭화(합집합)합니다.
거리가 같으면 인덱스가 작은 노드를 먼저 고릅니다.
"""

from typing import Optional

import numpy as np

from core.errors import ConfigError, InputError


def pairwise_sq_distances(points: np.ndarray) -> np.ndarray:
    """(n, n) 제곱 유클리드 거리 행렬"""
    diff = points[:, None, :] - points[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _checked_points(points: np.ndarray, k: int) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise InputError(f"points must be (n, d), got shape {points.shape}")
    n = points.shape[0]
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if n <= k:
        raise ConfigError(f"knn_edges needs more than k nodes (n={n}, k={k})")
    if not np.isfinite(points).all():
        raise InputError("points contain non-finite values")
    return points


def _symmetric_pairs(sources: np.ndarray, neighbors: np.ndarray) -> np.ndarray:
    k = neighbors.shape[1]
    rows = np.repeat(sources.astype(np.int64), k)
    cols = neighbors.reshape(-1).astype(np.int64)
    pairs = np.stack([np.minimum(rows, cols), np.maximum(rows, cols)], axis=1)
    return np.unique(pairs, axis=0)


def knn_neighbors(points: np.ndarray, k: int, sources: Optional[np.ndarray] = None) -> np.ndarray:
    """
    sources 각 노드의 k 개 최근접 이웃 인덱스 (len(sources), k).

    Raises:
        ConfigError: n <= k 인 경우
        InputError: 좌표에 NaN/Inf 가 있는 경우
    """
    points = _checked_points(points, k)
    n = points.shape[0]
    sources = np.arange(n) if sources is None else np.asarray(sources, dtype=np.int64)
    dist = pairwise_sq_distances(points)[sources]
    dist[np.arange(sources.shape[0]), sources] = np.inf
    # stable sort: 동일 거리에서는 낮은 인덱스 우선
    return np.argsort(dist, axis=1, kind="stable")[:, :k]


def knn_edges(points: np.ndarray, k: int) -> np.ndarray:
    """
    k-NN edge 집합 생성.

    Args:
        points: (n, d) 좌표
        k: 노드당 이웃 수

    Returns:
        (E, 2) int64 edge 배열 (i < j, 사전순 정렬)

    Raises:
        ConfigError: n <= k 인 경우
        InputError: 좌표에 NaN/Inf 가 있는 경우
    """
    neighbors = knn_neighbors(points, k)
    return _symmetric_pairs(np.arange(neighbors.shape[0]), neighbors)


def knn_edges_from(points: np.ndarray, k: int, sources: np.ndarray) -> np.ndarray:
    """sources 노드만 자신의 k-NN 과 연결한 edge 집합"""
    sources = np.asarray(sources, dtype=np.int64)
    if sources.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    return _symmetric_pairs(sources, knn_neighbors(points, k, sources))
