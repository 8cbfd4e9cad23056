"""
Graph Data Types

합성 기하 그래프 표현. 좌표 행렬 + 무방향 edge 리스트 + inlier/dummy 개수.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.errors import InputError


# ============================================================================
# Graph
# ============================================================================


@dataclass(frozen=True)
class Graph:
    """
    무방향 기하 그래프 (불변 객체).

    Attributes:
        points: (n, d) 좌표 행렬
        edges: (E, 2) int64, 각 행 (i, j) 는 i < j, 사전순 정렬, 중복 없음
        n_inliers: outlier 가 아닌 노드 수
        n_dummies: 크기 맞춤용 dummy 노드 수 (항상 마지막 행들, edge 없음)
        inlier_index: 셔플된 그래프의 inlier 위치 (오름차순). None 이면 앞쪽
            n_inliers 개 행이 inlier
    """

    points: np.ndarray
    edges: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=np.int64))
    n_inliers: int = 0
    n_dummies: int = 0
    inlier_index: Optional[np.ndarray] = None

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2:
            raise InputError(f"points must be a 2D matrix, got shape {points.shape}")
        edges = canonical_edges(self.edges, points.shape[0])
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "edges", edges)
        points.setflags(write=False)
        edges.setflags(write=False)

        if not 0 <= self.n_dummies <= self.n:
            raise InputError(f"n_dummies out of range: {self.n_dummies}")
        if not 0 <= self.n_inliers <= self.n_real:
            raise InputError(
                f"n_inliers must be <= number of real nodes ({self.n_real}), got {self.n_inliers}"
            )
        if self.n_dummies and edges.size and edges.max() >= self.n_real:
            raise InputError("dummy nodes must not carry edges")

        if self.inlier_index is not None:
            index = np.unique(np.asarray(self.inlier_index, dtype=np.int64).reshape(-1))
            if index.shape[0] != self.n_inliers or (index.size and (index[0] < 0 or index[-1] >= self.n_real)):
                raise InputError(
                    f"inlier_index must list {self.n_inliers} distinct real-node positions"
                )
            index.setflags(write=False)
            object.__setattr__(self, "inlier_index", index)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_real(self) -> int:
        return self.n - self.n_dummies

    @property
    def inlier_positions(self) -> np.ndarray:
        """inlier 노드 위치 (오름차순)"""
        if self.inlier_index is not None:
            return self.inlier_index
        return np.arange(self.n_inliers, dtype=np.int64)

    @property
    def num_edges(self) -> int:
        return self.edges.shape[0]

    def degrees(self) -> np.ndarray:
        """노드별 degree"""
        deg = np.zeros(self.n, dtype=np.int64)
        np.add.at(deg, self.edges[:, 0], 1)
        np.add.at(deg, self.edges[:, 1], 1)
        return deg

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    def __repr__(self) -> str:
        return (
            f"Graph(n={self.n}, d={self.dim}, edges={self.num_edges}, "
            f"n_inliers={self.n_inliers}, n_dummies={self.n_dummies})"
        )


# ============================================================================
# Helpers
# ============================================================================


def canonical_edges(edges, n: int) -> np.ndarray:
    """
    edge 배열을 (i < j, 사전순, 중복 제거) 형태로 정규화.

    Raises:
        InputError: self-loop 또는 범위를 벗어난 노드 인덱스
    """
    arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if (arr < 0).any() or (arr >= n).any():
        raise InputError(f"edge references a node index outside [0, {n})")
    if (arr[:, 0] == arr[:, 1]).any():
        raise InputError("self-loop edges are not allowed")
    arr = np.sort(arr, axis=1)
    return np.unique(arr, axis=0)


def adjacency(g: Graph) -> np.ndarray:
    """(n, n) 0/1 대칭 인접 행렬"""
    adj = np.zeros((g.n, g.n), dtype=np.float64)
    adj[g.edges[:, 0], g.edges[:, 1]] = 1.0
    adj[g.edges[:, 1], g.edges[:, 0]] = 1.0
    return adj
