"""
Graph Wire Schema

`generate` 서브커맨드가 출력하고 `match` 가 읽는 그래프 JSON 포맷.

    {"points": [[x, y], ...], "edges": [[i, j], ...], "n_inliers": m, "inliers": [p, ...]}

"inliers" 는 셔플된 query 처럼 inlier 가 앞쪽 행이 아닌 그래프에만 들어갑니다.
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from core.errors import InputError
from core.graph.types import Graph


# ============================================================================
# Graph Payload
# ============================================================================


class GraphPayload(BaseModel):
    """그래프 직렬화 스키마"""

    points: List[List[float]] = Field(..., description="(n, d) 좌표 행렬")
    edges: List[List[int]] = Field(default_factory=list, description="무방향 edge 리스트 [i, j]")
    n_inliers: int = Field(default=0, ge=0, description="inlier 노드 수")
    inliers: Optional[List[int]] = Field(default=None, description="inlier 노드 위치 (셔플된 그래프)")

    @field_validator("points")
    @classmethod
    def validate_points(cls, v):
        if v and len({len(row) for row in v}) != 1:
            raise ValueError("All points must have the same dimension")
        if v and len(v[0]) not in (2, 3):
            raise ValueError(f"Point dimension must be 2 or 3, got {len(v[0])}")
        return v

    @field_validator("edges")
    @classmethod
    def validate_edges(cls, v):
        for edge in v:
            if len(edge) != 2:
                raise ValueError(f"Each edge must have two endpoints, got {edge}")
        return v

    @model_validator(mode="after")
    def validate_inliers(self):
        if self.n_inliers > len(self.points):
            raise ValueError("n_inliers cannot exceed the number of points")
        if self.inliers is not None and len(set(self.inliers)) != self.n_inliers:
            raise ValueError("inliers must list n_inliers distinct positions")
        return self


class PairPayload(BaseModel):
    """(reference, query, gt) 한 쌍"""

    reference: GraphPayload
    query: GraphPayload
    gt: Optional[List[int]] = Field(default=None, description="reference inlier -> query 위치")
    seed: Optional[int] = Field(default=None, description="생성 시드")


# ============================================================================
# Conversion
# ============================================================================


def graph_to_payload(g: Graph) -> GraphPayload:
    """Graph -> GraphPayload (dummy 노드 제외)"""
    real_edges = g.edges[(g.edges < g.n_real).all(axis=1)]
    return GraphPayload(
        points=g.points[: g.n_real].tolist(),
        edges=real_edges.tolist(),
        n_inliers=g.n_inliers,
        inliers=None if g.inlier_index is None else g.inlier_index.tolist(),
    )


def graph_from_payload(payload: GraphPayload) -> Graph:
    """
    GraphPayload -> Graph

    Raises:
        InputError: 빈 그래프이거나 edge 가 범위를 벗어난 경우
    """
    if not payload.points:
        raise InputError("graph payload has no points")
    points = np.asarray(payload.points, dtype=np.float64)
    edges = np.asarray(payload.edges, dtype=np.int64).reshape(-1, 2)
    return Graph(
        points=points,
        edges=edges,
        n_inliers=payload.n_inliers,
        inlier_index=None if payload.inliers is None else np.asarray(payload.inliers, dtype=np.int64),
    )
