"""
Synthetic Geometric Graph Generator

학습/강건성 실험용 합성 그래프 생성기.
reference 그래프를 [-1, 1]^d 에서 균등 샘플링하고, 복제본에 Gaussian noise,
outlier, 회전, 노드 셔플을 적용해 query 그래프와 ground truth 를 만듭니다.

모든 확률 연산은 (seed, stream) 으로 명시적으로 시드된 numpy Generator 를 사용합니다.
"""

from dataclasses import dataclass, replace
from typing import Iterator, List, Optional, Tuple

import numpy as np

from config.models import GenConfig
from core.errors import InputError, UnsupportedDimensionError

from .knn import knn_edges, knn_edges_from
from .types import Graph


# ============================================================================
# RNG Streams
# ============================================================================

STREAM_REFERENCE = 0
STREAM_PERTURB = 1


def make_rng(seed: int, stream: int) -> np.random.Generator:
    """(seed, stream) 으로 분기된 독립 Generator"""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(stream)]))


def derive_seed(base_seed: int, index: int) -> int:
    """base_seed 의 index 번째 자식 시드 (재현 가능, 순서 무관)"""
    state = np.random.SeedSequence([int(base_seed), int(index)]).generate_state(1)
    return int(state[0])


# ============================================================================
# Generation
# ============================================================================


def _edges_for(points: np.ndarray, k: int) -> np.ndarray:
    if points.shape[0] <= 1:
        return np.zeros((0, 2), dtype=np.int64)
    return knn_edges(points, k)


def generate_reference(
    cfg: GenConfig, rng: Optional[np.random.Generator] = None
) -> Graph:
    """
    reference 그래프 생성: n_in 개 노드를 [-1, 1]^d 에서 i.i.d. 균등 샘플링.

    Args:
        cfg: 생성 설정
        rng: 외부 Generator (None 이면 cfg.seed 의 reference stream)

    Returns:
        k-NN edge 를 가진 Graph (모든 노드가 inlier)
    """
    rng = rng if rng is not None else make_rng(cfg.seed, STREAM_REFERENCE)
    points = rng.uniform(-1.0, 1.0, size=(cfg.n_in, cfg.dim))
    return Graph(points=points, edges=_edges_for(points, cfg.k), n_inliers=cfg.n_in)


def perturb(
    ref: Graph,
    cfg: GenConfig,
    rng: Optional[np.random.Generator] = None,
    shuffle: bool = True,
) -> Tuple[Graph, np.ndarray]:
    """
    reference 로부터 query 그래프 생성.

    inlier 좌표 + N(0, sigma^2) noise, n_out 개 균등 outlier 추가,
    (max_rotation_deg > 0 이면) 무작위 회전, 노드 순서 셔플.
    edge 는 cfg.query_edges 에 따라 k-NN 으로 재구성하거나 reference 에서 복제합니다.
    query 의 inlier 위치는 Graph.inlier_index 로 기록됩니다.

    Returns:
        (query, gt): gt[i] 는 reference inlier i 의 query 내 위치

    Raises:
        InputError: ref 의 차원이 cfg.dim 과 다르거나 inlier 가 앞쪽 행이 아닌 경우
    """
    if ref.dim != cfg.dim:
        raise InputError(f"reference dim {ref.dim} does not match cfg.dim {cfg.dim}")
    if ref.inlier_index is not None:
        raise InputError("reference inliers must be its leading rows")
    rng = rng if rng is not None else make_rng(cfg.seed, STREAM_PERTURB)

    inliers = ref.points[: ref.n_inliers]
    noisy = inliers + rng.normal(0.0, cfg.sigma, size=inliers.shape)
    outliers = rng.uniform(-1.0, 1.0, size=(cfg.n_out, cfg.dim))
    combined = np.concatenate([noisy, outliers], axis=0)

    if cfg.max_rotation_deg > 0:
        theta = np.deg2rad(rng.uniform(0.0, cfg.max_rotation_deg))
        combined = combined @ rotation_matrix(theta).T

    n = combined.shape[0]
    position = rng.permutation(n) if shuffle else np.arange(n)
    points = np.empty_like(combined)
    points[position] = combined

    gt = position[: ref.n_inliers].astype(np.int64)
    if cfg.query_edges == "copy":
        edges = _copied_edges(ref, points, position, cfg.k)
    else:
        edges = _edges_for(points, cfg.k)
    query = Graph(points=points, edges=edges, n_inliers=ref.n_inliers, inlier_index=gt)
    return query, gt


def _copied_edges(ref: Graph, points: np.ndarray, position: np.ndarray, k: int) -> np.ndarray:
    """reference edge 를 셔플 위치로 옮기고, outlier 는 query 전체에서 k-NN 으로 연결"""
    inlier_edges = position[ref.edges] if ref.num_edges else np.zeros((0, 2), dtype=np.int64)
    outliers = position[ref.n_inliers :]
    if outliers.size == 0 or points.shape[0] <= k:
        return inlier_edges
    return np.concatenate([inlier_edges, knn_edges_from(points, k, outliers)], axis=0)


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotate(g: Graph, theta: float) -> Graph:
    """
    2D 좌표 전체를 theta 라디안 회전. edge 는 그대로 유지.

    Raises:
        UnsupportedDimensionError: d != 2
    """
    if g.dim != 2:
        raise UnsupportedDimensionError(f"rotation is only defined for 2D points, got d={g.dim}")
    points = g.points @ rotation_matrix(theta).T
    return Graph(
        points=points,
        edges=g.edges,
        n_inliers=g.n_inliers,
        n_dummies=g.n_dummies,
        inlier_index=g.inlier_index,
    )


# ============================================================================
# Padding / Normalization
# ============================================================================


def pad_graph(g: Graph, n: int) -> Graph:
    """
    dummy 노드(원점 좌표, edge 없음)를 덧붙여 크기를 n 으로 맞춤.

    Raises:
        InputError: n < g.n
    """
    if n < g.n:
        raise InputError(f"cannot pad a graph of {g.n} nodes down to {n}")
    if n == g.n:
        return g
    extra = np.zeros((n - g.n, g.dim))
    return Graph(
        points=np.concatenate([g.points, extra], axis=0),
        edges=g.edges,
        n_inliers=g.n_inliers,
        n_dummies=g.n_dummies + (n - g.n),
        inlier_index=g.inlier_index,
    )


def normalize_points(g: Graph) -> np.ndarray:
    """
    실 노드 좌표를 평균 0, 단일 스칼라 표준편차 1 로 정규화한 (n, d) 행렬.

    스칼라 표준편차를 쓰므로 회전은 정규화 후에도 회전으로 남습니다.
    dummy 행은 0 으로 둡니다.
    """
    out = np.zeros_like(g.points)
    real = g.points[: g.n_real]
    if real.shape[0] == 0:
        return out
    centered = real - real.mean(axis=0, keepdims=True)
    scale = float(np.sqrt((centered**2).sum(axis=1).mean() / g.dim))
    out[: g.n_real] = centered / scale if scale > 0 else centered
    return out


# ============================================================================
# Pair Stream
# ============================================================================


@dataclass(frozen=True)
class GraphPair:
    """(reference, query, gt) 한 쌍"""

    reference: Graph
    query: Graph
    gt: np.ndarray
    seed: int


def make_pair(cfg: GenConfig) -> GraphPair:
    """cfg.seed 로 완전히 결정되는 한 쌍"""
    ref = generate_reference(cfg)
    query, gt = perturb(ref, cfg)
    return GraphPair(reference=ref, query=query, gt=gt, seed=cfg.seed)


class PairStream:
    """
    시드 기반 (reference, query, gt) 스트림.

    i 번째 쌍은 derive_seed(base_seed, i) 로만 결정되므로 임의 위치에서 재생성 가능합니다.

    사용법:
        stream = PairStream(GenConfig(n_in=35, n_out=15, sigma=0.1), base_seed=7)
        for pair in stream.take(8):
            ...
    """

    def __init__(self, cfg: GenConfig, base_seed: int = 0, start: int = 0):
        self.cfg = cfg
        self.base_seed = base_seed
        self._cursor = start

    def pair_at(self, index: int) -> GraphPair:
        return make_pair(replace(self.cfg, seed=derive_seed(self.base_seed, index)))

    def take(self, count: int) -> List[GraphPair]:
        pairs = [self.pair_at(self._cursor + i) for i in range(count)]
        self._cursor += count
        return pairs

    def __iter__(self) -> Iterator[GraphPair]:
        while True:
            yield self.pair_at(self._cursor)
            self._cursor += 1
