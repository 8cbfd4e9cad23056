"""
Affinity Construction

- build_affinity: 좌표/특징 기반 Gaussian edge kernel + unary 항
- koopman_beckmann: M = A1 ⊗ A2 (unary 0)
- update_affinity: association 특징 V 로부터 M 재계산 (학습 파라미터 w, u)

모든 연산은 torch 로 작성되어 sigma_aff, w, u, V 에 대한 gradient 가 흐릅니다.
"""

from typing import Union

import numpy as np
import torch

from config.models import UnaryMode
from core.errors import ConfigError, InputError
from core.graph.types import Graph, canonical_edges

from .matrix import AffinityMatrix, AssociationTopology

TensorLike = Union[np.ndarray, torch.Tensor]


def _as_tensor(x: TensorLike, dtype: torch.dtype) -> torch.Tensor:
    if isinstance(x, torch.Tensor):
        return x.to(dtype)
    return torch.as_tensor(np.asarray(x), dtype=dtype)


def _edge_lengths(features: torch.Tensor, edges: np.ndarray) -> torch.Tensor:
    if edges.shape[0] == 0:
        return features.new_zeros(0)
    idx = torch.as_tensor(edges, dtype=torch.long)
    return torch.linalg.vector_norm(features[idx[:, 0]] - features[idx[:, 1]], dim=-1)


def build_affinity(
    F1: TensorLike,
    F2: TensorLike,
    G1: Graph,
    G2: Graph,
    sigma_aff: Union[float, torch.Tensor] = 1.0,
    unary_mode: UnaryMode = "gaussian",
    dtype: torch.dtype = torch.float64,
) -> AffinityMatrix:
    """
    특징 행렬과 그래프 구조로 affinity 행렬 구성.

    pairwise: exp(-|d1_{ii'} - d2_{jj'}|^2 / sigma^2)  (E1 x E2 의 모든 edge 쌍)
    unary:
        - "gaussian":   exp(-||F1_i - F2_j||^2 / sigma^2)
        - "distance": ||F1_i - F2_j||
    dummy 노드가 낀 unary 항은 0 입니다.

    Args:
        F1, F2: (n1, d), (n2, d) 특징 (기하 매칭에서는 정규화된 좌표)
        G1, G2: edge 구조를 제공하는 그래프
        sigma_aff: kernel bandwidth (float 또는 학습 가능한 scalar tensor)
        unary_mode: unary 항 모드
        dtype: 결과 dtype

    Raises:
        InputError: shape 불일치 또는 non-finite 특징
        ConfigError: sigma_aff <= 0 또는 알 수 없는 unary_mode
    """
    f1 = _as_tensor(F1, dtype)
    f2 = _as_tensor(F2, dtype)
    if f1.dim() != 2 or f2.dim() != 2 or f1.shape[1] != f2.shape[1]:
        raise InputError(
            f"feature matrices must be (n1, d) and (n2, d), got {tuple(f1.shape)} and {tuple(f2.shape)}"
        )
    if f1.shape[0] != G1.n or f2.shape[0] != G2.n:
        raise InputError("feature rows must match graph node counts")
    if not (torch.isfinite(f1).all() and torch.isfinite(f2).all()):
        raise InputError("features contain non-finite values")

    sigma = sigma_aff if isinstance(sigma_aff, torch.Tensor) else torch.tensor(float(sigma_aff), dtype=dtype)
    sigma = sigma.to(dtype)
    if not bool(sigma.detach() > 0):
        raise ConfigError(f"sigma_aff must be > 0, got {float(sigma.detach())}")
    sigma_sq = sigma * sigma

    topo = AssociationTopology.from_graphs(G1, G2)

    len1 = _edge_lengths(f1, G1.edges)
    len2 = _edge_lengths(f2, G2.edges)
    diff = len1[topo.e1_idx] - len2[topo.e2_idx]
    pairwise = torch.exp(-(diff * diff) / sigma_sq)

    delta = f1[:, None, :] - f2[None, :, :]
    if unary_mode == "gaussian":
        unary = torch.exp(-(delta * delta).sum(dim=-1) / sigma_sq)
    elif unary_mode == "distance":
        unary = torch.linalg.vector_norm(delta, dim=-1)
    else:
        raise ConfigError(f"Invalid unary mode: {unary_mode}")
    unary = unary * topo.unary_mask.to(dtype)

    sigma_value = float(sigma.detach())
    return AffinityMatrix(topology=topo, unary=unary, pairwise=pairwise, sigma_aff=sigma_value)


def koopman_beckmann(A1: np.ndarray, A2: np.ndarray, dtype: torch.dtype = torch.float64) -> AffinityMatrix:
    """
    Koopman-Beckmann affinity: pairwise 항 1 (두 edge 가 모두 존재할 때), unary 0.

    Raises:
        InputError: 대칭 0/1 정방 행렬이 아닌 경우
    """
    mats = []
    for name, A in (("A1", A1), ("A2", A2)):
        A = np.asarray(A)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InputError(f"{name} must be a square matrix, got shape {A.shape}")
        if not np.isin(A, (0, 1)).all():
            raise InputError(f"{name} must be a 0/1 adjacency matrix")
        if not np.array_equal(A, A.T):
            raise InputError(f"{name} must be symmetric")
        if np.diag(A).any():
            raise InputError(f"{name} must not contain self-loops")
        mats.append(A)

    edges = [canonical_edges(np.argwhere(np.triu(A, k=1)), A.shape[0]) for A in mats]
    n1, n2 = mats[0].shape[0], mats[1].shape[0]
    topo = AssociationTopology.from_edges(edges[0], edges[1], n1, n2)
    return AffinityMatrix(
        topology=topo,
        unary=torch.zeros(n1, n2, dtype=dtype),
        pairwise=torch.ones(topo.num_stored, dtype=dtype),
    )


def update_affinity(
    V: torch.Tensor,
    w: torch.Tensor,
    u: torch.Tensor,
    topology: AssociationTopology,
) -> AffinityMatrix:
    """
    association 특징 V (C, n1, n2) 로부터 affinity 재계산.

    pairwise: exp(-w^T (V[:, i, j] - V[:, i', j'])^2)  (입력 그래프의 edge 곱 패턴 재사용)
    unary:    exp(u^T V[:, i, j])  (dummy 가 낀 항은 0)

    Raises:
        InputError: shape 불일치
    """
    if V.dim() != 3 or tuple(V.shape[1:]) != (topology.n1, topology.n2):
        raise InputError(
            f"V must be (C, {topology.n1}, {topology.n2}), got {tuple(V.shape)}"
        )
    C = V.shape[0]
    if tuple(w.shape) != (C,) or tuple(u.shape) != (C,):
        raise InputError(f"w and u must be length-{C} vectors")

    flat = V.reshape(C, topology.size)
    diff = flat[:, topology.rows] - flat[:, topology.cols]
    pairwise = torch.exp(-torch.einsum("c,cp->p", w.to(V.dtype), diff * diff))
    unary = torch.exp(torch.einsum("c,cij->ij", u.to(V.dtype), V))
    unary = unary * topology.unary_mask.to(V.dtype)
    return AffinityMatrix(topology=topology, unary=unary, pairwise=pairwise)
