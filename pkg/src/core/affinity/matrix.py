"""
Sparse Affinity Matrix

association graph 위의 affinity 행렬 M (n1*n2 x n1*n2).

- unary: (n1, n2) dense 블록, [M]_{ii,jj}
- pairwise: E1 x E2 edge 곱 위치에만 저장되는 양수 가중치

저장 키는 (i, i', j, j') 이며 i < i' 로 정규화됩니다. edge 쌍마다 두 방향
(a,b,c,d) 와 (a,b,d,c) 를 저장하고, 대칭 항은 matvec 시점에 만듭니다.
association node (i, j) 의 flat 인덱스는 i * n2 + j (Kronecker 순서) 입니다.
"""

from dataclasses import dataclass
from typing import Optional, TextIO, Tuple, Union

import numpy as np
import torch

from core.errors import InputError
from core.graph.types import Graph


# ============================================================================
# Association Topology
# ============================================================================


@dataclass(frozen=True)
class AssociationTopology:
    """
    두 그래프의 association 구조 (가중치와 무관한 인덱스만 보관).

    Attributes:
        n1, n2: 두 그래프의 노드 수 (dummy 포함)
        rows, cols: (P,) 저장된 pairwise 항의 flat 인덱스 (rows -> (a, j0), cols -> (b, j1))
        e1_idx, e2_idx: (P,) 각 항이 유래한 E1 / E2 edge 번호
        unary_mask: (n1, n2) 실 노드끼리의 쌍이면 1, dummy 가 끼면 0
    """

    n1: int
    n2: int
    rows: torch.Tensor
    cols: torch.Tensor
    e1_idx: torch.Tensor
    e2_idx: torch.Tensor
    unary_mask: torch.Tensor

    @property
    def size(self) -> int:
        return self.n1 * self.n2

    @property
    def num_stored(self) -> int:
        return int(self.rows.shape[0])

    @classmethod
    def from_edges(
        cls,
        edges1: np.ndarray,
        edges2: np.ndarray,
        n1: int,
        n2: int,
        n1_real: Optional[int] = None,
        n2_real: Optional[int] = None,
    ) -> "AssociationTopology":
        e1 = np.asarray(edges1, dtype=np.int64).reshape(-1, 2)
        e2 = np.asarray(edges2, dtype=np.int64).reshape(-1, 2)
        m1, m2 = e1.shape[0], e2.shape[0]

        e1_idx = np.repeat(np.arange(m1), 2 * m2)
        e2_idx = np.tile(np.repeat(np.arange(m2), 2), m1)
        flipped = np.tile(np.array([False, True]), m1 * m2)

        a, b = e1[e1_idx, 0], e1[e1_idx, 1]
        c, d = e2[e2_idx, 0], e2[e2_idx, 1]
        j0 = np.where(flipped, d, c)
        j1 = np.where(flipped, c, d)

        mask = np.zeros((n1, n2))
        mask[: n1 if n1_real is None else n1_real, : n2 if n2_real is None else n2_real] = 1.0

        return cls(
            n1=n1,
            n2=n2,
            rows=torch.as_tensor(a * n2 + j0, dtype=torch.long),
            cols=torch.as_tensor(b * n2 + j1, dtype=torch.long),
            e1_idx=torch.as_tensor(e1_idx, dtype=torch.long),
            e2_idx=torch.as_tensor(e2_idx, dtype=torch.long),
            unary_mask=torch.as_tensor(mask),
        )

    @classmethod
    def from_graphs(cls, g1: Graph, g2: Graph) -> "AssociationTopology":
        return cls.from_edges(g1.edges, g2.edges, g1.n, g2.n, g1.n_real, g2.n_real)

    def quads(self) -> np.ndarray:
        """(P, 4) 저장 키 (i, i', j, j')"""
        rows = self.rows.numpy()
        cols = self.cols.numpy()
        return np.stack(
            [rows // self.n2, cols // self.n2, rows % self.n2, cols % self.n2], axis=1
        )


# ============================================================================
# Affinity Matrix
# ============================================================================


@dataclass(frozen=True)
class AffinityMatrix:
    """
    불변 sparse affinity 행렬.

    Attributes:
        topology: association 인덱스 구조
        unary: (n1, n2) 대각 블록
        pairwise: (P,) 저장된 pairwise 가중치 (topology.rows/cols 와 정렬)
        sigma_aff: 생성에 사용한 kernel bandwidth (없으면 None)
    """

    topology: AssociationTopology
    unary: torch.Tensor
    pairwise: torch.Tensor
    sigma_aff: Optional[float] = None

    def __post_init__(self):
        topo = self.topology
        if tuple(self.unary.shape) != (topo.n1, topo.n2):
            raise InputError(
                f"unary block must be ({topo.n1}, {topo.n2}), got {tuple(self.unary.shape)}"
            )
        if self.pairwise.shape != (topo.num_stored,):
            raise InputError(
                f"pairwise weights must have {topo.num_stored} entries, got {tuple(self.pairwise.shape)}"
            )

    @property
    def n1(self) -> int:
        return self.topology.n1

    @property
    def n2(self) -> int:
        return self.topology.n2

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.topology.size, self.topology.size)

    @property
    def dtype(self) -> torch.dtype:
        return self.unary.dtype

    @property
    def num_stored(self) -> int:
        return self.topology.num_stored

    def matvec(self, z: torch.Tensor) -> torch.Tensor:
        """M z. z 는 (..., n1*n2) 또는 (..., n1, n2) 이며 같은 shape 로 반환"""
        return affinity_matvec(self, z)

    def to_dense(self) -> torch.Tensor:
        """(n1*n2, n1*n2) dense 행렬 (oracle/진단용)"""
        size = self.topology.size
        dense = torch.zeros(size, size, dtype=self.dtype)
        dense = dense.index_put(
            (self.topology.rows, self.topology.cols), self.pairwise, accumulate=True
        )
        dense = dense.index_put(
            (self.topology.cols, self.topology.rows), self.pairwise, accumulate=True
        )
        return dense + torch.diag(self.unary.reshape(-1))

    def detach(self) -> "AffinityMatrix":
        return AffinityMatrix(
            topology=self.topology,
            unary=self.unary.detach(),
            pairwise=self.pairwise.detach(),
            sigma_aff=self.sigma_aff,
        )

    def to(self, dtype: torch.dtype) -> "AffinityMatrix":
        return AffinityMatrix(
            topology=self.topology,
            unary=self.unary.to(dtype),
            pairwise=self.pairwise.to(dtype),
            sigma_aff=self.sigma_aff,
        )

    def __repr__(self) -> str:
        return f"AffinityMatrix(n1={self.n1}, n2={self.n2}, stored={self.num_stored})"


def affinity_matvec(M: AffinityMatrix, z: torch.Tensor) -> torch.Tensor:
    """
    sparse M z.

    (unary ⊙ z) + 저장된 pairwise 항 양방향 누적. 저장된 항만 접근하므로
    비용은 O(K^2 * n1 * n2) (K = 최대 degree) 입니다.

    Raises:
        InputError: z 길이가 n1*n2 와 다른 경우
    """
    topo = M.topology
    shape = z.shape
    if z.dim() >= 2 and tuple(shape[-2:]) == (topo.n1, topo.n2):
        flat = z.reshape(*shape[:-2], topo.size)
    elif z.dim() >= 1 and shape[-1] == topo.size:
        flat = z
    else:
        raise InputError(
            f"z must have length {topo.size} (or trailing shape ({topo.n1}, {topo.n2})), "
            f"got {tuple(shape)}"
        )

    lead = flat.shape[:-1]
    flat2 = flat.reshape(-1, topo.size)
    out = M.unary.reshape(1, -1).to(flat2.dtype) * flat2
    if topo.num_stored:
        w = M.pairwise.to(flat2.dtype)
        out = out.index_add(1, topo.rows, w * flat2[:, topo.cols])
        out = out.index_add(1, topo.cols, w * flat2[:, topo.rows])
    return out.reshape(*lead, topo.size).reshape(shape)


# ============================================================================
# Debug Dump
# ============================================================================


def dump_triplets(M: AffinityMatrix, out: Union[str, TextIO]) -> int:
    """
    dense M 의 0 이 아닌 항을 "row col value" 텍스트 triplet 으로 기록 (row-major 정렬).

    Returns:
        기록한 triplet 수
    """
    dense = M.to_dense().detach().cpu().numpy()
    rows, cols = np.nonzero(dense)
    lines = [f"{r} {c} {dense[r, c]:.17g}\n" for r, c in zip(rows, cols)]
    header = f"# n1={M.n1} n2={M.n2} nnz={len(lines)}\n"

    if isinstance(out, str):
        with open(out, "w", encoding="utf-8") as f:
            f.write(header)
            f.writelines(lines)
    else:
        out.write(header)
        out.writelines(lines)
    return len(lines)
