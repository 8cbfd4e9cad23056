"""
Affinity Unit Tests

sparse affinity 구성, Koopman-Beckmann, matvec, update_affinity 를
dense brute-force oracle 과 비교합니다.
"""

import io
import math
import sys
from pathlib import Path

import numpy as np
import pytest
import torch

# src 디렉토리를 path에 추가
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from core.affinity import (
    AffinityMatrix,
    AssociationTopology,
    build_affinity,
    dump_triplets,
    koopman_beckmann,
    update_affinity,
)
from core.errors import ConfigError, InputError
from core.graph import Graph, adjacency, knn_edges


def random_graph(n: int, k: int, seed: int) -> Graph:
    points = np.random.default_rng(seed).uniform(-1, 1, size=(n, 2))
    return Graph(points=points, edges=knn_edges(points, k), n_inliers=n)


def dense_oracle(F1: np.ndarray, F2: np.ndarray, G1: Graph, G2: Graph, sigma: float) -> np.ndarray:
    """n1*n2 x n1*n2 dense affinity 를 정의대로 직접 구성"""
    n1, n2 = G1.n, G2.n
    A1, A2 = adjacency(G1), adjacency(G2)
    M = np.zeros((n1 * n2, n1 * n2))
    for i in range(n1):
        for j in range(n2):
            M[i * n2 + j, i * n2 + j] = math.exp(-np.sum((F1[i] - F2[j]) ** 2) / sigma**2)
            for a in range(n1):
                for b in range(n2):
                    if A1[i, a] and A2[j, b]:
                        d1 = np.linalg.norm(F1[i] - F1[a])
                        d2 = np.linalg.norm(F2[j] - F2[b])
                        M[i * n2 + j, a * n2 + b] = math.exp(-((d1 - d2) ** 2) / sigma**2)
    return M


# ============================================================================
# build_affinity
# ============================================================================


class TestBuildAffinity:
    """좌표 기반 affinity 구성 테스트"""

    def test_identical_graphs_matched_edges(self):
        """같은 그래프의 같은 edge 쌍 가중치는 exp(0) = 1"""
        g = random_graph(5, 2, seed=0)
        M = build_affinity(g.points, g.points, g, g, sigma_aff=0.5)
        dense = M.to_dense().numpy()
        for a, b in g.edges.tolist():
            assert dense[a * 5 + a, b * 5 + b] == pytest.approx(1.0)
            assert dense[b * 5 + b, a * 5 + a] == pytest.approx(1.0)

    def test_length_difference_sigma(self):
        """edge 길이 차가 정확히 sigma 면 e^-1"""
        g1 = Graph(points=[[0.0, 0.0], [2.0, 0.0]], edges=[[0, 1]], n_inliers=2)
        g2 = Graph(points=[[0.0, 0.0], [1.0, 0.0]], edges=[[0, 1]], n_inliers=2)
        M = build_affinity(g1.points, g2.points, g1, g2, sigma_aff=1.0)
        assert M.num_stored == 2
        torch.testing.assert_close(M.pairwise, torch.full((2,), math.exp(-1.0), dtype=torch.float64))

    def test_float_sigma_keeps_feature_precision(self):
        """float sigma 는 특징 dtype 으로 변환 (float64 에서 반올림 없음)"""
        g1 = Graph(points=[[0.0, 0.0], [2.0, 0.0]], edges=[[0, 1]], n_inliers=2)
        g2 = Graph(points=[[0.0, 0.0], [1.0, 0.0]], edges=[[0, 1]], n_inliers=2)
        M = build_affinity(g1.points, g2.points, g1, g2, sigma_aff=0.7)
        assert M.pairwise.dtype == torch.float64
        assert abs(float(M.pairwise[0]) - math.exp(-1.0 / 0.49)) < 1e-12

    def test_matches_dense_oracle(self):
        """4-노드 무작위 쌍: dense oracle 과 일치"""
        g1, g2 = random_graph(4, 2, seed=1), random_graph(4, 2, seed=2)
        M = build_affinity(g1.points, g2.points, g1, g2, sigma_aff=0.7)
        expected = dense_oracle(g1.points, g2.points, g1, g2, 0.7)
        np.testing.assert_allclose(M.to_dense().numpy(), expected, atol=1e-12)

    def test_symmetric(self):
        """dense M 은 대칭"""
        g1, g2 = random_graph(6, 3, seed=3), random_graph(6, 3, seed=4)
        dense = build_affinity(g1.points, g2.points, g1, g2).to_dense()
        torch.testing.assert_close(dense, dense.T)

    def test_distance_unary(self):
        """distance unary 는 특징 거리"""
        g1, g2 = random_graph(4, 2, seed=5), random_graph(4, 2, seed=6)
        M = build_affinity(g1.points, g2.points, g1, g2, unary_mode="distance")
        expected = np.linalg.norm(g1.points[:, None] - g2.points[None], axis=-1)
        np.testing.assert_allclose(M.unary.numpy(), expected, atol=1e-12)

    def test_sigma_gradient(self):
        """학습 가능한 sigma 로 gradient 가 흐름"""
        g1, g2 = random_graph(5, 2, seed=7), random_graph(5, 2, seed=8)
        sigma = torch.tensor(0.8, dtype=torch.float64, requires_grad=True)
        M = build_affinity(g1.points, g2.points, g1, g2, sigma_aff=sigma)
        (M.pairwise.sum() + M.unary.sum()).backward()
        assert sigma.grad is not None and torch.isfinite(sigma.grad)

    def test_non_finite_features(self):
        """NaN 특징은 InputError"""
        g = random_graph(4, 2, seed=0)
        bad = g.points.copy()
        bad[0, 0] = np.nan
        with pytest.raises(InputError):
            build_affinity(bad, g.points, g, g)

    def test_invalid_sigma(self):
        """sigma <= 0 은 ConfigError"""
        g = random_graph(4, 2, seed=0)
        with pytest.raises(ConfigError):
            build_affinity(g.points, g.points, g, g, sigma_aff=0.0)

    def test_dummy_unary_zero(self):
        """dummy 가 끼면 unary 0"""
        g1 = random_graph(4, 2, seed=0)
        g2 = Graph(points=np.vstack([random_graph(3, 1, seed=1).points, [[0.0, 0.0]]]),
                   edges=[[0, 1]], n_inliers=3, n_dummies=1)
        M = build_affinity(g1.points, g2.points, g1, g2)
        assert torch.all(M.unary[:, 3] == 0)


# ============================================================================
# Koopman-Beckmann
# ============================================================================


class TestKoopmanBeckmann:
    """M = A1 ⊗ A2 테스트"""

    def test_single_edge(self):
        """2-노드 단일 edge: 저장 항 2개, 값 1"""
        A = np.array([[0, 1], [1, 0]])
        M = koopman_beckmann(A, A)
        assert M.num_stored == 2
        assert torch.all(M.pairwise == 1.0)
        np.testing.assert_array_equal(M.to_dense().numpy(), np.kron(A, A))

    def test_empty_second_graph(self):
        """A2 = 0 이면 pairwise 없음"""
        A1 = np.array([[0, 1], [1, 0]])
        M = koopman_beckmann(A1, np.zeros((3, 3), dtype=int))
        assert M.num_stored == 0

    def test_kronecker_oracle(self):
        """무작위 5-노드 그래프: kron(A1, A2) 와 일치"""
        A1 = adjacency(random_graph(5, 2, seed=10))
        A2 = adjacency(random_graph(5, 2, seed=11))
        M = koopman_beckmann(A1, A2)
        np.testing.assert_array_equal(M.to_dense().numpy(), np.kron(A1, A2))

    def test_asymmetric_rejected(self):
        """비대칭 인접 행렬은 InputError"""
        with pytest.raises(InputError):
            koopman_beckmann(np.array([[0, 1], [0, 0]]), np.eye(2, dtype=int) * 0)


# ============================================================================
# matvec
# ============================================================================


class TestMatvec:
    """sparse M z 테스트"""

    def test_unary_only(self):
        """pairwise 가 없으면 U ⊙ z"""
        topo = AssociationTopology.from_edges(np.zeros((0, 2)), np.zeros((0, 2)), 2, 3)
        U = torch.arange(1.0, 7.0, dtype=torch.float64).reshape(2, 3)
        M = AffinityMatrix(topology=topo, unary=U, pairwise=torch.zeros(0, dtype=torch.float64))
        z = torch.linspace(0.5, 3.0, 6, dtype=torch.float64)
        torch.testing.assert_close(M.matvec(z), U.reshape(-1) * z)

    def test_zero_vector(self):
        """z = 0 이면 0"""
        g = random_graph(5, 2, seed=0)
        M = build_affinity(g.points, g.points, g, g)
        assert torch.all(M.matvec(torch.zeros(25, dtype=torch.float64)) == 0)

    def test_dense_oracle(self):
        """무작위 5-노드: dense 곱과 1e-12 이내"""
        g1, g2 = random_graph(5, 2, seed=20), random_graph(5, 3, seed=21)
        M = build_affinity(g1.points, g2.points, g1, g2)
        z = torch.rand(25, dtype=torch.float64, generator=torch.Generator().manual_seed(0))
        torch.testing.assert_close(M.matvec(z), M.to_dense() @ z, atol=1e-12, rtol=0)

    def test_matrix_shape_preserved(self):
        """(C, n1, n2) 입력은 같은 shape 로 반환"""
        g = random_graph(4, 2, seed=0)
        M = build_affinity(g.points, g.points, g, g)
        Z = torch.rand(3, 4, 4, dtype=torch.float64)
        out = M.matvec(Z)
        assert out.shape == (3, 4, 4)
        torch.testing.assert_close(out[1].reshape(-1), M.to_dense() @ Z[1].reshape(-1))

    def test_length_mismatch(self):
        """길이 불일치는 InputError"""
        g = random_graph(4, 2, seed=0)
        M = build_affinity(g.points, g.points, g, g)
        with pytest.raises(InputError):
            M.matvec(torch.ones(15, dtype=torch.float64))


# ============================================================================
# update_affinity
# ============================================================================


class TestUpdateAffinity:
    """특징 기반 affinity 재계산 테스트"""

    @pytest.fixture
    def topology(self):
        g1, g2 = random_graph(4, 2, seed=30), random_graph(4, 2, seed=31)
        return g1, g2, AssociationTopology.from_graphs(g1, g2)

    def test_zero_w(self, topology):
        """w = 0 이면 pairwise 전부 1"""
        _, _, topo = topology
        V = torch.randn(3, 4, 4, dtype=torch.float64)
        M = update_affinity(V, torch.zeros(3, dtype=torch.float64), torch.zeros(3, dtype=torch.float64), topo)
        assert torch.all(M.pairwise == 1.0)

    def test_constant_V(self, topology):
        """V 가 (i, j) 에 대해 상수면 w 와 무관하게 pairwise 1"""
        _, _, topo = topology
        V = torch.full((2, 4, 4), 0.3, dtype=torch.float64)
        M = update_affinity(V, torch.tensor([2.0, 5.0], dtype=torch.float64), torch.zeros(2, dtype=torch.float64), topo)
        assert torch.all(M.pairwise == 1.0)

    def test_scalar_loop_oracle(self, topology):
        """무작위 V, w, u: 정의식 직접 계산과 일치"""
        g1, g2, topo = topology
        gen = torch.Generator().manual_seed(3)
        V = torch.rand(2, 4, 4, dtype=torch.float64, generator=gen)
        w = torch.rand(2, dtype=torch.float64, generator=gen)
        u = torch.rand(2, dtype=torch.float64, generator=gen)
        dense = update_affinity(V, w, u, topo).to_dense().numpy()

        A1, A2 = adjacency(g1), adjacency(g2)
        Vn, wn, un = V.numpy(), w.numpy(), u.numpy()
        for i in range(4):
            for j in range(4):
                assert dense[i * 4 + j, i * 4 + j] == pytest.approx(math.exp(float(un @ Vn[:, i, j])))
                for a in range(4):
                    for b in range(4):
                        if (a, b) == (i, j):
                            continue
                        expected = 0.0
                        if A1[i, a] and A2[j, b]:
                            expected = math.exp(-float(wn @ (Vn[:, i, j] - Vn[:, a, b]) ** 2))
                        assert dense[i * 4 + j, a * 4 + b] == pytest.approx(expected)

    def test_shape_mismatch(self, topology):
        """V shape 불일치는 InputError"""
        _, _, topo = topology
        with pytest.raises(InputError):
            update_affinity(torch.zeros(2, 3, 4), torch.zeros(2), torch.zeros(2), topo)


class TestDumpTriplets:
    """디버그 triplet dump 테스트"""

    def test_counts_nonzeros(self):
        """dense 0 이 아닌 항 수와 기록 수 일치"""
        A = np.array([[0, 1], [1, 0]])
        buffer = io.StringIO()
        M = koopman_beckmann(A, A)
        count = dump_triplets(M, buffer)
        # 저장 항은 대칭 쌍당 하나, dense 에는 양쪽 모두
        assert count == 2 * M.num_stored == 4
        assert buffer.getvalue().startswith("# n1=2 n2=2 nnz=4")
