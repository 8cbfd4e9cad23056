"""
Assignment Unit Tests

Hungarian 최적성 (전수 탐색 oracle), 사전순 tie-break, 정확도/유사도 지표를 테스트합니다.
"""

import itertools
import sys
from pathlib import Path

import numpy as np
import pytest
import torch

# src 디렉토리를 path에 추가
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from core.assignment.hungarian import assignment_value, hungarian
from core.assignment.metrics import MatchResult, graph_similarity, matching_accuracy
from core.errors import DomainError, InputError


# ============================================================================
# Hungarian
# ============================================================================


class TestHungarian:
    """최대화 선형 할당 테스트"""

    def test_identity_dominant(self):
        """대각 우세 행렬은 identity"""
        score = np.eye(4) * 10 + np.random.default_rng(0).uniform(0, 1, size=(4, 4))
        assert hungarian(score).tolist() == [0, 1, 2, 3]

    def test_swap(self):
        """[[0,1],[1,0]] 은 swap"""
        assert hungarian(np.array([[0.0, 1.0], [1.0, 0.0]])).tolist() == [1, 0]

    def test_brute_force_oracle(self):
        """무작위 6x6 1000 개: 720 개 순열 전수 탐색 최적값과 일치"""
        rng = np.random.default_rng(42)
        perms = np.array(list(itertools.permutations(range(6))))
        rows = np.arange(6)
        for _ in range(1000):
            score = rng.normal(size=(6, 6))
            best = score[rows, perms].sum(axis=1).max()
            perm = hungarian(score)
            assert sorted(perm.tolist()) == list(range(6))
            assert assignment_value(score, perm) == pytest.approx(best, abs=1e-9)

    def test_lexicographic_tie_break(self):
        """동점 최적해 중 사전순 최소 순열"""
        assert hungarian(np.zeros((3, 3))).tolist() == [0, 1, 2]
        score = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        assert hungarian(score).tolist() == [0, 1, 2]

    def test_tie_break_among_optimal_only(self):
        """사전순 선택은 최적해 안에서만"""
        score = np.array([[0.0, 5.0], [5.0, 0.0]])
        assert hungarian(score).tolist() == [1, 0]

    def test_integer_matrix_ties(self):
        """정수 점수 동점에서도 사전순 최소"""
        score = np.array([[2, 1, 2], [1, 2, 2], [2, 2, 1]], dtype=float)
        perm = hungarian(score)
        perms = list(itertools.permutations(range(3)))
        values = {p: sum(score[i, p[i]] for i in range(3)) for p in perms}
        best = max(values.values())
        assert tuple(perm.tolist()) == min(p for p in perms if values[p] == best)

    def test_more_rows_than_columns(self):
        """행이 많으면 남는 행은 -1"""
        score = np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
        assert hungarian(score).tolist() == [0, 1, -1]

    def test_more_columns_than_rows(self):
        """열이 많으면 모든 행이 실제 열을 받음"""
        score = np.array([[0.0, 0.0, 3.0], [2.0, 0.0, 0.0]])
        assert hungarian(score).tolist() == [2, 0]

    def test_non_finite(self):
        """NaN 항목은 InputError"""
        with pytest.raises(InputError):
            hungarian(np.array([[np.nan, 0.0], [0.0, 1.0]]))


# ============================================================================
# Metrics
# ============================================================================


class TestMetrics:
    """정확도 / 유사도 테스트"""

    def test_accuracy(self):
        """inlier 중 맞춘 비율"""
        assert matching_accuracy([0, 2, 1, 3], [0, 1, 2]) == pytest.approx(1.0 / 3.0)

    def test_accuracy_ignores_outlier_rows(self):
        """gt 가 없는 행은 계산에서 제외"""
        assert matching_accuracy([0, 1, 2], [0, -1, 2]) == 1.0

    def test_accuracy_empty_gt(self):
        """정답 쌍이 없으면 DomainError"""
        with pytest.raises(DomainError):
            matching_accuracy([0, 1], [-1, -1])

    def test_similarity_trace(self):
        """tr(Q R)"""
        Q = np.array([[0.7, 0.3], [0.3, 0.7]])
        R = np.array([[2.0, 1.0], [1.0, 2.0]])
        assert graph_similarity(Q, R) == pytest.approx(np.trace(Q @ R))

    def test_similarity_shape_mismatch(self):
        """shape 가 다르면 InputError"""
        with pytest.raises(InputError):
            graph_similarity(np.ones((2, 2)), np.ones((3, 3)))

    def test_match_result_drops_dummies(self):
        """dummy 행/열은 결과 순열에서 제외 (-1)"""
        Q = torch.tensor(
            [[0.1, 0.8, 0.1], [0.1, 0.1, 0.8], [0.8, 0.1, 0.1]], dtype=torch.float64
        )
        result = MatchResult.from_scores(Q, gt=np.array([1]), n_real_rows=2, n_real_cols=2)
        assert result.perm.tolist() == [1, -1]
        assert result.accuracy == 1.0
        assert result.to_dict()["perm"] == [1, -1]

    def test_reward_score_source(self):
        """score_source=reward 면 R 로 할당"""
        Q = np.eye(2)
        R = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert MatchResult.from_scores(Q, R).perm.tolist() == [0, 1]
        assert MatchResult.from_scores(Q, R, score_source="reward").perm.tolist() == [1, 0]
