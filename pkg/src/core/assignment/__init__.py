# Assignment Module
"""hard 할당 추출, 매칭 정확도, 그래프 유사도"""

from .hungarian import assignment_value, hungarian, hungarian_min
from .metrics import (
    MatchResult,
    assignment_matrix,
    graph_similarity,
    matching_accuracy,
)

__all__ = [
    "MatchResult",
    "assignment_matrix",
    "assignment_value",
    "graph_similarity",
    "hungarian",
    "hungarian_min",
    "matching_accuracy",
]
