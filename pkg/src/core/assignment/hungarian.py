"""
Hungarian Method

최대화 선형 할당: sum_i score[i, pi(i)] 를 최대화하는 순열 pi, O(n^3).

최대화는 cost = max(score) - score (음이 아닌 비용) 의 최소화로 풀고,
dual potential (u, v) 로 만든 equality subgraph 에서 사전순으로 가장 작은
최적 순열을 고릅니다.
"""

from typing import List, Tuple

import numpy as np

from core.errors import InputError


# ============================================================================
# Minimization Core
# ============================================================================


def hungarian_min(cost: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    정방 비용 행렬의 최소 비용 할당 (shortest augmenting path + potentials).

    Returns:
        (assignment, u, v): assignment[i] = 행 i 의 열, u/v 는 행/열 dual potential
    """
    n = cost.shape[0]
    INF = np.inf

    # 1-indexed, 열 0 은 augmenting path 의 가상 시작점
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)

    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, INF)
        used = np.zeros(n + 1, dtype=bool)
        reduced = np.full(n + 1, INF)

        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used
            reduced[1:] = cost[i0 - 1] - u[i0] - v[1:]
            improve = free & (reduced < minv)
            minv[improve] = reduced[improve]
            way[improve] = j0

            candidates = np.where(free, minv, INF)
            j1 = int(np.argmin(candidates))
            delta = candidates[j1]

            u[p[used]] += delta
            v[used] -= delta
            minv[free] -= delta

            j0 = j1
            if p[j0] == 0:
                break

        while j0 != 0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    assignment = np.empty(n, dtype=np.int64)
    assignment[p[1:] - 1] = np.arange(n)
    return assignment, u[1:], v[1:]


# ============================================================================
# Lexicographic Tie-Break
# ============================================================================


def _reroute(
    start_row: int, target_col: int, banned_col: int, tight: np.ndarray,
    owner: np.ndarray, locked: np.ndarray,
) -> List[Tuple[int, int]]:
    """
    start_row 에서 tight edge 를 따라 target_col 까지 가는 교대 경로 (BFS).

    Returns:
        [(row, new_col), ...] 재배치 목록 (경로 없으면 빈 리스트)
    """
    parent = {start_row: None}
    via = {}
    queue = [start_row]
    while queue:
        row = queue.pop(0)
        for col in np.flatnonzero(tight[row]):
            col = int(col)
            if col == banned_col:
                continue
            if col == target_col:
                moves = [(row, col)]
                while parent[row] is not None:
                    moves.append((parent[row], via[row]))
                    row = parent[row]
                return moves
            if locked[owner[col]]:
                continue
            nxt = int(owner[col])
            if nxt not in parent:
                parent[nxt] = row
                via[nxt] = col
                queue.append(nxt)
    return []


def lexicographic_refine(
    cost: np.ndarray, assignment: np.ndarray, u: np.ndarray, v: np.ndarray, tol: float
) -> np.ndarray:
    """최적 할당을 equality subgraph 안에서 사전순 최소 순열로 바꿈"""
    n = cost.shape[0]
    tight = (cost - u[:, None] - v[None, :]) <= tol
    match = assignment.copy()
    owner = np.empty(n, dtype=np.int64)
    owner[match] = np.arange(n)
    locked = np.zeros(n, dtype=bool)

    for i in range(n):
        for j in np.flatnonzero(tight[i, : match[i]]):
            j = int(j)
            r = int(owner[j])
            if locked[r]:
                continue
            locked[i] = True
            moves = _reroute(r, int(match[i]), j, tight, owner, locked)
            locked[i] = False
            if moves:
                for row, col in moves:
                    match[row] = col
                    owner[col] = row
                match[i] = j
                owner[j] = i
                break
        locked[i] = True
    return match


# ============================================================================
# Public API
# ============================================================================


def hungarian(score: np.ndarray) -> np.ndarray:
    """
    점수 합을 최대화하는 할당. 동점이면 사전순으로 가장 작은 순열.

    직사각 입력은 부족한 쪽을 상수 dummy 점수로 채웁니다. 행이 더 많으면
    dummy 열에 배정된 행은 -1 을 받습니다.

    Args:
        score: (n1, n2) 유한 실수 행렬

    Returns:
        (n1,) int64 배열, 행 i 에 배정된 열

    Raises:
        InputError: 2D 가 아니거나 non-finite 항목
    """
    score = np.asarray(score, dtype=np.float64)
    if score.ndim != 2:
        raise InputError(f"score must be a matrix, got shape {score.shape}")
    if not np.isfinite(score).all():
        raise InputError("score matrix contains non-finite entries")
    n1, n2 = score.shape
    if n1 == 0:
        return np.zeros(0, dtype=np.int64)

    n = max(n1, n2)
    top = score.max()
    span = top - score.min()
    # dummy 항은 어떤 실제 항보다도 충분히 작게
    padded = np.full((n, n), top - 2.0 * span * n - 1.0) if n1 > n2 else np.full((n, n), 0.0)
    padded[:n1, :n2] = score

    cost = padded.max() - padded
    assignment, u, v = hungarian_min(cost)
    tol = 1e-12 * max(1.0, float(np.abs(cost).max()))
    perm = lexicographic_refine(cost, assignment, u, v, tol)[:n1]
    perm = np.where(perm < n2, perm, -1)
    return perm.astype(np.int64)


def assignment_value(score: np.ndarray, perm: np.ndarray) -> float:
    """sum_i score[i, perm[i]] (perm < 0 인 행 제외)"""
    rows = np.flatnonzero(perm >= 0)
    return float(np.asarray(score)[rows, perm[rows]].sum())
