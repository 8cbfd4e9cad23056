"""
Spectral Matching (SM)

power iteration: z_{t+1} = M z_t / ||M z_t||. M 의 leading eigenvector 를 근사합니다.
"""

from typing import Dict, Mapping

import torch

from core.affinity.matrix import AffinityMatrix
from core.errors import DegenerateAffinityError

from .strategy import SolverParams, Weight, as_matrix, require_square, uniform_start


def sm_solve(M: AffinityMatrix, K: int) -> torch.Tensor:
    """
    균등 단위 벡터에서 K 회 정규화 power iteration.

    Raises:
        DegenerateAffinityError: 어떤 반복에서 M z = 0
    """
    require_square(M)
    z = uniform_start(M).reshape(-1)
    z = z / torch.linalg.vector_norm(z)
    for t in range(K):
        y = M.matvec(z)
        norm = torch.linalg.vector_norm(y)
        if float(norm) == 0.0:
            raise DegenerateAffinityError(f"M z vanished at iteration {t}")
        z = y / norm
    return z


class SMSolver:
    """SM solver (QAPSolver 구현). 내부 학습 파라미터 없음."""

    kind = "sm"
    weight_names = ()

    def __init__(self, params: SolverParams = SolverParams()):
        self.params = params

    def initial_weights(self, layer: int) -> Dict[str, float]:
        return {}

    def propose_log(
        self, z: torch.Tensor, M: AffinityMatrix, weights: Mapping[str, Weight]
    ) -> torch.Tensor:
        mat, _ = as_matrix(z, M)
        y = M.matvec(mat)
        return torch.log(torch.clamp(y, min=torch.finfo(y.dtype).tiny))

    def normalize_log(self, log_z: torch.Tensor, T: int) -> torch.Tensor:
        # 채널별 (마지막 두 축) L2 정규화
        shift = log_z.amax(dim=(-2, -1), keepdim=True).detach()
        y = torch.exp(log_z - shift)
        return y / torch.linalg.vector_norm(y, dim=(-2, -1), keepdim=True)

    def solve(self, M: AffinityMatrix) -> torch.Tensor:
        return sm_solve(M, self.params.max_iter)

    def __repr__(self) -> str:
        return f"SMSolver(K={self.params.max_iter})"
