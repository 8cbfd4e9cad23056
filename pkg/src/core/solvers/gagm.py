"""
Graduated Assignment (GAGM)

x_k = Sinkhorn(exp(beta_k * M x_{k-1})), beta_k 는 점점 커지는 inverse temperature.
"""

from typing import Dict, Mapping, Optional, Sequence

import torch

from core.affinity.matrix import AffinityMatrix
from core.errors import ConfigError

from .sinkhorn import log_sinkhorn
from .strategy import SolverParams, Weight, as_matrix, channel_view, require_square, uniform_start


def gagm_solve(
    M: AffinityMatrix, K: int, betas: Optional[Sequence[float]] = None, T: int = 5
) -> torch.Tensor:
    """
    균등 초기값에서 K 회 graduated assignment.

    Args:
        betas: 길이 K 의 양수 schedule (None 이면 0.5 * 1.075^(k-1))

    Raises:
        ConfigError: schedule 길이가 K 가 아니거나 0 이하 항목이 있는 경우
    """
    require_square(M)
    if betas is None:
        betas = SolverParams(max_iter=K).gagm_betas()
    if len(betas) != K:
        raise ConfigError(f"GAGM needs {K} inverse temperatures, got {len(betas)}")
    if any(not b > 0 for b in betas):
        raise ConfigError("GAGM inverse temperatures must be > 0")

    x = uniform_start(M) / M.n2
    for beta in betas:
        x = log_sinkhorn(beta * M.matvec(x), T).exp()
    return x.reshape(-1)


class GAGMSolver:
    """GAGM solver (QAPSolver 구현). ensemble 에서는 채널별 beta 를 학습합니다."""

    kind = "gagm"
    weight_names = ("beta",)

    def __init__(self, params: SolverParams = SolverParams()):
        self.params = params

    def initial_weights(self, layer: int) -> Dict[str, float]:
        # block l 은 annealing schedule 의 l 번째 값에서 시작
        return {"beta": self.params.beta_anneal * self.params.anneal_growth ** (layer - 1)}

    def propose_log(
        self, z: torch.Tensor, M: AffinityMatrix, weights: Mapping[str, Weight]
    ) -> torch.Tensor:
        mat, _ = as_matrix(z, M)
        beta = channel_view(weights.get("beta", self.params.beta_anneal), mat)
        return beta * M.matvec(mat)

    def normalize_log(self, log_z: torch.Tensor, T: int) -> torch.Tensor:
        return log_sinkhorn(log_z, T).exp()

    def solve(self, M: AffinityMatrix) -> torch.Tensor:
        return gagm_solve(M, self.params.max_iter, self.params.gagm_betas(), self.params.sinkhorn_T)

    def __repr__(self) -> str:
        return f"GAGMSolver(beta0={self.params.beta_anneal:.4g}, K={self.params.max_iter})"
