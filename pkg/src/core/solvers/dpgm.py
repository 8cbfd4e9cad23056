"""
Differentiable Proximal Graph Matching (DPGM)

KL proximal 항과 entropy 정규화를 가진 proximal 반복:

    z̃_{t+1} = exp(w_p * M z_t + w_z * log z_t)
    z_{t+1} = Sinkhorn(z̃_{t+1})

목적 함수는 L(z) = -1/2 z^T M z + lam * z^T log z 로 둡니다 (위 update 의 gradient 규약).
gradient 의 Lipschitz 상수는 ||M||_2 이므로 step size beta < 1 / ||M||_2 이면
L 은 매 step 감소합니다.
"""

import math
from typing import Dict, List, Mapping, Tuple, Union

import torch

from core.affinity.matrix import AffinityMatrix

from .sinkhorn import log_sinkhorn
from .strategy import (
    SolverParams,
    Weight,
    as_matrix,
    channel_view,
    check_positive,
    require_square,
    uniform_start,
)


# ============================================================================
# Functional API
# ============================================================================


def dpgm_step(z: torch.Tensor, M: AffinityMatrix, params: SolverParams) -> torch.Tensor:
    """
    DPGM 한 step. 입력과 같은 shape (flat 또는 (n1, n2)) 로 반환.

    Raises:
        DomainError: z 에 0 이하 항목이 있는 경우
    """
    check_positive(z)
    mat, flat = as_matrix(z, M)
    log_z = params.w_p * M.matvec(mat) + params.w_z * torch.log(mat)
    out = log_sinkhorn(log_z, params.sinkhorn_T).exp()
    return out.reshape(z.shape) if flat else out


def dpgm_solve(
    M: AffinityMatrix, params: SolverParams, return_trajectory: bool = False
) -> Union[torch.Tensor, Tuple[torch.Tensor, List[torch.Tensor]]]:
    """
    z_0 = Sinkhorn(1) 에서 시작해 K 회 dpgm_step.

    Returns:
        (n1*n2,) z_K. return_trajectory 면 (z_K, [z_0, ..., z_K])
    """
    require_square(M)
    z = log_sinkhorn(torch.log(uniform_start(M)), params.sinkhorn_T).exp().reshape(-1)
    trajectory = [z]
    for _ in range(params.max_iter):
        z = dpgm_step(z, M, params)
        trajectory.append(z)
    if return_trajectory:
        return z, trajectory
    return z


# ============================================================================
# Convergence Helpers
# ============================================================================


def relaxed_objective(z: torch.Tensor, M: AffinityMatrix, lam: float) -> float:
    """L(z) = -1/2 z^T M z + lam * sum z log z"""
    flat = z.reshape(-1)
    quad = torch.dot(flat, M.matvec(flat))
    entropy = torch.sum(torch.special.xlogy(flat, flat))
    return float(-0.5 * quad + lam * entropy)


def stability_bound(M: AffinityMatrix) -> float:
    """
    단조 감소가 보장되는 최대 step size 1 / ||M||_2 (KL proximal 강볼록 계수 1/2 기준).
    M = 0 이면 inf.
    """
    norm = float(torch.linalg.matrix_norm(M.to_dense().detach(), ord=2))
    return math.inf if norm == 0 else 1.0 / norm


def kl_descent_gap(z_next: torch.Tensor, z_prev: torch.Tensor) -> float:
    """
    (z+ - z)^T ∇_{z+} D(z+, z) - 1/2 ||z+ - z||^2,  D(x, y) = x^T log x - x^T log y.

    연속 반복값이 (0, 1] 에 있으면 항상 >= 0 입니다.
    """
    a = z_next.reshape(-1)
    b = z_prev.reshape(-1)
    delta = a - b
    grad = torch.log(a) + 1.0 - torch.log(b)
    return float(torch.dot(delta, grad) - 0.5 * torch.dot(delta, delta))


# ============================================================================
# Strategy
# ============================================================================


class DPGMSolver:
    """
    DPGM solver (QAPSolver 구현).

    사용법:
        solver = DPGMSolver(SolverParams.from_beta_lambda(beta=1.0, lam=1.0))
        z = solver.solve(M)
    """

    kind = "dpgm"
    weight_names = ("w_p", "w_z")

    def __init__(self, params: SolverParams = SolverParams()):
        self.params = params

    def initial_weights(self, layer: int) -> Dict[str, float]:
        return {"w_p": 0.5, "w_z": 0.5}

    def propose_log(
        self, z: torch.Tensor, M: AffinityMatrix, weights: Mapping[str, Weight]
    ) -> torch.Tensor:
        check_positive(z)
        mat, _ = as_matrix(z, M)
        w_p = channel_view(weights.get("w_p", self.params.w_p), mat)
        w_z = channel_view(weights.get("w_z", self.params.w_z), mat)
        return w_p * M.matvec(mat) + w_z * torch.log(mat)

    def normalize_log(self, log_z: torch.Tensor, T: int) -> torch.Tensor:
        return log_sinkhorn(log_z, T).exp()

    def solve(self, M: AffinityMatrix) -> torch.Tensor:
        return dpgm_solve(M, self.params)

    def __repr__(self) -> str:
        return f"DPGMSolver(w_p={self.params.w_p:.4g}, w_z={self.params.w_z:.4g}, K={self.params.max_iter})"
