"""
Convergence Diagnostics

DPGM 반복의 수렴 기록: iteration 별 ||z_{t+1} - z_t||^2, 목적 함수 L(z_t),
KL descent gap, step norm 의 running mean.
"""

import csv
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional

import torch

from config.models import GenConfig
from core.affinity.builder import build_affinity
from core.affinity.matrix import AffinityMatrix
from core.ensemble.init_module import PairInput
from core.graph.generator import make_pair
from core.solvers.dpgm import dpgm_step, kl_descent_gap, relaxed_objective, stability_bound
from core.solvers.sinkhorn import log_sinkhorn
from core.solvers.strategy import SolverParams, require_square, uniform_start


@dataclass
class DiagnosticRow:
    iteration: int
    step_norm_sq: float
    objective: float
    kl_gap: float
    running_mean: float


def entropy_weight(params: SolverParams) -> float:
    """(w_p, w_z) 에서 entropy 계수 lam 복원: lam = (1 - w_z) / w_p"""
    return (1.0 - params.w_z) / params.w_p


def convergence_diagnostics(
    M: AffinityMatrix, params: SolverParams, T_max: Optional[int] = None
) -> List[DiagnosticRow]:
    """
    z_0 = Sinkhorn(1) 에서 T_max 회 dpgm_step 하며 기록.

    Args:
        M: 정방 affinity
        params: DPGM 파라미터 (lam 은 w_p, w_z 에서 복원)
        T_max: 반복 수 (None 이면 params.max_iter)

    Returns:
        iteration 1..T_max 의 행. objective 는 z_t (갱신 후) 에서의 값
    """
    require_square(M)
    T_max = params.max_iter if T_max is None else T_max
    lam = entropy_weight(params)

    rows: List[DiagnosticRow] = []
    with torch.no_grad():
        z = log_sinkhorn(torch.log(uniform_start(M)), params.sinkhorn_T).exp().reshape(-1)
        total = 0.0
        for t in range(1, T_max + 1):
            z_next = dpgm_step(z, M, params)
            step = float(torch.sum((z_next - z) ** 2))
            total += step
            rows.append(
                DiagnosticRow(
                    iteration=t,
                    step_norm_sq=step,
                    objective=relaxed_objective(z_next, M, lam),
                    kl_gap=kl_descent_gap(z_next, z),
                    running_mean=total / t,
                )
            )
            z = z_next
    return rows


def initial_objective(M: AffinityMatrix, params: SolverParams) -> float:
    """z_0 에서의 목적 함수 값"""
    with torch.no_grad():
        z0 = log_sinkhorn(torch.log(uniform_start(M)), params.sinkhorn_T).exp()
    return relaxed_objective(z0, M, entropy_weight(params))


def diagnostic_instance(gen: GenConfig, sigma_aff: float = 1.0) -> AffinityMatrix:
    """seed 로 결정되는 쌍의 64-bit affinity"""
    pair = make_pair(gen)
    inp = PairInput.from_graphs(pair.reference, pair.query, dtype=torch.float64)
    return build_affinity(inp.F1, inp.F2, inp.g1, inp.g2, sigma_aff=sigma_aff)


def stable_params(M: AffinityMatrix, lam: float = 1.0, fraction: float = 0.9, **kwargs) -> SolverParams:
    """step size beta = fraction / ||M||_2 인 DPGM 파라미터 (M = 0 이면 beta = 1)"""
    bound = stability_bound(M)
    beta = 1.0 if bound == float("inf") else fraction * bound
    return SolverParams.from_beta_lambda(beta, lam, **kwargs)


def write_diagnostics(path: Path | str, rows: List[DiagnosticRow]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(DiagnosticRow.__dataclass_fields__))
        writer.writeheader()
        for row in rows:
            writer.writerow(asdict(row))
    return path
