"""
QAP Solver Strategy

모든 solver 는 한 step 을 두 단계로 나눕니다.

    log z̃ = propose_log(z, M, weights)   # 정규화 전 후보 (log 영역)
    z'    = normalize_log(log z̃, T)      # Sinkhorn 또는 L2 정규화

ensemble block 은 두 단계 사이에서 random mask blending 을 끼워 넣습니다.
weights 는 solver 내부 파라미터 (DPGM: w_p, w_z / GAGM: beta / SM: 없음) 이며
float 또는 채널별 (C,) tensor 입니다.
"""

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Protocol, Tuple, Union, runtime_checkable

import torch

from config.models import SolverConfig, SolverKind
from core.affinity.matrix import AffinityMatrix
from core.errors import ConfigError, DomainError, InputError

Weight = Union[float, torch.Tensor]

QAP_EPS = 1e-5


# ============================================================================
# Solver Params
# ============================================================================


@dataclass(frozen=True)
class SolverParams:
    """
    고전 solver 의 알고리즘 파라미터.

    Attributes:
        w_p: DPGM affinity 항 가중치 (beta / (1 + lam*beta))
        w_z: DPGM log z 항 가중치 (1 / (1 + lam*beta))
        beta_anneal: GAGM 초기 inverse temperature
        anneal_growth: GAGM step 마다 곱해지는 비율
        max_iter: 반복 횟수 K (0 이면 초기값 반환)
        sinkhorn_T: 각 step 내부 Sinkhorn 반복 수
    """

    w_p: float = 0.5
    w_z: float = 0.5
    beta_anneal: float = 0.5
    anneal_growth: float = 1.075
    max_iter: int = 10
    sinkhorn_T: int = 5

    def __post_init__(self):
        if not (self.w_p > 0 and self.w_z > 0):
            raise ConfigError(f"w_p and w_z must be > 0, got ({self.w_p}, {self.w_z})")
        if not (self.beta_anneal > 0 and self.anneal_growth > 0):
            raise ConfigError("GAGM annealing factors must be > 0")
        if self.max_iter < 0:
            raise ConfigError(f"max_iter must be >= 0, got {self.max_iter}")
        if self.sinkhorn_T < 1:
            raise ConfigError(f"sinkhorn_T must be >= 1, got {self.sinkhorn_T}")

    @classmethod
    def from_beta_lambda(cls, beta: float, lam: float, **kwargs) -> "SolverParams":
        """proximal step size beta, entropy 계수 lam 으로부터 (w_p, w_z) 유도"""
        if not beta > 0 or lam < 0:
            raise ConfigError(f"Invalid proximal parameters: beta={beta}, lam={lam}")
        denom = 1.0 + lam * beta
        return cls(w_p=beta / denom, w_z=1.0 / denom, **kwargs)

    @classmethod
    def from_config(cls, cfg: SolverConfig) -> "SolverParams":
        return cls.from_beta_lambda(
            cfg.beta,
            cfg.lam,
            beta_anneal=cfg.gagm_beta0,
            anneal_growth=cfg.gagm_growth,
            max_iter=cfg.max_iter,
            sinkhorn_T=cfg.sinkhorn_T,
        )

    def gagm_betas(self) -> Tuple[float, ...]:
        return tuple(self.beta_anneal * self.anneal_growth**k for k in range(self.max_iter))


# ============================================================================
# Strategy Protocol
# ============================================================================


@runtime_checkable
class QAPSolver(Protocol):
    """
    QAP solver 인터페이스.

    사용법:
        solver = SolverFactory.create(SolverConfig(kind="dpgm"))
        z = solver.solve(M)                                  # 고전 solver
        z_next = solver_step(solver, z, M, weights, T=5)     # 한 step
    """

    kind: SolverKind
    weight_names: Tuple[str, ...]

    def initial_weights(self, layer: int) -> Dict[str, float]:
        """ensemble block ``layer`` (1부터) 의 채널 파라미터 초기값"""
        ...

    def propose_log(
        self, z: torch.Tensor, M: AffinityMatrix, weights: Mapping[str, Weight]
    ) -> torch.Tensor:
        """정규화 전 후보의 log"""
        ...

    def normalize_log(self, log_z: torch.Tensor, T: int) -> torch.Tensor:
        """후보를 solver 의 feasible set 으로 정규화"""
        ...

    def solve(self, M: AffinityMatrix) -> torch.Tensor:
        """균등 초기값에서 max_iter 회 반복한 (n1*n2,) 결과"""
        ...


# ============================================================================
# Helpers
# ============================================================================


def channel_view(w: Weight, like: torch.Tensor) -> Weight:
    """(C,) 파라미터를 (C, 1, 1) 로 펼쳐 (C, n1, n2) 와 broadcast"""
    if isinstance(w, torch.Tensor) and w.dim() == 1 and like.dim() == 3:
        return w.view(-1, 1, 1)
    return w


def as_matrix(z: torch.Tensor, M: AffinityMatrix) -> Tuple[torch.Tensor, bool]:
    """flat (n1*n2,) 입력을 (n1, n2) 로 바꾸고 flat 여부를 함께 반환"""
    if z.dim() >= 1 and z.shape[-1] == M.n1 * M.n2 and not (
        z.dim() >= 2 and tuple(z.shape[-2:]) == (M.n1, M.n2)
    ):
        return z.reshape(*z.shape[:-1], M.n1, M.n2), True
    if z.dim() >= 2 and tuple(z.shape[-2:]) == (M.n1, M.n2):
        return z, False
    raise InputError(
        f"assignment must be ({M.n1 * M.n2},) or (..., {M.n1}, {M.n2}), got {tuple(z.shape)}"
    )


def check_positive(z: torch.Tensor, label: str = "z") -> None:
    if not torch.isfinite(z).all():
        raise DomainError(f"{label} contains non-finite entries")
    if (z <= 0).any():
        raise DomainError(f"{label} must be strictly positive (add eps before the log)")


def uniform_start(M: AffinityMatrix, dtype: Optional[torch.dtype] = None) -> torch.Tensor:
    """균등 all-ones (n1, n2)"""
    return torch.ones(M.n1, M.n2, dtype=dtype or M.dtype)


def require_square(M: AffinityMatrix) -> None:
    if M.n1 != M.n2:
        raise InputError(f"solver needs equal graph sizes (pad with dummies), got {M.n1}x{M.n2}")


def solver_step(
    solver: QAPSolver,
    z: torch.Tensor,
    M: AffinityMatrix,
    weights: Optional[Mapping[str, Weight]] = None,
    T: int = 5,
) -> torch.Tensor:
    """propose_log -> normalize_log 한 step"""
    return solver.normalize_log(solver.propose_log(z, M, weights or {}), T)


def qap_layer(
    Z: torch.Tensor,
    M: AffinityMatrix,
    solver: QAPSolver,
    weights: Optional[Mapping[str, Weight]] = None,
    T: int = 5,
    eps: float = QAP_EPS,
) -> torch.Tensor:
    """
    ensemble block 의 채널 단위 QAP layer: 채널 slice Z (+eps) 에 solver 한 step.

    Z 가 (C, n1, n2) 면 weights 는 채널별 (C,) tensor 일 수 있습니다.
    """
    return solver_step(solver, Z + eps, M, weights, T)
