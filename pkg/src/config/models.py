# Config Module
"""설정 관련 모듈"""
import math
from dataclasses import asdict, dataclass, field
from typing import Literal, Optional, Tuple, get_args

from core.errors import ConfigError

UnaryMode = Literal["gaussian", "distance"]
SolverKind = Literal["dpgm", "gagm", "sm"]
ModelMode = Literal["eqan", "eqan-u", "eqan-r"]
DecisionFeature = Literal["all", "last"]
SamplingScheme = Literal["guided", "uniform"]
QueryEdges = Literal["knn", "copy"]
ExperimentKind = Literal[
    "noise-sweep",
    "outlier-sweep",
    "rotation-sweep",
    "ablation",
    "sampling-sweep",
    "convergence",
    "train",
    "eval",
    "match",
]


def _check_literal(value, alias, label: str) -> None:
    if value not in get_args(alias):
        raise ConfigError(f"Invalid {label}: {value}")


# ============================================================================
# Synthetic Graph Config
# ============================================================================


@dataclass(frozen=True)
class GenConfig:
    """
    합성 기하 그래프 생성 설정.

    query_edges:
        - "knn":  noise 가 더해진 query 좌표로 k-NN edge 를 새로 구성
        - "copy": reference edge 를 셔플 위치로 그대로 복제하고 outlier 만 k-NN 으로 연결
    """

    n_in: int = 35
    n_out: int = 0
    sigma: float = 0.0
    dim: int = 2
    k: int = 5
    seed: int = 0
    max_rotation_deg: float = 0.0
    query_edges: QueryEdges = "knn"

    def __post_init__(self):
        _check_literal(self.query_edges, QueryEdges, "query edge rule")
        if self.n_in < 1:
            raise ConfigError(f"n_in must be >= 1, got {self.n_in}")
        if self.n_out < 0:
            raise ConfigError(f"n_out must be >= 0, got {self.n_out}")
        if not (self.sigma >= 0.0 and math.isfinite(self.sigma)):
            raise ConfigError(f"sigma must be finite and >= 0, got {self.sigma}")
        if self.dim not in (2, 3):
            raise ConfigError(f"dim must be 2 or 3, got {self.dim}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        # 단일 노드 그래프는 이웃이 없으므로 k 를 검사하지 않음
        if self.n_in > 1 and self.k >= self.n_in:
            raise ConfigError(
                f"k must be < n_in so the reference graph has k neighbors (k={self.k}, n_in={self.n_in})"
            )
        if self.max_rotation_deg < 0:
            raise ConfigError("max_rotation_deg must be >= 0")
        if self.max_rotation_deg > 0 and self.dim != 2:
            raise ConfigError("rotation is only defined for dim=2")

    @property
    def n_total(self) -> int:
        return self.n_in + self.n_out


# ============================================================================
# Affinity / Solver Config
# ============================================================================


@dataclass(frozen=True)
class AffinityConfig:
    """Affinity 행렬 구성 설정"""

    sigma_aff: float = 1.0
    unary_mode: UnaryMode = "gaussian"

    def __post_init__(self):
        if not self.sigma_aff > 0:
            raise ConfigError(f"sigma_aff must be > 0, got {self.sigma_aff}")
        _check_literal(self.unary_mode, UnaryMode, "unary mode")


@dataclass(frozen=True)
class SolverConfig:
    """
    고전 QAP solver 설정.

    DPGM 의 (w_p, w_z) 는 beta, lam 으로부터 유도됩니다:
    w_p = beta / (1 + lam*beta), w_z = 1 / (1 + lam*beta)
    """

    kind: SolverKind = "dpgm"
    beta: float = 1.0
    lam: float = 1.0
    max_iter: int = 10
    sinkhorn_T: int = 5
    gagm_beta0: float = 0.5
    gagm_growth: float = 1.075

    def __post_init__(self):
        _check_literal(self.kind, SolverKind, "solver kind")
        if not self.beta > 0:
            raise ConfigError(f"beta must be > 0, got {self.beta}")
        if self.lam < 0:
            raise ConfigError(f"lam must be >= 0, got {self.lam}")
        if self.max_iter < 0:
            raise ConfigError(f"max_iter must be >= 0, got {self.max_iter}")
        if self.sinkhorn_T < 1:
            raise ConfigError(f"sinkhorn_T must be >= 1, got {self.sinkhorn_T}")
        if not (self.gagm_beta0 > 0 and self.gagm_growth > 0):
            raise ConfigError("GAGM annealing factors must be > 0")

    def gagm_schedule(self) -> Tuple[float, ...]:
        """beta_l = beta0 * growth^(l-1), l = 1..max_iter"""
        return tuple(self.gagm_beta0 * self.gagm_growth**i for i in range(self.max_iter))


# ============================================================================
# Model Config
# ============================================================================


@dataclass(frozen=True)
class ModelConfig:
    """EQAN 모델 구조 설정 (desk scale 기본값)"""

    layers: int = 3
    channels: int = 8
    dim: int = 2
    mode: ModelMode = "eqan"
    solver: SolverKind = "dpgm"
    decision_feature: DecisionFeature = "all"
    gamma: float = 1.0
    sampling: SamplingScheme = "guided"
    learn_solver_params: bool = True
    unary_mode: UnaryMode = "gaussian"
    sigma_aff: float = 1.0
    learn_sigma: bool = True
    sinkhorn_T_train: int = 5
    sinkhorn_T_eval: int = 50
    eps: float = 1e-5
    ste_to_inputs: bool = True

    def __post_init__(self):
        if self.layers < 1:
            raise ConfigError(f"layers must be >= 1, got {self.layers}")
        if self.channels < 1:
            raise ConfigError(f"channels must be >= 1, got {self.channels}")
        if self.dim not in (2, 3):
            raise ConfigError(f"dim must be 2 or 3, got {self.dim}")
        _check_literal(self.mode, ModelMode, "model mode")
        _check_literal(self.solver, SolverKind, "solver kind")
        _check_literal(self.decision_feature, DecisionFeature, "decision feature")
        _check_literal(self.sampling, SamplingScheme, "sampling scheme")
        _check_literal(self.unary_mode, UnaryMode, "unary mode")
        if self.mode == "eqan-r" and not self.gamma > 0:
            raise ConfigError("mode eqan-r requires gamma > 0")
        if not self.sigma_aff > 0:
            raise ConfigError(f"sigma_aff must be > 0, got {self.sigma_aff}")
        if self.sinkhorn_T_train < 1 or self.sinkhorn_T_eval < 1:
            raise ConfigError("Sinkhorn iteration counts must be >= 1")
        if not self.eps > 0:
            raise ConfigError(f"eps must be > 0, got {self.eps}")

    def to_dict(self) -> dict:
        return asdict(self)


FULL_SCALE_MODEL = {"layers": 5, "channels": 32}


# ============================================================================
# Training Config
# ============================================================================


@dataclass(frozen=True)
class TrainConfig:
    """Adam 학습 설정"""

    lr: float = 1e-4
    batch: int = 8
    total_iters: int = 5000
    warmup_iters: int = 500
    warmup_lr: float = 1e-10
    adam_betas: Tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    eval_every: int = 250
    eval_pairs: int = 200
    log_every: int = 50
    seed: int = 0
    dtype: Literal["float32", "float64"] = "float32"

    def __post_init__(self):
        if not self.lr > 0:
            raise ConfigError(f"lr must be > 0, got {self.lr}")
        if not self.warmup_lr > 0:
            raise ConfigError(f"warmup_lr must be > 0, got {self.warmup_lr}")
        if self.batch < 1:
            raise ConfigError(f"batch must be >= 1, got {self.batch}")
        if self.total_iters < 0:
            raise ConfigError(f"total_iters must be >= 0, got {self.total_iters}")
        if not 0 <= self.warmup_iters <= self.total_iters:
            raise ConfigError(
                f"warmup_iters must be in [0, total_iters], got {self.warmup_iters}"
            )
        b1, b2 = self.adam_betas
        if not (0 <= b1 < 1 and 0 <= b2 < 1):
            raise ConfigError(f"adam betas must be in [0, 1), got {self.adam_betas}")
        if self.eval_every < 1 or self.log_every < 1:
            raise ConfigError("eval_every and log_every must be >= 1")
        if self.eval_pairs < 1:
            raise ConfigError("eval_pairs must be >= 1")
        if self.dtype not in ("float32", "float64"):
            raise ConfigError(f"Invalid dtype: {self.dtype}")


FULL_SCALE_TRAIN = {"total_iters": 80000}


# ============================================================================
# Experiment Config
# ============================================================================


@dataclass(frozen=True)
class ExperimentConfig:
    """실험 한 건의 전체 설정 (sweep grid 포함)"""

    kind: ExperimentKind = "noise-sweep"
    grid: Tuple[float, ...] = ()
    gen: GenConfig = field(default_factory=GenConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    affinity: AffinityConfig = field(default_factory=AffinityConfig)
    variants: Tuple[str, ...] = ()
    repeats: int = 5
    eval_pairs: int = 200
    checkpoint: Optional[str] = None
    output: str = "results.csv"
    workers: int = 1

    def __post_init__(self):
        _check_literal(self.kind, ExperimentKind, "experiment kind")
        if self.kind.endswith("-sweep") and not self.grid:
            raise ConfigError(f"{self.kind} requires a nonempty grid")
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")
        if self.eval_pairs < 1:
            raise ConfigError(f"eval_pairs must be >= 1, got {self.eval_pairs}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    def to_dict(self) -> dict:
        return asdict(self)
