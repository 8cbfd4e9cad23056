"""
Solver Factory

SolverConfig 기반으로 QAP solver 를 생성하는 Factory 패턴 구현.
ensemble block 과 고전 baseline 이 같은 factory 를 사용합니다.
"""

from config.models import SolverConfig

from .dpgm import DPGMSolver
from .gagm import GAGMSolver
from .sm import SMSolver
from .strategy import QAPSolver, SolverParams


class SolverFactory:
    """
    Config 기반 solver 팩토리.

    사용법:
        # DPGM (beta, lam 으로부터 w_p, w_z 유도)
        solver = SolverFactory.create(SolverConfig(kind="dpgm", beta=1.0, lam=1.0))

        # GAGM (0.5 * 1.075^(k-1) annealing)
        solver = SolverFactory.create(SolverConfig(kind="gagm", max_iter=20))

        # ensemble layer 용 (kind 만 필요)
        solver = SolverFactory.from_kind("sm")
    """

    @staticmethod
    def create(config: SolverConfig) -> QAPSolver:
        """
        Config 기반 solver 생성.

        Raises:
            TypeError: config 가 SolverConfig 가 아닌 경우
            ValueError: 알 수 없는 solver kind
        """
        if not isinstance(config, SolverConfig):
            raise TypeError(f"SolverFactory requires SolverConfig, got {type(config).__name__}")
        params = SolverParams.from_config(config)

        if config.kind == "dpgm":
            return DPGMSolver(params)
        elif config.kind == "gagm":
            return GAGMSolver(params)
        elif config.kind == "sm":
            return SMSolver(params)
        else:
            raise ValueError(
                f"Unknown solver kind: {config.kind}. Supported kinds: 'dpgm', 'gagm', 'sm'"
            )

    @staticmethod
    def from_kind(kind: str) -> QAPSolver:
        """기본 파라미터로 solver 생성"""
        return SolverFactory.create(SolverConfig(kind=kind))
