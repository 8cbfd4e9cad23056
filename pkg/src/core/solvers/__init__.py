# Solvers Module
"""미분 가능한 고전 QAP solver (Sinkhorn, DPGM, GAGM, SM)"""

from .sinkhorn import log_sinkhorn, sinkhorn, stochasticity_error
from .strategy import QAP_EPS, QAPSolver, SolverParams, qap_layer, solver_step
from .dpgm import (
    DPGMSolver,
    dpgm_solve,
    dpgm_step,
    kl_descent_gap,
    relaxed_objective,
    stability_bound,
)
from .gagm import GAGMSolver, gagm_solve
from .sm import SMSolver, sm_solve
from .factory import SolverFactory

__all__ = [
    "DPGMSolver",
    "GAGMSolver",
    "QAP_EPS",
    "QAPSolver",
    "SMSolver",
    "SolverFactory",
    "SolverParams",
    "dpgm_solve",
    "dpgm_step",
    "gagm_solve",
    "kl_descent_gap",
    "log_sinkhorn",
    "qap_layer",
    "relaxed_objective",
    "sinkhorn",
    "sm_solve",
    "solver_step",
    "stability_bound",
    "stochasticity_error",
]
