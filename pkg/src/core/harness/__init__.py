# Harness Module
"""
실험 harness: 매처, 평가, robustness sweep, ablation, sampling sweep, 수렴 진단.
"""

from .matchers import (
    Matcher,
    ModelMatcher,
    NaiveMatcher,
    SolverMatcher,
    build_matcher,
    load_model_matcher,
    matcher_from_description,
)
from .evaluation import EvalSummary, evaluate_pairs, evaluate_stream, run_ordered
from .records import SweepRow, config_hash, record_rows, write_rows
from .robustness import (
    DEFAULT_GRIDS,
    SWEEP_KINDS,
    replay_sweep_row,
    run_robustness_sweep,
    sweep_gen_config,
)
from .ablation import VARIANTS, ablation_gen_config, replay_ablation_row, resolve_variant, run_ablation
from .sampling_sweep import DEFAULT_GAMMAS, replay_sampling_row, run_sampling_sweep, with_gamma
from .diagnostics import (
    DiagnosticRow,
    convergence_diagnostics,
    diagnostic_instance,
    stable_params,
    write_diagnostics,
)

__all__ = [
    "Matcher",
    "SolverMatcher",
    "ModelMatcher",
    "NaiveMatcher",
    "build_matcher",
    "load_model_matcher",
    "matcher_from_description",
    "EvalSummary",
    "evaluate_pairs",
    "evaluate_stream",
    "run_ordered",
    "SweepRow",
    "config_hash",
    "record_rows",
    "write_rows",
    "DEFAULT_GRIDS",
    "SWEEP_KINDS",
    "sweep_gen_config",
    "run_robustness_sweep",
    "replay_sweep_row",
    "VARIANTS",
    "ablation_gen_config",
    "resolve_variant",
    "run_ablation",
    "replay_ablation_row",
    "DEFAULT_GAMMAS",
    "with_gamma",
    "run_sampling_sweep",
    "replay_sampling_row",
    "DiagnosticRow",
    "convergence_diagnostics",
    "diagnostic_instance",
    "stable_params",
    "write_diagnostics",
]
