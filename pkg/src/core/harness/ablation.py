"""
Architecture Ablation

구조 선택의 효과를 비교합니다. 데이터 분포는 n_in=35, n_out=15, sigma=0.3, k=3 고정.

variant id:
    single, single-dpgm, single-gagm, single-sm   학습 없는 고전 solver
    naive                                        독립 solver + 마지막 스칼라 가중 평균
    eqan, eqan-u, eqan-r                         EQAN 계열
    learned, random                              solver 내부 파라미터 학습 여부
    eqan-dpgm, eqan-gagm, eqan-sm                block 내부 solver 교체
    decision-last, decision-all                  decision layer 입력 특징
    width-{8,16,32,64}                           L=5 에서 채널 수
    depth-{2,4,5,8,16}                           C=32 에서 block 수
    sampling-guided, sampling-uniform            EQAN-R 샘플링 방식
    unary-distance                               거리 값 unary affinity
"""

import logging
from dataclasses import asdict, dataclass, replace
from typing import Any, Callable, Dict, List, Optional

from config.models import (
    AffinityConfig,
    ExperimentConfig,
    GenConfig,
    ModelConfig,
    SolverConfig,
    TrainConfig,
)
from core.ensemble.naive import NaiveEnsemble
from core.errors import UnknownVariantError
from core.graph.generator import derive_seed
from core.train.trainer import Trainer

from .evaluation import evaluate_stream, std
from .matchers import Matcher, ModelMatcher, NaiveMatcher, SolverMatcher
from .records import SweepRow, record_rows, write_rows

logger = logging.getLogger(__name__)

ABLATION_GEN = {
    "n_in": 35,
    "n_out": 15,
    "sigma": 0.3,
    "k": 3,
    "max_rotation_deg": 0.0,
    "query_edges": "copy",
}

WIDTH_GRID = (8, 16, 32, 64)
DEPTH_GRID = (2, 4, 5, 8, 16)


def ablation_gen_config(base: GenConfig = GenConfig()) -> GenConfig:
    return replace(base, **ABLATION_GEN)


# ============================================================================
# Variant Registry
# ============================================================================


@dataclass(frozen=True)
class VariantPlan:
    """
    variant 하나의 구성.

    Attributes:
        family: "solver" (학습 없음) / "naive" / "eqan"
        model: eqan / naive 의 모델 설정
        solver: solver baseline 설정
    """

    family: str
    model: Optional[ModelConfig] = None
    solver: Optional[SolverConfig] = None

    @property
    def trainable(self) -> bool:
        return self.family != "solver"

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "model": None if self.model is None else asdict(self.model),
            "solver": None if self.solver is None else asdict(self.solver),
        }


def _solver_variant(kind: str) -> Callable[[ModelConfig, SolverConfig], VariantPlan]:
    return lambda model, solver: VariantPlan("solver", solver=replace(solver, kind=kind))


def _model_variant(**changes) -> Callable[[ModelConfig, SolverConfig], VariantPlan]:
    return lambda model, solver: VariantPlan("eqan", model=replace(model, **changes))


VARIANTS: Dict[str, Callable[[ModelConfig, SolverConfig], VariantPlan]] = {
    "single": _solver_variant("dpgm"),
    "single-dpgm": _solver_variant("dpgm"),
    "single-gagm": _solver_variant("gagm"),
    "single-sm": _solver_variant("sm"),
    "naive": lambda model, solver: VariantPlan("naive", model=model),
    "eqan": _model_variant(),
    "eqan-u": _model_variant(mode="eqan-u"),
    "eqan-r": _model_variant(mode="eqan-r"),
    "learned": _model_variant(learn_solver_params=True),
    "random": _model_variant(learn_solver_params=False),
    "eqan-dpgm": _model_variant(solver="dpgm"),
    "eqan-gagm": _model_variant(solver="gagm"),
    "eqan-sm": _model_variant(solver="sm"),
    "decision-last": _model_variant(decision_feature="last"),
    "decision-all": _model_variant(decision_feature="all"),
    "sampling-guided": _model_variant(mode="eqan-r", sampling="guided"),
    "sampling-uniform": _model_variant(mode="eqan-r", sampling="uniform"),
    "unary-distance": _model_variant(unary_mode="distance"),
}
VARIANTS.update({f"width-{c}": _model_variant(layers=5, channels=c) for c in WIDTH_GRID})
VARIANTS.update({f"depth-{l}": _model_variant(layers=l, channels=32) for l in DEPTH_GRID})

DEFAULT_VARIANTS = ("single", "naive", "eqan")


def resolve_variant(variant: str, model: ModelConfig, solver: SolverConfig) -> VariantPlan:
    """
    Raises:
        UnknownVariantError: 등록되지 않은 id
    """
    try:
        factory = VARIANTS[variant]
    except KeyError:
        raise UnknownVariantError(
            f"Unknown ablation variant: {variant}. Supported: {', '.join(sorted(VARIANTS))}"
        ) from None
    return factory(model, solver)


# ============================================================================
# Runner
# ============================================================================


def build_variant_matcher(
    variant: str, plan: VariantPlan, spec: ExperimentConfig, model_seed: int
) -> Matcher:
    """variant 를 (필요하면 학습해서) 매처로 만듦"""
    affinity = AffinityConfig(
        sigma_aff=spec.affinity.sigma_aff,
        unary_mode=plan.model.unary_mode if plan.model is not None else spec.affinity.unary_mode,
    )
    if plan.family == "solver":
        return SolverMatcher(plan.solver, affinity)

    gen = ablation_gen_config(spec.gen)
    train_cfg = replace(spec.train, seed=model_seed)
    if plan.family == "naive":
        naive = NaiveEnsemble(
            channels=plan.model.channels,
            steps=plan.model.layers,
            solver=plan.model.solver,
            affinity=replace(affinity, sigma_aff=plan.model.sigma_aff),
            sinkhorn_T=plan.model.sinkhorn_T_train,
            sinkhorn_T_eval=plan.model.sinkhorn_T_eval,
            seed=model_seed,
        )
        result = Trainer(plan.model, train_cfg, gen, model=naive).fit()
        return NaiveMatcher(result.model, name=variant)

    result = Trainer(plan.model, train_cfg, gen).fit()
    return ModelMatcher(result.model, name=variant)


def evaluate_variant(variant: str, spec: ExperimentConfig) -> SweepRow:
    """
    variant 한 개 평가.

    학습 variant 는 repeats 개 model seed 로 학습해 공통 held-out 집합에서 평가하고
    (std_model), 첫 번째 모델을 repeats 개 data seed 에서 평가합니다 (std_accuracy).
    solver variant 는 data seed 만 바꿉니다.
    """
    plan = resolve_variant(variant, spec.model, spec.solver)
    gen = ablation_gen_config(spec.gen)
    data_seeds = [derive_seed(spec.gen.seed, r) for r in range(spec.repeats)]

    if plan.trainable:
        model_seeds = [derive_seed(spec.train.seed, r) for r in range(spec.repeats)]
        matchers = [build_variant_matcher(variant, plan, spec, s) for s in model_seeds]
        per_model = [evaluate_stream(m, gen, data_seeds[0], spec.eval_pairs).mean for m in matchers]
        per_data = [per_model[0]] + [
            evaluate_stream(matchers[0], gen, s, spec.eval_pairs).mean for s in data_seeds[1:]
        ]
        mean, std_model = sum(per_model) / len(per_model), std(per_model)
    else:
        matcher = build_variant_matcher(variant, plan, spec, spec.train.seed)
        per_data = [evaluate_stream(matcher, gen, s, spec.eval_pairs).mean for s in data_seeds]
        mean, std_model = sum(per_data) / len(per_data), None

    config: Dict[str, Any] = {
        "kind": "ablation",
        "x": variant,
        "plan": plan.to_dict(),
        "gen": asdict(gen),
        "train": asdict(spec.train) if plan.trainable else None,
        "affinity": asdict(spec.affinity),
        "repeats": spec.repeats,
        "eval_pairs": spec.eval_pairs,
        "seed": spec.gen.seed,
    }
    row = SweepRow(
        kind="ablation",
        x=variant,
        mean_accuracy=mean,
        std_accuracy=std(per_data),
        repeats=spec.repeats,
        seed=spec.gen.seed,
        config=config,
        std_model=std_model,
    )
    logger.info("ablation %s: accuracy %.4f", variant, mean)
    return row


def run_ablation(spec: ExperimentConfig, registry=None) -> List[SweepRow]:
    """
    spec.variants (비어 있으면 single, naive, eqan) 를 순서대로 평가하고 CSV 저장.

    Raises:
        UnknownVariantError: 등록되지 않은 variant (학습 시작 전에 검사)
    """
    variants = list(spec.variants) or list(DEFAULT_VARIANTS)
    for variant in variants:
        resolve_variant(variant, spec.model, spec.solver)

    rows = [evaluate_variant(variant, spec) for variant in variants]
    write_rows(spec.output, rows)
    if registry is not None:
        record_rows(registry, rows)
    return rows


def replay_ablation_row(config: Dict[str, Any]) -> SweepRow:
    """
    registry 의 ablation 행 설정으로 같은 행을 다시 계산.
    기록된 plan 은 variant 변경이 이미 반영된 설정이며 variant 적용은 멱등입니다.
    """
    plan = config["plan"]
    model = ModelConfig(**plan["model"]) if plan["model"] else ModelConfig()
    solver = SolverConfig(**plan["solver"]) if plan["solver"] else SolverConfig()
    train = config["train"]
    spec = ExperimentConfig(
        kind="ablation",
        gen=GenConfig(**config["gen"]),
        model=model,
        solver=solver,
        affinity=AffinityConfig(**config["affinity"]),
        variants=(config["x"],),
        repeats=config["repeats"],
        eval_pairs=config["eval_pairs"],
        **({"train": _train_config(train)} if train else {}),
    )
    return evaluate_variant(config["x"], spec)


def _train_config(values: Dict[str, Any]) -> TrainConfig:
    return TrainConfig(**{**values, "adam_betas": tuple(values["adam_betas"])})
