"""
Experiment Harness Unit Tests

매처, 평가, robustness sweep, ablation, sampling sweep, 수렴 진단을
작은 설정으로 테스트합니다.
"""

import csv
import sys
from pathlib import Path

import pytest
import torch

# src 디렉토리를 path에 추가
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from config.models import ExperimentConfig, GenConfig, ModelConfig, SolverConfig, TrainConfig
from core.ensemble import EnsembleQAPNet
from core.errors import ConfigError, InputError, UnknownVariantError
from core.graph import make_pair
from core.harness import (
    ModelMatcher,
    SolverMatcher,
    config_hash,
    convergence_diagnostics,
    diagnostic_instance,
    evaluate_stream,
    load_model_matcher,
    matcher_from_description,
    replay_ablation_row,
    replay_sampling_row,
    replay_sweep_row,
    resolve_variant,
    run_ablation,
    run_ordered,
    run_robustness_sweep,
    run_sampling_sweep,
    stable_params,
    sweep_gen_config,
    with_gamma,
    write_diagnostics,
)
from core.harness.diagnostics import entropy_weight
from db import RunRegistry, save_checkpoint

FAST_SOLVER = SolverConfig(kind="dpgm", max_iter=5)


def read_csv(path: Path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


# ============================================================================
# Matchers / Evaluation
# ============================================================================


class TestMatchers:
    """매처와 평가 헬퍼 테스트"""

    def test_solver_matcher_result(self):
        """SolverMatcher: 실제 노드 수 만큼의 순열과 정확도"""
        pair = make_pair(GenConfig(n_in=8, n_out=2, sigma=0.02, k=3, seed=1))
        result = SolverMatcher(FAST_SOLVER).match(pair)
        assert result.perm.shape == (8,)
        assert 0.0 <= result.accuracy <= 1.0

    def test_model_matcher_pads_smaller_graph(self):
        """ModelMatcher: dummy 열에 배정된 행 없이 query 범위 안"""
        pair = make_pair(GenConfig(n_in=6, n_out=3, sigma=0.05, k=2, seed=2))
        matcher = ModelMatcher(EnsembleQAPNet(ModelConfig(layers=1, channels=2), seed=0))
        Q, _ = matcher.scores(pair)
        assert Q.shape == (9, 9)
        result = matcher.match(pair)
        assert result.perm.max() < 9

    def test_rebuild_from_description(self):
        """describe() 로 같은 solver 매처 재구성"""
        matcher = SolverMatcher(SolverConfig(kind="gagm", max_iter=7))
        rebuilt = matcher_from_description(matcher.describe())
        assert rebuilt.describe() == matcher.describe()

    def test_rebuild_model_without_checkpoint(self):
        """체크포인트 없는 모델 기록은 InputError"""
        with pytest.raises(InputError):
            matcher_from_description({"matcher": "eqan", "label": None})

    def test_missing_checkpoint(self, tmp_path):
        """없는 체크포인트는 InputError"""
        with pytest.raises(InputError):
            load_model_matcher(tmp_path / "missing.bin")

    def test_evaluate_stream_deterministic(self):
        """같은 seed 는 같은 정확도 목록"""
        gen = GenConfig(n_in=7, n_out=1, sigma=0.05, k=3)
        a = evaluate_stream(SolverMatcher(FAST_SOLVER), gen, seed=3, count=3)
        b = evaluate_stream(SolverMatcher(FAST_SOLVER), gen, seed=3, count=3)
        assert a.accuracies == b.accuracies and a.count == 3

    def test_run_ordered_keeps_order(self):
        """worker pool 결과는 입력 순서"""
        tasks = [(lambda i=i: i * i) for i in range(10)]
        assert run_ordered(tasks, workers=4) == [i * i for i in range(10)]

    def test_config_hash_key_order(self):
        """키 순서와 무관한 해시"""
        assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
        assert config_hash({"a": 1}) != config_hash({"a": 2})


# ============================================================================
# Robustness Sweep
# ============================================================================


class TestRobustnessSweep:
    """noise / outlier / rotation sweep 테스트"""

    def test_gen_configs(self):
        """sweep 종류별 데이터 분포"""
        noise = sweep_gen_config("noise-sweep", 0.05)
        assert (noise.n_in, noise.n_out, noise.sigma) == (50, 0, 0.05)
        outlier = sweep_gen_config("outlier-sweep", 20)
        assert (outlier.n_in, outlier.n_out, outlier.sigma) == (35, 20, 0.1)
        rotation = sweep_gen_config("rotation-sweep", 45)
        assert (rotation.n_in, rotation.n_out, rotation.max_rotation_deg) == (30, 15, 45.0)
        assert {noise.query_edges, outlier.query_edges, rotation.query_edges} == {"copy"}
        with pytest.raises(ConfigError):
            sweep_gen_config("blur-sweep", 1)

    def test_sweep_rows_csv_and_registry(self, tmp_path):
        """grid 순서 CSV, registry 기록, replay 결과 동일"""
        spec = ExperimentConfig(
            kind="outlier-sweep",
            grid=(0, 5),
            gen=GenConfig(k=3, seed=4),
            solver=FAST_SOLVER,
            repeats=2,
            eval_pairs=1,
            output=str(tmp_path / "outlier.csv"),
        )
        registry = RunRegistry(tmp_path / "runs.json")
        rows = run_robustness_sweep(spec, SolverMatcher(FAST_SOLVER), registry=registry)

        csv_rows = read_csv(tmp_path / "outlier.csv")
        assert [r["x"] for r in csv_rows] == ["0", "5"]
        assert all(r["config_hash"] == row.config_hash for r, row in zip(csv_rows, rows))
        assert len(RunRegistry(tmp_path / "runs.json")) == 2

        entry = registry.get(rows[1].config_hash)
        replayed = replay_sweep_row(entry["config"])
        assert replayed.mean_accuracy == rows[1].mean_accuracy
        assert replayed.config_hash == rows[1].config_hash

    def test_workers_do_not_change_results(self, tmp_path):
        """병렬 실행 결과는 순차 실행과 동일"""
        base = dict(
            kind="rotation-sweep",
            grid=(0, 30, 60),
            gen=GenConfig(k=3, seed=1),
            solver=FAST_SOLVER,
            repeats=1,
            eval_pairs=1,
        )
        serial = run_robustness_sweep(
            ExperimentConfig(**base, output=str(tmp_path / "a.csv")), SolverMatcher(FAST_SOLVER)
        )
        parallel = run_robustness_sweep(
            ExperimentConfig(**base, output=str(tmp_path / "b.csv"), workers=3), SolverMatcher(FAST_SOLVER)
        )
        assert [r.mean_accuracy for r in serial] == [r.mean_accuracy for r in parallel]
        assert [r.x for r in parallel] == [0, 30, 60]

    def test_rejects_non_sweep_kind(self, tmp_path):
        """sweep 이 아닌 kind 는 ConfigError"""
        spec = ExperimentConfig(kind="ablation", output=str(tmp_path / "x.csv"))
        with pytest.raises(ConfigError):
            run_robustness_sweep(spec, SolverMatcher())


# ============================================================================
# Ablation
# ============================================================================


class TestAblation:
    """ablation variant 테스트"""

    def test_resolve_variants(self):
        """variant id 별 설정 변경"""
        model, solver = ModelConfig(), SolverConfig()
        assert resolve_variant("eqan-u", model, solver).model.mode == "eqan-u"
        assert resolve_variant("random", model, solver).model.learn_solver_params is False
        assert resolve_variant("single-sm", model, solver).solver.kind == "sm"
        width = resolve_variant("width-16", model, solver).model
        assert (width.layers, width.channels) == (5, 16)
        depth = resolve_variant("depth-8", model, solver).model
        assert (depth.layers, depth.channels) == (8, 32)
        assert not resolve_variant("single", model, solver).trainable

    def test_unknown_variant_before_training(self, tmp_path):
        """알 수 없는 variant 는 학습 전에 UnknownVariantError"""
        spec = ExperimentConfig(
            kind="ablation", variants=("single", "bogus"), output=str(tmp_path / "ab.csv")
        )
        with pytest.raises(UnknownVariantError):
            run_ablation(spec)
        assert not (tmp_path / "ab.csv").exists()

    def test_solver_variant_row(self, tmp_path):
        """학습 없는 variant: data seed 표준편차만, std_model 없음"""
        spec = ExperimentConfig(
            kind="ablation",
            variants=("single-sm",),
            gen=GenConfig(k=3, seed=2),
            solver=FAST_SOLVER,
            repeats=2,
            eval_pairs=1,
            output=str(tmp_path / "ab.csv"),
        )
        (row,) = run_ablation(spec)
        assert row.x == "single-sm" and row.std_model is None
        assert row.config["gen"]["n_out"] == 15 and row.config["gen"]["sigma"] == 0.3
        assert row.config["gen"]["query_edges"] == "copy"
        assert replay_ablation_row(row.config).mean_accuracy == row.mean_accuracy

    def test_trained_variant_row(self, tmp_path):
        """학습 variant: model seed 표준편차 기록"""
        spec = ExperimentConfig(
            kind="ablation",
            variants=("eqan",),
            gen=GenConfig(k=3, seed=2),
            model=ModelConfig(layers=1, channels=2),
            train=TrainConfig(total_iters=1, warmup_iters=0, batch=1, eval_every=1, eval_pairs=1),
            repeats=2,
            eval_pairs=1,
            output=str(tmp_path / "ab.csv"),
        )
        (row,) = run_ablation(spec)
        assert row.std_model is not None
        assert row.config["train"]["total_iters"] == 1
        assert read_csv(tmp_path / "ab.csv")[0]["std_model"] != ""


# ============================================================================
# Sampling Sweep
# ============================================================================


class TestSamplingSweep:
    """EQAN-R gamma sweep 테스트"""

    @pytest.fixture
    def model(self):
        return EnsembleQAPNet(ModelConfig(layers=1, channels=2, mode="eqan-r", gamma=0.5), seed=0)

    def test_with_gamma_copies(self, model):
        """원본 모델의 gamma 는 그대로"""
        clone = with_gamma(model, 2.0)
        assert clone.config.gamma == 2.0 and model.config.gamma == 0.5

    def test_full_sampling_matches_dense(self, model, tmp_path):
        """N_s >= n^2 이 되는 gamma 는 dense 정확도와 같음"""
        spec = ExperimentConfig(
            kind="sampling-sweep",
            grid=(0.3, 50.0),
            gen=GenConfig(n_in=7, n_out=1, sigma=0.05, k=3, seed=5),
            repeats=1,
            eval_pairs=2,
            output=str(tmp_path / "gamma.csv"),
        )
        rows = run_sampling_sweep(spec, model, label="in-memory")
        assert rows[1].mean_accuracy == rows[1].extra["dense_accuracy"]
        assert "dense_accuracy" in read_csv(tmp_path / "gamma.csv")[0]

    def test_replay_from_checkpoint(self, model, tmp_path):
        """체크포인트로 저장한 모델의 행은 replay 결과가 동일"""
        path = save_checkpoint(model, tmp_path / "r.bin")
        matcher = load_model_matcher(path)
        spec = ExperimentConfig(
            kind="sampling-sweep",
            grid=(0.5,),
            gen=GenConfig(n_in=6, k=2, sigma=0.05, seed=1),
            repeats=1,
            eval_pairs=1,
            output=str(tmp_path / "gamma.csv"),
        )
        (row,) = run_sampling_sweep(spec, matcher.model, label=str(path))
        again = replay_sampling_row(row.config, load_model_matcher(path).model)
        assert again.mean_accuracy == row.mean_accuracy

    def test_requires_sampled_model(self, tmp_path):
        """eqan-r 이 아니면 ConfigError"""
        spec = ExperimentConfig(kind="sampling-sweep", grid=(1.0,), output=str(tmp_path / "g.csv"))
        with pytest.raises(ConfigError):
            run_sampling_sweep(spec, EnsembleQAPNet(ModelConfig(layers=1, channels=2), seed=0))


# ============================================================================
# Diagnostics
# ============================================================================


class TestDiagnostics:
    """DPGM 수렴 진단 테스트"""

    def test_entropy_weight_round_trip(self):
        """(w_p, w_z) 에서 lam 복원"""
        from core.solvers import SolverParams

        assert entropy_weight(SolverParams.from_beta_lambda(0.3, 2.0)) == pytest.approx(2.0)

    def test_stable_run(self, tmp_path):
        """stability bound 아래 step size: 목적 함수 비증가, KL gap >= 0"""
        M = diagnostic_instance(GenConfig(n_in=6, k=2, sigma=0.05, seed=0))
        params = stable_params(M, lam=1.0, max_iter=20, sinkhorn_T=200)
        rows = convergence_diagnostics(M, params)
        assert len(rows) == 20
        objectives = [r.objective for r in rows]
        assert all(b <= a + 1e-9 for a, b in zip(objectives, objectives[1:]))
        assert all(r.kl_gap >= -1e-12 for r in rows)
        assert rows[-1].running_mean == pytest.approx(sum(r.step_norm_sq for r in rows) / 20)

        path = write_diagnostics(tmp_path / "diag.csv", rows)
        header = read_csv(path)[0].keys()
        assert list(header) == ["iteration", "step_norm_sq", "objective", "kl_gap", "running_mean"]
