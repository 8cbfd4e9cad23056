"""
Training Unit Tests

Tape, 매칭 loss, warm-up Adam, Trainer 학습 루프를 테스트합니다.
"""

import csv
import math
import sys
from pathlib import Path

import numpy as np
import pytest
import torch

# src 디렉토리를 path에 추가
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from config.models import GenConfig, ModelConfig, SolverConfig, TrainConfig
from core.ensemble import EnsembleQAPNet, NaiveEnsemble
from core.errors import ConfigError, DomainError, InputError, TrainingAbortedError, UsageError
from core.harness import ModelMatcher, SolverMatcher, evaluate_stream
from core.train import Tape, Trainer, WarmupAdam, backward, matching_loss, target_matrix
from db.checkpoint import load_checkpoint, sidecar_path


TINY_GEN = GenConfig(n_in=6, n_out=1, sigma=0.05, k=2)
TINY_MODEL = ModelConfig(layers=1, channels=2)


def tiny_train(**overrides) -> TrainConfig:
    values = dict(lr=1e-3, batch=2, total_iters=3, warmup_iters=1, eval_every=3, eval_pairs=2, log_every=1)
    values.update(overrides)
    return TrainConfig(**values)


# ============================================================================
# Tape
# ============================================================================


class TestTape:
    """Gradient tape 테스트"""

    def test_square(self):
        """f(w) = w^2 이면 gradient 2w"""
        w = torch.tensor(3.0, dtype=torch.float64, requires_grad=True)
        tape = Tape({"w": w})
        with tape:
            tape.record(w * w)
        grads = backward(tape)
        assert float(grads["w"]) == pytest.approx(6.0)

    def test_zero_upstream(self):
        """upstream gradient 0 이면 모든 gradient 0"""
        w = torch.randn(3, dtype=torch.float64, requires_grad=True)
        tape = Tape({"w": w})
        with tape:
            out = tape.record(torch.exp(w))
        grads = tape.backward(torch.zeros_like(out))
        assert torch.all(grads["w"] == 0)

    def test_unused_parameter_zero(self):
        """출력과 무관한 파라미터는 0"""
        a = torch.tensor(1.0, requires_grad=True)
        b = torch.tensor(2.0, requires_grad=True)
        tape = Tape({"a": a, "b": b})
        with tape:
            tape.record(a * 5.0)
        grads = backward(tape)
        assert float(grads["a"]) == 5.0 and float(grads["b"]) == 0.0

    def test_replay_twice(self):
        """같은 tape 재생 두 번은 UsageError"""
        w = torch.tensor(1.0, requires_grad=True)
        tape = Tape({"w": w})
        with tape:
            tape.record(w * 2.0)
        backward(tape)
        with pytest.raises(UsageError):
            backward(tape)

    def test_no_output(self):
        """record 없이 재생하면 UsageError"""
        with pytest.raises(UsageError):
            backward(Tape({}))

    def test_enables_grad(self):
        """no_grad 안에서도 tape 구간은 기록"""
        w = torch.tensor(2.0, requires_grad=True)
        with torch.no_grad():
            tape = Tape({"w": w})
            with tape:
                tape.record(w**3)
        assert "PowBackward0" in tape.nodes()
        assert float(backward(tape)["w"]) == pytest.approx(12.0)


# ============================================================================
# Loss
# ============================================================================


class TestMatchingLoss:
    """BCE 매칭 loss 테스트"""

    def test_uniform_two_by_two(self):
        """Q = 1/2 균등, 정답 identity: 4 log 2"""
        Q = torch.full((2, 2), 0.5, dtype=torch.float64)
        assert float(matching_loss(Q, [0, 1])) == pytest.approx(4 * math.log(2))

    def test_perfect_prediction(self):
        """Q = 정답이면 clamp 잔차만 남음"""
        Q = torch.tensor([[0.0, 1.0], [1.0, 0.0]], dtype=torch.float64)
        assert float(matching_loss(Q, [1, 0])) < 1e-10

    def test_outlier_rows_ignored(self):
        """gt 에 없는 뒤쪽 행은 loss 에 기여하지 않음"""
        Q = torch.full((3, 3), 1.0 / 3, dtype=torch.float64)
        Q2 = Q.clone()
        Q2[2] = torch.tensor([0.9, 0.05, 0.05], dtype=torch.float64)
        assert float(matching_loss(Q, [0, 1])) == pytest.approx(float(matching_loss(Q2, [0, 1])))

    def test_gradient_finite_difference(self):
        """Q 에 대한 gradient 를 중앙 차분과 비교"""
        gen = torch.Generator().manual_seed(0)
        Q = (torch.rand(3, 3, dtype=torch.float64, generator=gen) * 0.8 + 0.1).requires_grad_()
        matching_loss(Q, [2, 0, 1]).backward()
        h = 1e-6
        for i, j in [(0, 2), (1, 1), (2, 0)]:
            plus, minus = Q.detach().clone(), Q.detach().clone()
            plus[i, j] += h
            minus[i, j] -= h
            numeric = (matching_loss(plus, [2, 0, 1]) - matching_loss(minus, [2, 0, 1])) / (2 * h)
            assert float(Q.grad[i, j]) == pytest.approx(float(numeric), rel=1e-5)

    def test_non_finite(self):
        """NaN 예측은 DomainError"""
        Q = torch.tensor([[float("nan"), 0.5], [0.5, 0.5]])
        with pytest.raises(DomainError):
            matching_loss(Q, [0, 1])

    def test_target_validation(self):
        """범위 밖/중복 정답은 InputError"""
        with pytest.raises(InputError):
            target_matrix([0, 3], 3)
        with pytest.raises(InputError):
            target_matrix([1, 1], 3)
        assert target_matrix(np.array([2, 0]), 3).tolist() == [[0, 0, 1], [1, 0, 0]]


# ============================================================================
# Optimizer
# ============================================================================


class TestWarmupAdam:
    """WarmupAdam 테스트"""

    def test_warmup_schedule(self):
        """warmup 구간은 warmup_lr, 이후 lr"""
        opt = WarmupAdam([torch.nn.Parameter(torch.zeros(1))], TrainConfig(lr=1e-3, total_iters=10, warmup_iters=2))
        assert opt.lr_at(0) == opt.lr_at(1) == 1e-10
        assert opt.lr_at(2) == 1e-3

    def test_zero_gradient(self):
        """gradient 0 이면 파라미터 불변"""
        p = torch.nn.Parameter(torch.tensor([1.0, -2.0], dtype=torch.float64))
        opt = WarmupAdam([p], TrainConfig(lr=0.1, total_iters=5, warmup_iters=0))
        for _ in range(3):
            opt.step({p: torch.zeros_like(p)})
        assert p.tolist() == [1.0, -2.0]

    def test_two_steps_by_hand(self):
        """스칼라 파라미터 두 step 을 손 계산과 비교"""
        lr, b1, b2, eps = 0.1, 0.9, 0.999, 1e-8
        p = torch.nn.Parameter(torch.tensor(1.0, dtype=torch.float64))
        opt = WarmupAdam([p], TrainConfig(lr=lr, total_iters=5, warmup_iters=0, adam_eps=eps))

        w, m, v = 1.0, 0.0, 0.0
        for t, g in enumerate([2.0, -1.0], start=1):
            opt.step({p: torch.tensor(g, dtype=torch.float64)})
            m = b1 * m + (1 - b1) * g
            v = b2 * v + (1 - b2) * g * g
            w -= lr * (m / (1 - b1**t)) / (math.sqrt(v / (1 - b2**t)) + eps)
            assert float(p) == pytest.approx(w, rel=1e-12)

    def test_constant_gradient_step_size(self):
        """일정한 gradient 에서 step 크기는 lr 로 수렴"""
        p = torch.nn.Parameter(torch.tensor(0.0, dtype=torch.float64))
        opt = WarmupAdam([p], TrainConfig(lr=0.01, total_iters=5, warmup_iters=0))
        previous = float(p)
        for _ in range(200):
            opt.step({p: torch.tensor(0.3, dtype=torch.float64)})
        step = previous - float(p)
        assert step / 200 == pytest.approx(0.01, rel=1e-3)

    def test_non_finite_gradient(self):
        """NaN gradient 는 TrainingAbortedError"""
        p = torch.nn.Parameter(torch.zeros(2))
        opt = WarmupAdam([p], TrainConfig(total_iters=5, warmup_iters=0))
        with pytest.raises(TrainingAbortedError):
            opt.step({p: torch.tensor([0.0, float("inf")])})


# ============================================================================
# Trainer
# ============================================================================


class TestTrainer:
    """Trainer 학습 루프 테스트"""

    def test_zero_iterations(self):
        """total_iters = 0 이면 초기 모델 그대로"""
        cfg = tiny_train(total_iters=0, warmup_iters=0)
        result = Trainer(TINY_MODEL, cfg, TINY_GEN).fit()
        fresh = EnsembleQAPNet(TINY_MODEL, seed=cfg.seed)
        assert result.iterations == 0 and result.losses == []
        for (_, a), (_, b) in zip(result.model.named_parameters(), fresh.named_parameters()):
            assert torch.equal(a, b)

    def test_deterministic_losses(self):
        """같은 시드는 같은 loss 곡선"""
        a = Trainer(TINY_MODEL, tiny_train(), TINY_GEN).fit()
        b = Trainer(TINY_MODEL, tiny_train(), TINY_GEN).fit()
        assert a.losses == b.losses
        assert len(a.losses) == 3 and all(math.isfinite(x) for x in a.losses)

    def test_parameters_change(self):
        """학습 후 파라미터가 바뀜"""
        cfg = tiny_train(lr=1e-2, warmup_iters=0)
        result = Trainer(TINY_MODEL, cfg, TINY_GEN).fit()
        fresh = EnsembleQAPNet(TINY_MODEL, seed=cfg.seed)
        changed = [
            not torch.equal(a, b)
            for (_, a), (_, b) in zip(result.model.named_parameters(), fresh.named_parameters())
        ]
        assert any(changed)

    def test_gradient_reaches_sigma_and_solver_weights(self, monkeypatch):
        """ablation 분포 (sigma 0.3, 복제 edge) 에서도 sigma 와 block solver 가중치에 gradient"""
        gen = GenConfig(n_in=8, n_out=3, sigma=0.3, k=3, query_edges="copy", seed=1)
        cfg = tiny_train(dtype="float64", warmup_iters=0)
        trainer = Trainer(ModelConfig(layers=2, channels=2), cfg, gen)
        names = {param: name for name, param in trainer.model.named_parameters()}
        captured = {}
        monkeypatch.setattr(
            trainer.optimizer, "step", lambda grads: captured.update({names[p]: g for p, g in grads.items()})
        )
        trainer.train_step(0)

        for name in ("raw_sigma", "blocks.0.raw_w_p", "blocks.0.raw_w_z", "blocks.1.raw_w_p"):
            grad = captured[name]
            assert torch.isfinite(grad).all(), name
            assert float(grad.abs().sum()) > 0.0, name

    def test_checkpoint_and_metrics(self, tmp_path):
        """최고 모델 체크포인트와 metrics CSV 기록"""
        ckpt = tmp_path / "runs" / "eqan.bin"
        metrics = tmp_path / "metrics.csv"
        result = Trainer(TINY_MODEL, tiny_train(), TINY_GEN, metrics_path=metrics).fit(ckpt)

        assert result.checkpoint == ckpt and ckpt.exists() and sidecar_path(ckpt).exists()
        assert result.eval_history[-1][0] == 3
        loaded = load_checkpoint(ckpt)
        for (_, a), (_, b) in zip(loaded.named_parameters(), result.model.named_parameters()):
            assert torch.equal(a, b.to(torch.float32))

        with open(metrics, newline="", encoding="utf-8") as f:
            rows = list(csv.DictReader(f))
        assert [int(r["iter"]) for r in rows] == [1, 2, 3]
        assert rows[-1]["eval_acc"] != "" and rows[0]["eval_acc"] == ""

    def test_abort_restores_last_good(self, tmp_path, monkeypatch):
        """non-finite loss: 직전 상태 복원, last_good 체크포인트 경로 전달"""
        trainer = Trainer(TINY_MODEL, tiny_train(), TINY_GEN)
        before = {k: v.clone() for k, v in trainer.model.state_dict().items()}
        params = list(trainer.model.parameters())
        monkeypatch.setattr(
            trainer, "batch_loss", lambda pairs, iteration: sum(p.sum() for p in params) * float("nan")
        )
        with pytest.raises(TrainingAbortedError) as info:
            trainer.fit(tmp_path / "eqan.bin")
        assert info.value.last_good == str(tmp_path / "eqan.bin.last_good")
        assert Path(info.value.last_good).exists()
        for name, value in trainer.model.state_dict().items():
            assert torch.equal(value, before[name])

    def test_naive_ensemble(self):
        """NaiveEnsemble 도 같은 루프로 학습 (체크포인트 없이)"""
        model = NaiveEnsemble(channels=2, steps=1)
        result = Trainer(TINY_MODEL, tiny_train(), TINY_GEN, model=model).fit()
        assert result.best_accuracy is not None and 0.0 <= result.best_accuracy <= 1.0

    def test_naive_checkpoint_rejected(self, tmp_path):
        """EQAN 이 아닌 모델의 체크포인트 요청은 ConfigError"""
        trainer = Trainer(TINY_MODEL, tiny_train(), TINY_GEN, model=NaiveEnsemble(channels=2, steps=1))
        with pytest.raises(ConfigError):
            trainer.fit(tmp_path / "naive.bin")


# ============================================================================
# Training Effect
# ============================================================================


class TestTrainingEffect:
    """작은 설정에서 학습이 held-out 정확도를 올리는지 확인"""

    GEN = GenConfig(n_in=10, n_out=4, sigma=0.1, k=3, query_edges="copy", seed=0)
    MODEL = ModelConfig(layers=2, channels=4)
    TRAIN = TrainConfig(
        lr=1e-2, batch=2, total_iters=150, warmup_iters=0, eval_every=150, eval_pairs=10, log_every=50
    )

    def held_out(self, matcher) -> float:
        return evaluate_stream(matcher, self.GEN, seed=777, count=20).mean

    def test_trained_beats_untrained_and_single_solver(self):
        """학습 모델은 초기 모델과 단일 DPGM 보다 정확"""
        untrained = self.held_out(ModelMatcher(EnsembleQAPNet(self.MODEL, seed=self.TRAIN.seed)))
        result = Trainer(self.MODEL, self.TRAIN, self.GEN).fit()
        trained = self.held_out(ModelMatcher(result.model))
        single = self.held_out(SolverMatcher(SolverConfig(kind="dpgm")))

        assert result.losses[-1] < result.losses[0]
        assert np.mean(result.losses[-20:]) < np.mean(result.losses[:20])
        assert trained >= untrained + 0.2
        assert trained > single
