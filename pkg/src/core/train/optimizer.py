"""
Warm-up Adam

torch.optim.Adam 에 warm-up 학습률 구간과 non-finite gradient 검사를 더합니다.
iteration < warmup_iters 동안은 warmup_lr, 이후 lr 를 사용합니다.
"""

import logging
from typing import Dict, Iterable, Optional

import torch

from config.models import TrainConfig
from core.errors import TrainingAbortedError

logger = logging.getLogger(__name__)


class WarmupAdam:
    """
    사용법:
        opt = WarmupAdam(model.parameters(), TrainConfig())
        opt.step({p: g for p, g in zip(params, grads)})
    """

    def __init__(self, params: Iterable[torch.nn.Parameter], cfg: TrainConfig):
        self.cfg = cfg
        self.params = [p for p in params if p.requires_grad]
        self.iteration = 0
        self.optimizer = torch.optim.Adam(
            self.params, lr=self.lr_at(0), betas=cfg.adam_betas, eps=cfg.adam_eps
        )

    def lr_at(self, iteration: int) -> float:
        return self.cfg.warmup_lr if iteration < self.cfg.warmup_iters else self.cfg.lr

    def step(self, grads: Optional[Dict[torch.Tensor, torch.Tensor]] = None) -> float:
        """
        한 step 갱신.

        Args:
            grads: {파라미터: gradient}. None 이면 각 파라미터의 .grad 사용

        Returns:
            이번 step 에 사용한 학습률

        Raises:
            TrainingAbortedError: gradient 에 NaN/Inf
        """
        if grads is not None:
            for p in self.params:
                g = grads.get(p)
                p.grad = torch.zeros_like(p) if g is None else g.detach().clone()
        for p in self.params:
            if p.grad is not None and not torch.isfinite(p.grad).all():
                raise TrainingAbortedError(
                    f"non-finite gradient at iteration {self.iteration} (shape {tuple(p.shape)})"
                )

        lr = self.lr_at(self.iteration)
        for group in self.optimizer.param_groups:
            group["lr"] = lr
        self.optimizer.step()
        self.optimizer.zero_grad(set_to_none=True)
        self.iteration += 1
        return lr

    def state(self, p: torch.Tensor) -> dict:
        """파라미터 p 의 Adam moment 상태"""
        return self.optimizer.state.get(p, {})

    def state_dict(self) -> dict:
        return {"iteration": self.iteration, "adam": self.optimizer.state_dict()}

    def load_state_dict(self, state: dict) -> None:
        self.iteration = state["iteration"]
        self.optimizer.load_state_dict(state["adam"])


def adam_step(
    params: Iterable[torch.Tensor],
    grads: Iterable[torch.Tensor],
    optimizer: WarmupAdam,
) -> float:
    """params/grads 를 짝지어 optimizer 한 step"""
    return optimizer.step({p: g for p, g in zip(params, grads)})
