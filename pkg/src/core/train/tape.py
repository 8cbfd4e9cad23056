"""
Gradient Tape

forward 한 번을 기록하고 reverse-mode 로 파라미터 gradient 를 계산합니다.
primitive 기록과 adjoint 재생은 torch autograd 그래프가 담당하며, Tape 는
감시할 파라미터와 출력, 1회 사용 제약을 관리합니다.

    tape = Tape(model.named_parameters())
    with tape:
        loss = loss_fn(model(pair).Q, gt)
        tape.record(loss)
    grads = backward(tape)
"""

from typing import Dict, Iterable, List, Optional, Tuple, Union

import torch

from core.errors import UsageError

NamedParams = Iterable[Tuple[str, torch.Tensor]]


class Tape:
    """
    forward 1회 기록.

    Attributes:
        params: 감시 대상 (이름, 텐서) 목록
        output: record 된 출력 텐서
    """

    def __init__(self, params: Union[NamedParams, Dict[str, torch.Tensor]]):
        items = params.items() if isinstance(params, dict) else params
        self.params: List[Tuple[str, torch.Tensor]] = [
            (name, p) for name, p in items if p.requires_grad
        ]
        self.output: Optional[torch.Tensor] = None
        self._replayed = False
        self._grad_ctx = None

    def __enter__(self) -> "Tape":
        self._grad_ctx = torch.enable_grad()
        self._grad_ctx.__enter__()
        return self

    def __exit__(self, *exc) -> None:
        self._grad_ctx.__exit__(*exc)
        self._grad_ctx = None

    def record(self, output: torch.Tensor) -> torch.Tensor:
        """forward 의 최종 출력을 등록"""
        if self._replayed:
            raise UsageError("tape has already been replayed; record a new forward pass")
        self.output = output
        return output

    @property
    def replayed(self) -> bool:
        return self._replayed

    def nodes(self) -> List[str]:
        """
        기록된 연산 노드 이름 (출력에서 입력 방향, 각 노드 1회).
        """
        if self.output is None or self.output.grad_fn is None:
            return []
        seen = set()
        order = []
        stack = [self.output.grad_fn]
        while stack:
            node = stack.pop()
            if node is None or node in seen:
                continue
            seen.add(node)
            order.append(type(node).__name__)
            stack.extend(fn for fn, _ in node.next_functions)
        return order

    def backward(self, seed_grad: Optional[torch.Tensor] = None) -> Dict[str, torch.Tensor]:
        return backward(self, seed_grad)


def backward(tape: Tape, seed_grad: Optional[torch.Tensor] = None) -> Dict[str, torch.Tensor]:
    """
    기록된 forward 의 adjoint 를 역순으로 재생해 파라미터 gradient 반환.

    Args:
        tape: record 가 끝난 tape
        seed_grad: 출력에 대한 upstream gradient (None 이면 1)

    Returns:
        {파라미터 이름: gradient} (출력과 무관한 파라미터는 0)

    Raises:
        UsageError: 기록이 없거나 이미 재생한 tape
    """
    if tape.output is None:
        raise UsageError("tape has no recorded output")
    if tape.replayed:
        raise UsageError("tape can only be replayed once")
    tape._replayed = True

    if seed_grad is None:
        seed_grad = torch.ones_like(tape.output)
    if not tape.params or tape.output.grad_fn is None:
        return {name: torch.zeros_like(p) for name, p in tape.params}

    tensors = [p for _, p in tape.params]
    grads = torch.autograd.grad(
        tape.output, tensors, grad_outputs=seed_grad, allow_unused=True
    )
    return {
        name: torch.zeros_like(p) if g is None else g
        for (name, p), g in zip(tape.params, grads)
    }
