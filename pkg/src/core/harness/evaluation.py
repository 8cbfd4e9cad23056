"""
Pair Evaluation

매처 하나를 seed 로 결정되는 쌍 집합에서 평가합니다.
"""

import logging
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, TypeVar

from config.models import GenConfig
from core.graph.generator import GraphPair, PairStream, derive_seed

from .matchers import Matcher

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass
class EvalSummary:
    """쌍별 정확도와 요약"""

    accuracies: List[float] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(statistics.fmean(self.accuracies)) if self.accuracies else 0.0

    @property
    def count(self) -> int:
        return len(self.accuracies)


def evaluate_pairs(matcher: Matcher, pairs: Sequence[GraphPair], seed: int = 0) -> EvalSummary:
    """
    각 쌍을 매칭하고 정확도 수집. 쌍 i 의 mask 시드는 derive_seed(seed, i).
    """
    summary = EvalSummary()
    for idx, pair in enumerate(pairs):
        summary.accuracies.append(matcher.match(pair, seed=derive_seed(seed, idx)).accuracy)
    return summary


def evaluate_stream(matcher: Matcher, gen: GenConfig, seed: int, count: int) -> EvalSummary:
    """PairStream(gen, seed) 의 앞 count 개 쌍으로 평가"""
    return evaluate_pairs(matcher, PairStream(gen, base_seed=seed).take(count), seed=seed)


def std(values: Sequence[float]) -> float:
    """표본 표준편차 (값이 하나면 0)"""
    return float(statistics.stdev(values)) if len(values) > 1 else 0.0


def run_ordered(tasks: Sequence[Callable[[], T]], workers: int = 1) -> List[T]:
    """
    작업을 worker pool 에서 실행하고 입력 순서대로 결과 반환.
    workers == 1 이면 현재 스레드에서 순차 실행합니다.
    """
    if workers <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(task) for task in tasks]
        return [future.result() for future in futures]
