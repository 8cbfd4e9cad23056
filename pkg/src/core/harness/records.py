"""
Sweep Records

sweep/ablation 결과 행과 CSV 출력. 모든 행은 재현에 필요한 seed 와
config hash 를 함께 가집니다.
"""

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional


def canonical_json(config: Dict[str, Any]) -> str:
    """키 정렬, 공백 없는 JSON (tuple 은 list 로)"""
    return json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)


def config_hash(config: Dict[str, Any]) -> str:
    """행 설정의 MD5 해시"""
    return hashlib.md5(canonical_json(config).encode("utf-8")).hexdigest()


@dataclass
class SweepRow:
    """
    결과 표의 한 행.

    Attributes:
        kind: 실험 종류 (noise-sweep, ablation, ...)
        x: grid 값 (ablation 은 variant id)
        mean_accuracy: repeat 평균 정확도
        std_accuracy: data seed 에 대한 표준편차
        repeats: repeat 수
        seed: 행의 base seed
        config: 행을 다시 계산하는 데 필요한 전체 설정
        std_model: model seed 에 대한 표준편차 (ablation 에서만)
        extra: 부가 지표 (예: dense 정확도)
    """

    kind: str
    x: Any
    mean_accuracy: float
    std_accuracy: float
    repeats: int
    seed: int
    config: Dict[str, Any]
    std_model: Optional[float] = None
    extra: Dict[str, float] = field(default_factory=dict)

    @property
    def config_hash(self) -> str:
        return config_hash(self.config)

    def to_csv_row(self) -> Dict[str, Any]:
        row = {
            "kind": self.kind,
            "x": self.x,
            "mean_accuracy": f"{self.mean_accuracy:.6f}",
            "std_accuracy": f"{self.std_accuracy:.6f}",
            "std_model": "" if self.std_model is None else f"{self.std_model:.6f}",
            "repeats": self.repeats,
            "seed": self.seed,
            "config_hash": self.config_hash,
        }
        row.update({key: f"{value:.6f}" for key, value in self.extra.items()})
        return row


CSV_FIELDS = ["kind", "x", "mean_accuracy", "std_accuracy", "std_model", "repeats", "seed", "config_hash"]


def write_rows(path: Path | str, rows: Iterable[SweepRow]) -> Path:
    """행 목록을 CSV 로 저장 (extra 지표는 뒤쪽 열)"""
    rows = list(rows)
    extra_fields: List[str] = []
    for row in rows:
        for key in row.extra:
            if key not in extra_fields:
                extra_fields.append(key)

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_FIELDS + extra_fields, restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow(row.to_csv_row())
    return path


def record_rows(registry, rows: Iterable[SweepRow]) -> None:
    """RunRegistry 에 행 기록 후 저장"""
    for row in rows:
        registry.record(row.config_hash, kind=row.kind, config=row.config, value=row.mean_accuracy)
    registry.save()
