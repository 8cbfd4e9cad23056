"""
Run Registry

sweep/ablation 결과 행을 재현할 수 있도록 행별 설정을 JSON 파일에 기록합니다.
키는 행 설정의 canonical JSON MD5 해시 (config_hash) 입니다.
"""

import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Tuple

logger = logging.getLogger(__name__)


# ============================================================================
# Registry Schema
# ============================================================================

REGISTRY_VERSION = 1


def _empty() -> dict:
    return {"version": REGISTRY_VERSION, "runs": {}}


# ============================================================================
# RunRegistry Class
# ============================================================================


class RunRegistry:
    """
    실행 기록 저장소 (JSON 파일 기반).

    레지스트리 스키마:
        {
            "version": 1,
            "runs": {
                "9f2c...": {
                    "kind": "noise-sweep",
                    "config": {...},
                    "value": 0.93,
                    "recorded_at": "2026-01-20T09:00:00"
                }
            }
        }

    사용법:
        registry = RunRegistry(Path("./runs.json"))
        registry.record(row.config_hash, kind="noise-sweep", config=row.config, value=row.accuracy)
        registry.save()
        entry = registry.get("9f2c...")
    """

    def __init__(self, registry_path: Path | str):
        self.registry_path = Path(registry_path)
        self._data: dict = self._load()

    def _load(self) -> dict:
        """레지스트리 파일 로드 (없거나 손상되었으면 빈 레지스트리)"""
        if not self.registry_path.exists():
            return _empty()
        try:
            with open(self.registry_path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (json.JSONDecodeError, IOError):
            logger.warning("run registry %s is unreadable; starting empty", self.registry_path)
            return _empty()
        if data.get("version") != REGISTRY_VERSION:
            logger.warning(
                "run registry version %s != %s; starting empty", data.get("version"), REGISTRY_VERSION
            )
            return _empty()
        data.setdefault("runs", {})
        return data

    def save(self) -> None:
        """레지스트리를 파일에 저장"""
        self.registry_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.registry_path, "w", encoding="utf-8") as f:
            json.dump(self._data, f, indent=2, ensure_ascii=False, sort_keys=True)

    @property
    def runs(self) -> Dict[str, dict]:
        return self._data["runs"]

    def get(self, config_hash: str) -> Optional[dict]:
        """
        해시로 기록 조회. 고유한 접두사도 허용합니다.

        Raises:
            KeyError: 접두사가 여러 기록과 일치하는 경우
        """
        if config_hash in self.runs:
            return self.runs[config_hash]
        matches = [key for key in self.runs if key.startswith(config_hash)]
        if len(matches) > 1:
            raise KeyError(f"ambiguous run hash prefix {config_hash!r}: {len(matches)} matches")
        return self.runs[matches[0]] if matches else None

    def record(self, config_hash: str, kind: str, config: Dict[str, Any], value: float) -> None:
        """행 기록 추가 (같은 해시는 덮어씀)"""
        self.runs[config_hash] = {
            "kind": kind,
            "config": config,
            "value": value,
            "recorded_at": datetime.now().isoformat(timespec="seconds"),
        }

    def items(self) -> Iterator[Tuple[str, dict]]:
        return iter(self.runs.items())

    def __len__(self) -> int:
        return len(self.runs)

    def __contains__(self, config_hash: str) -> bool:
        return config_hash in self.runs
