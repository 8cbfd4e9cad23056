"""
Acceptance fixtures

학습이 필요한 검사는 `slow` 로 표시되며 GMATCH_RUN_SLOW=1 일 때만 실행됩니다.
desk-scale 모델은 세션당 한 번 학습해 체크포인트로 공유합니다.

    GMATCH_RUN_SLOW=1 pytest tasktests/acceptance
"""

import os
import sys
from dataclasses import replace
from pathlib import Path

import pytest

# src 디렉토리를 path에 추가
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from core.train import train

from .desk import DESK_GEN, DESK_MODEL, DESK_TRAIN

RUN_SLOW = os.getenv("GMATCH_RUN_SLOW") == "1"


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip = pytest.mark.skip(reason="desk-scale run; set GMATCH_RUN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def desk_checkpoint(tmp_path_factory) -> Path:
    """C=8, L=3, 5000 iteration EQAN 체크포인트"""
    path = tmp_path_factory.mktemp("desk") / "eqan.bin"
    result = train(DESK_MODEL, DESK_TRAIN, DESK_GEN, checkpoint_path=path)
    assert result.checkpoint is not None
    return path


@pytest.fixture(scope="session")
def sampled_checkpoint(tmp_path_factory) -> Path:
    """gamma = 1 로 학습한 EQAN-R 체크포인트"""
    path = tmp_path_factory.mktemp("desk") / "eqan-r.bin"
    result = train(replace(DESK_MODEL, mode="eqan-r", gamma=1.0), DESK_TRAIN, DESK_GEN, checkpoint_path=path)
    assert result.checkpoint is not None
    return path
