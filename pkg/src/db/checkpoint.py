"""
Model Checkpoint Store

EQAN 파라미터를 버전이 있는 바이너리 파일 + JSON sidecar 로 저장합니다.

바이너리 레이아웃 (little-endian):

    offset  size  field
    0       4     magic b"EQAN"
    4       1     format version (현재 1)
    5       1     mode      (0=eqan, 1=eqan-u, 2=eqan-r)
    6       1     solver    (0=dpgm, 1=gagm, 2=sm)
    7       1     decision  (0=all, 1=last)
    8       4     L (u32)
    12      4     C (u32)
    16      4     d (u32)
    20      4     tensor 개수 N (u32)
    24      ...   N 개 블록: name_len (u16), name (utf-8), ndim (u8),
                  shape (u32 x ndim), 데이터 (float32 x prod(shape))

블록 순서는 state_dict 순서입니다. sidecar (<path>.json) 에는 ModelConfig 전체와
학습 메타데이터가 들어갑니다.
"""

import json
import logging
import struct
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import torch

from config.models import ModelConfig
from core.ensemble.model import EnsembleQAPNet
from core.errors import CheckpointError, CheckpointVersionError

logger = logging.getLogger(__name__)


# ============================================================================
# Format Constants
# ============================================================================

MAGIC = b"EQAN"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sBBBBIIII")

MODE_CODES = {"eqan": 0, "eqan-u": 1, "eqan-r": 2}
SOLVER_CODES = {"dpgm": 0, "gagm": 1, "sm": 2}
DECISION_CODES = {"all": 0, "last": 1}


def _decode(codes: Dict[str, int], value: int, label: str, offset: int) -> str:
    for name, code in codes.items():
        if code == value:
            return name
    raise CheckpointError(f"unknown {label} flag {value}", offset=offset)


def sidecar_path(path: Path | str) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


# ============================================================================
# Save
# ============================================================================


def encode_model(model: EnsembleQAPNet) -> bytes:
    """모델 파라미터를 바이너리로 직렬화 (float32)"""
    cfg = model.config
    state = model.state_dict()
    chunks = [
        HEADER.pack(
            MAGIC,
            FORMAT_VERSION,
            MODE_CODES[cfg.mode],
            SOLVER_CODES[cfg.solver],
            DECISION_CODES[cfg.decision_feature],
            cfg.layers,
            cfg.channels,
            cfg.dim,
            len(state),
        )
    ]
    for name, tensor in state.items():
        encoded = name.encode("utf-8")
        shape = tuple(tensor.shape)
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack(f"<B{len(shape)}I", len(shape), *shape))
        chunks.append(np.ascontiguousarray(tensor.detach().cpu().numpy(), dtype="<f4").tobytes())
    return b"".join(chunks)


def save_checkpoint(
    model: EnsembleQAPNet, path: Path | str, metadata: Optional[Dict[str, Any]] = None
) -> Path:
    """
    모델 저장. 부모 디렉토리는 자동 생성합니다.

    Returns:
        저장한 바이너리 경로
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = encode_model(model)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(payload)
    tmp.replace(path)

    sidecar = {
        "format_version": FORMAT_VERSION,
        "model": model.config.to_dict(),
        "parameters": [name for name in model.state_dict()],
        "metadata": metadata or {},
    }
    with open(sidecar_path(path), "w", encoding="utf-8") as f:
        json.dump(sidecar, f, indent=2, ensure_ascii=False)

    logger.info("checkpoint saved: %s (%d bytes)", path, len(payload))
    return path


# ============================================================================
# Load
# ============================================================================


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        if self.offset + size > len(self.data):
            raise CheckpointError(
                f"truncated checkpoint while reading {what} (need {size} bytes, "
                f"{len(self.data) - self.offset} left)",
                offset=self.offset,
            )
        chunk = self.data[self.offset : self.offset + size]
        self.offset += size
        return chunk


def decode_header(data: bytes) -> Tuple[Dict[str, Any], int]:
    """
    헤더 파싱.

    Returns:
        (header dict, tensor 개수)

    Raises:
        CheckpointError: magic 불일치 또는 잘린 헤더
        CheckpointVersionError: 지원하지 않는 버전
    """
    if not MAGIC.startswith(data[: len(MAGIC)]):
        raise CheckpointError(f"bad magic {bytes(data[: len(MAGIC)])!r}", offset=0)
    if len(data) < HEADER.size:
        raise CheckpointError("truncated checkpoint header", offset=len(data))
    _, version, mode, solver, decision, layers, channels, dim, count = HEADER.unpack_from(data)
    if version != FORMAT_VERSION:
        raise CheckpointVersionError(
            f"unsupported checkpoint version {version} (expected {FORMAT_VERSION})", offset=4
        )
    header = {
        "mode": _decode(MODE_CODES, mode, "mode", 5),
        "solver": _decode(SOLVER_CODES, solver, "solver", 6),
        "decision_feature": _decode(DECISION_CODES, decision, "decision", 7),
        "layers": layers,
        "channels": channels,
        "dim": dim,
    }
    return header, count


def decode_tensors(data: bytes) -> Tuple[Dict[str, Any], List[Tuple[str, torch.Tensor]]]:
    """바이너리 전체 파싱 (모델 생성 전에 끝까지 검증)"""
    header, count = decode_header(data)
    reader = _Reader(data)
    reader.offset = HEADER.size

    tensors = []
    for _ in range(count):
        (name_len,) = struct.unpack("<H", reader.take(2, "name length"))
        start = reader.offset
        try:
            name = reader.take(name_len, "tensor name").decode("utf-8")
        except UnicodeDecodeError as e:
            raise CheckpointError("tensor name is not valid utf-8", offset=start) from e
        (ndim,) = struct.unpack("<B", reader.take(1, "ndim"))
        shape = struct.unpack(f"<{ndim}I", reader.take(4 * ndim, f"shape of {name}"))
        numel = int(np.prod(shape, dtype=np.int64))
        raw = reader.take(4 * numel, f"data of {name}")
        array = np.frombuffer(raw, dtype="<f4").reshape(shape).copy()
        tensors.append((name, torch.from_numpy(array)))

    if reader.offset != len(data):
        raise CheckpointError("trailing bytes after last tensor", offset=reader.offset)
    return header, tensors


def load_checkpoint(path: Path | str) -> EnsembleQAPNet:
    """
    체크포인트 로드. sidecar 가 있으면 ModelConfig 전체를 복원하고, 없으면
    헤더 값과 기본값으로 구성합니다.

    Raises:
        CheckpointError: 손상/불일치 (offset 포함)
        CheckpointVersionError: 버전 불일치
        FileNotFoundError: 파일 없음
    """
    path = Path(path)
    data = path.read_bytes()
    header, tensors = decode_tensors(data)

    sidecar = sidecar_path(path)
    if sidecar.exists():
        with open(sidecar, "r", encoding="utf-8") as f:
            meta = json.load(f)
        config = ModelConfig(**meta["model"])
        for key, value in header.items():
            if getattr(config, key) != value:
                raise CheckpointError(
                    f"sidecar {key}={getattr(config, key)!r} disagrees with header {value!r}"
                )
    else:
        config = ModelConfig(**header)

    model = EnsembleQAPNet(config, seed=None)
    expected = model.state_dict()
    names = [name for name, _ in tensors]
    if names != list(expected):
        raise CheckpointError(f"parameter layout mismatch: {names} vs {list(expected)}")
    for name, tensor in tensors:
        if tuple(tensor.shape) != tuple(expected[name].shape):
            raise CheckpointError(f"shape mismatch for {name}: {tuple(tensor.shape)}")

    model.load_state_dict({name: tensor for name, tensor in tensors})
    return model
