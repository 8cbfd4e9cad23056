"""
CLI Entry Point

서브커맨드 등록, 로깅/스레드 초기화, 종료 코드 매핑을 담당합니다.

종료 코드:
    0  성공
    1  예상하지 못한 오류
    2  gmatch 오류 (설정, 입력, 체크포인트 등) 또는 잘못된 인자
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from core.errors import GMatchError

from .deps import configure_logging, configure_threads

logger = logging.getLogger(__name__)


# ============================================================================
# Parser
# ============================================================================


def build_parser() -> argparse.ArgumentParser:
    """모든 서브커맨드를 등록한 parser"""
    parser = argparse.ArgumentParser(
        prog="gmatch",
        description="Ensemble quadratic assignment networks for graph matching",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging level",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # 서브커맨드 등록
    from .commands import ablate, diagnose, evaluate, generate, match, sample_sweep, sweep, train

    generate.register(subparsers)
    train.register(subparsers)
    evaluate.register(subparsers)
    match.register(subparsers)
    sweep.register(subparsers)
    ablate.register(subparsers)
    diagnose.register(subparsers)
    sample_sweep.register(subparsers)

    return parser


# ============================================================================
# Main
# ============================================================================


def _diagnostic(error: BaseException) -> str:
    payload = {"error": type(error).__name__, "message": str(error)}
    offset = getattr(error, "offset", None)
    if offset is not None:
        payload["offset"] = offset
    last_good = getattr(error, "last_good", None)
    if last_good is not None:
        payload["last_good"] = last_good
    return json.dumps(payload, ensure_ascii=False)


def main(argv: Optional[List[str]] = None) -> int:
    """
    CLI 실행.

    Returns:
        종료 코드
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    try:
        configure_threads()
        return args.handler(args)
    except GMatchError as e:
        logger.debug("command failed", exc_info=True)
        sys.stderr.write(_diagnostic(e) + "\n")
        return 2
    except Exception as e:  # noqa: BLE001
        logger.error("unexpected failure", exc_info=True)
        sys.stderr.write(_diagnostic(e) + "\n")
        return 1
