"""
match: 그래프 쌍 JSON 하나를 매칭하고 순열, 정확도, 유사도 r = tr(QR) 출력
"""

import argparse
import json

import numpy as np
from pydantic import ValidationError

from core.assignment.metrics import MatchResult
from core.errors import InputError
from core.graph.generator import GraphPair
from core.harness.matchers import ModelMatcher, build_matcher
from dtypes.graph import PairPayload, graph_from_payload

from ..deps import add_common_args, add_model_args, build_experiment, emit_json


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "match",
        help="match one graph pair from a JSON file",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    add_common_args(parser)
    add_model_args(parser)
    parser.add_argument("--pair", required=True, help="pair JSON (a pair object or `generate` output)")
    parser.add_argument("--index", type=int, default=0, help="pair index inside `generate` output")
    parser.add_argument(
        "--score-source",
        default="prediction",
        choices=["prediction", "reward"],
        help="matrix fed to the Hungarian method",
    )
    parser.set_defaults(handler=run)


def load_pair(path: str, index: int = 0) -> GraphPair:
    """
    Raises:
        InputError: JSON/스키마 오류 또는 범위를 벗어난 index
    """
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise InputError(f"{path}: invalid JSON ({e})") from e
    if "pairs" in raw:
        if not 0 <= index < len(raw["pairs"]):
            raise InputError(f"{path}: pair index {index} out of range ({len(raw['pairs'])} pairs)")
        raw = raw["pairs"][index]
    try:
        payload = PairPayload.model_validate(raw)
    except ValidationError as e:
        raise InputError(f"{path}: {e.errors()[0]['msg']}") from e
    gt = np.asarray(payload.gt if payload.gt is not None else [], dtype=np.int64)
    return GraphPair(
        reference=graph_from_payload(payload.reference),
        query=graph_from_payload(payload.query),
        gt=gt,
        seed=payload.seed or 0,
    )


def run(args: argparse.Namespace) -> int:
    spec = build_experiment(args, "match")
    pair = load_pair(args.pair, args.index)
    matcher = build_matcher(spec.checkpoint, spec.solver, spec.affinity)
    if isinstance(matcher, ModelMatcher) and pair.reference.dim != matcher.model.config.dim:
        raise InputError(f"model expects d={matcher.model.config.dim}, pair has d={pair.reference.dim}")

    Q, R = matcher.scores(pair, seed=spec.gen.seed)
    result = MatchResult.from_scores(
        Q,
        R,
        gt=pair.gt if pair.gt.size else None,
        n_real_rows=pair.reference.n,
        n_real_cols=pair.query.n,
        score_source=args.score_source,
    )
    emit_json({"matcher": matcher.describe(), **result.to_dict()}, args.output)
    return 0
