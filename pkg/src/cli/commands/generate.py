"""
generate: 합성 (reference, query, gt) 쌍을 JSON 으로 출력
"""

import argparse
from dataclasses import asdict

from core.graph.generator import PairStream
from dtypes.graph import PairPayload, graph_to_payload

from ..deps import add_common_args, add_gen_args, build_experiment, emit_json


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "generate",
        help="generate synthetic graph pairs",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    add_common_args(parser)
    add_gen_args(parser)
    parser.add_argument("--count", type=int, default=1, help="number of pairs")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    spec = build_experiment(args, "train")
    pairs = PairStream(spec.gen, base_seed=spec.gen.seed).take(args.count)
    payload = {
        "gen": asdict(spec.gen),
        "pairs": [
            PairPayload(
                reference=graph_to_payload(p.reference),
                query=graph_to_payload(p.query),
                gt=p.gt.tolist(),
                seed=p.seed,
            ).model_dump()
            for p in pairs
        ],
    }
    emit_json(payload, args.output)
    return 0
