# Graph Module
"""합성 기하 그래프 생성/변환"""

from .types import Graph, adjacency, canonical_edges
from .knn import knn_edges, pairwise_sq_distances
from .generator import (
    GraphPair,
    PairStream,
    derive_seed,
    generate_reference,
    make_pair,
    make_rng,
    normalize_points,
    pad_graph,
    perturb,
    rotate,
)

__all__ = [
    "Graph",
    "GraphPair",
    "PairStream",
    "adjacency",
    "canonical_edges",
    "derive_seed",
    "generate_reference",
    "knn_edges",
    "make_pair",
    "make_rng",
    "normalize_points",
    "pad_graph",
    "pairwise_sq_distances",
    "perturb",
    "rotate",
]
