# Types Module
"""직렬화 스키마 모듈"""

from .graph import GraphPayload, PairPayload, graph_from_payload, graph_to_payload
from .experiment import ExperimentFile, load_experiment

__all__ = [
    "GraphPayload",
    "PairPayload",
    "graph_from_payload",
    "graph_to_payload",
    "ExperimentFile",
    "load_experiment",
]
