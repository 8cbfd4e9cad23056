# Ensemble Module
"""EQAN forward: initialization module, ensemble block, decision layer"""

from .init_module import InitModule, PairInput, association_features
from .sampling import (
    MaskSTE,
    SampleMask,
    blend_log,
    sample_count,
    sample_mask,
    sampled_step,
    ste_backward,
)
from .block import BlockOutput, EnsembleBlock
from .model import EnsembleQAPNet, ForwardResult, match_pair
from .naive import NaiveEnsemble

__all__ = [
    "BlockOutput",
    "EnsembleBlock",
    "EnsembleQAPNet",
    "ForwardResult",
    "InitModule",
    "MaskSTE",
    "NaiveEnsemble",
    "PairInput",
    "SampleMask",
    "association_features",
    "blend_log",
    "match_pair",
    "sample_count",
    "sample_mask",
    "sampled_step",
    "ste_backward",
]
