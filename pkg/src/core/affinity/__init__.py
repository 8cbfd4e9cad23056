# Affinity Module
"""association graph 위의 sparse affinity 행렬"""

from .matrix import AffinityMatrix, AssociationTopology, affinity_matvec, dump_triplets
from .builder import build_affinity, koopman_beckmann, update_affinity

__all__ = [
    "AffinityMatrix",
    "AssociationTopology",
    "affinity_matvec",
    "build_affinity",
    "dump_triplets",
    "koopman_beckmann",
    "update_affinity",
]
