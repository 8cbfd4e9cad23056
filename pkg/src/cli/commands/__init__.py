"""
CLI Commands Package
"""

from . import ablate, diagnose, evaluate, generate, match, sample_sweep, sweep, train

__all__ = ["ablate", "diagnose", "evaluate", "generate", "match", "sample_sweep", "sweep", "train"]
