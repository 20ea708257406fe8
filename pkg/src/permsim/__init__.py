"""Decompose random permutations into few order-isomorphic subpermutations."""

from .core import (Decomposition, Part, Pattern, Permutation, Verdict, is_order_isomorphic,
                   pattern_of, verify_decomposition)
from .pipeline import PipelineConfig, RunRecord, baseline_decompose, decompose, pipeline_stats

__all__ = [
    "Decomposition", "Part", "Pattern", "Permutation", "Verdict", "is_order_isomorphic",
    "pattern_of", "verify_decomposition", "PipelineConfig", "RunRecord", "baseline_decompose",
    "decompose", "pipeline_stats",
]
