"""Streaming k-edit approximate pattern matching over locally consistent grammar blocks."""

from .bk_decompose import BlockSeq, DecompParams, RollingDecomposer, decompose_batch
from .edit_engine import OVER_K, FallbackState, ed_bounded, ed_suffix_min
from .grammar_core import Grammar, Rule, evaluate, eval_size, suffix_grammar
from .grammar_encode import EncParams, decode, encode
from .oracle import oracle_all_positions
from .stream_matcher import INF, Ensemble, MatchConfig, MatcherCopy, run_match

__all__ = [
    "BlockSeq", "DecompParams", "RollingDecomposer", "decompose_batch",
    "OVER_K", "FallbackState", "ed_bounded", "ed_suffix_min",
    "Grammar", "Rule", "evaluate", "eval_size", "suffix_grammar",
    "EncParams", "decode", "encode", "oracle_all_positions",
    "INF", "Ensemble", "MatchConfig", "MatcherCopy", "run_match",
]
__version__ = "0.1.0"
