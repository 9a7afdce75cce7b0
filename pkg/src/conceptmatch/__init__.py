"""Pattern-based matching of concepts across HOL theorem-prover libraries."""

from .corpusgen import GenConfig, generate_twins
from .ingest import BasisMap, Library, parse_library, prepare_library, serialize_library
from .matcher import MatchConfig, MatchState, evaluate_against_truth, run_match
from .normalize import NormConfig, normalize, normalize_text
from .pattern import PatternIndex, build_index, property_report
from .scoring import ScoreConfig, rank_pairs, score_pair

__version__ = "0.1.0"

__all__ = [
    "BasisMap", "GenConfig", "Library", "MatchConfig", "MatchState", "NormConfig",
    "PatternIndex", "ScoreConfig", "build_index", "evaluate_against_truth",
    "generate_twins", "normalize", "normalize_text", "parse_library", "prepare_library",
    "property_report", "rank_pairs", "run_match", "score_pair", "serialize_library",
]
