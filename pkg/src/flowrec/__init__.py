"""Real-time API method recommendation for Python editing sessions.

Given source text and the position of a trailing dot, the library extracts
optimistic data-flow and token context around the point, generates
candidate method names, scores each with four features (flow language
model, sub-token similarity, object and context co-occurrence), and ranks
them with a random forest trained on mined usage points.
"""

from .errors import (
    CorruptBundle,
    DegenerateData,
    EmptyCandidates,
    EmptyCorpus,
    EmptyFlow,
    FlowrecError,
    ParseError,
    VersionMismatch,
)
from .frontend import (
    AstUnit,
    RecommendationPoint,
    SourceContext,
    locate_point,
    parse_context,
    parse_source,
    split_identifier,
)
from .dataflow import analyze_context, hole_paths, score_edge_sets
from .candidates import Candidate, LiteralTypeInference, collect_candidates
from .features import (
    CooccurrenceModel,
    FeatureExtractor,
    NgramModel,
    token_similarity,
)
from .forest import RandomForest
from .corpus import (
    ModelBundle,
    TrainConfig,
    load_bundle,
    mine_file,
    save_bundle,
    train_corpus,
)
from .recommender import Recommendation, RecommendationResult, Recommender
from .evaluation import (
    cross_validate,
    evaluate_recommender,
    mean_reciprocal_rank,
    topk_accuracy,
)

__version__ = "0.1.0"

__all__ = [
    "AstUnit",
    "Candidate",
    "CooccurrenceModel",
    "CorruptBundle",
    "DegenerateData",
    "EmptyCandidates",
    "EmptyCorpus",
    "EmptyFlow",
    "FeatureExtractor",
    "FlowrecError",
    "LiteralTypeInference",
    "ModelBundle",
    "NgramModel",
    "ParseError",
    "RandomForest",
    "Recommendation",
    "RecommendationResult",
    "Recommender",
    "RecommendationPoint",
    "SourceContext",
    "TrainConfig",
    "VersionMismatch",
    "analyze_context",
    "collect_candidates",
    "cross_validate",
    "evaluate_recommender",
    "hole_paths",
    "load_bundle",
    "locate_point",
    "mean_reciprocal_rank",
    "mine_file",
    "parse_context",
    "parse_source",
    "save_bundle",
    "score_edge_sets",
    "split_identifier",
    "token_similarity",
    "topk_accuracy",
    "train_corpus",
]
