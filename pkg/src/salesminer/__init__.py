"""Sales-conversation mining: FAQ extraction, objection clustering with
keyword summaries, exact semantic search over mined responses, and SOP
compliance dashboards, behind a CLI and an HTTP task service."""

from .clustering import (
    Cluster,
    ClusterMember,
    ClusteringConfig,
    KMeansResult,
    SalesResponse,
    build_clusters,
    choose_k,
    kmeans,
)
from .config import EngineConfig, ServiceConfig, load_config
from .errors import (
    BadK,
    ConfigError,
    DimensionMismatch,
    EmptyQuery,
    IngestError,
    RemoteUnavailable,
    RuleConfigError,
    SalesMinerError,
)
from .faq import QAPair, extract_faq
from .ingest import Chatlog, Dialog, Speaker, Utterance, parse_chatlog
from .phrases import MiningConfig, Phrase, cluster_keywords, mine_frequent_phrases, segment
from .pipelines import (
    canonical_json_bytes,
    run_dashboard,
    run_faq_extraction,
    run_objection_mining,
)
from .scoring import (
    BaselineScorer,
    LabelScores,
    RemoteScorer,
    Scorer,
    ScorerConfig,
    make_scorer,
)
from .search import SearchHit, SearchIndex, build_index, search
from .sop import IntentModel, SopRule, aggregate, evaluate_rules, load_rules

__version__ = "1.0.0"

__all__ = [
    "BadK",
    "BaselineScorer",
    "Chatlog",
    "Cluster",
    "ClusterMember",
    "ClusteringConfig",
    "ConfigError",
    "Dialog",
    "DimensionMismatch",
    "EmptyQuery",
    "EngineConfig",
    "IngestError",
    "IntentModel",
    "KMeansResult",
    "LabelScores",
    "MiningConfig",
    "Phrase",
    "QAPair",
    "RemoteScorer",
    "RemoteUnavailable",
    "RuleConfigError",
    "SalesMinerError",
    "SalesResponse",
    "Scorer",
    "ScorerConfig",
    "SearchHit",
    "SearchIndex",
    "ServiceConfig",
    "SopRule",
    "Speaker",
    "Utterance",
    "aggregate",
    "build_clusters",
    "build_index",
    "canonical_json_bytes",
    "choose_k",
    "cluster_keywords",
    "evaluate_rules",
    "extract_faq",
    "kmeans",
    "load_config",
    "load_rules",
    "make_scorer",
    "mine_frequent_phrases",
    "parse_chatlog",
    "run_dashboard",
    "run_faq_extraction",
    "run_objection_mining",
    "search",
    "segment",
    "__version__",
]
