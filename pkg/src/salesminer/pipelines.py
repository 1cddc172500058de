"""End-to-end pipelines producing canonical result documents.

The CLI and the task service both run these functions and serialize with
:func:`canonical_json_bytes`, so for identical inputs, configuration and
seed the persisted documents are byte-identical no matter which surface
produced them. Documents carry no wall-clock data for the same reason.
"""

from __future__ import annotations

import json
from typing import Any, Optional, Sequence

import numpy as np

from .clustering import Cluster, ClusterMember, SalesResponse, build_clusters, with_keywords
from .config import EngineConfig
from .faq import extract_faq
from .ingest import Chatlog, iter_utterances
from .phrases import cluster_keywords
from .scoring import Scorer, make_scorer
from .sop import IntentModel, SopRule, aggregate, evaluate_rules

FAQ_EXTRACTION = "faq_extraction"
OBJECTION_MINING = "objection_mining"
DASHBOARD = "dashboard"
TASK_KINDS = (FAQ_EXTRACTION, OBJECTION_MINING, DASHBOARD)


def canonical_json_bytes(doc: Any) -> bytes:
    """The one serializer used for every persisted document."""
    return (json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n").encode(
        "utf-8"
    )


def run_faq_extraction(
    chatlog: Chatlog, config: EngineConfig, scorer: Optional[Scorer] = None
) -> dict:
    scorer = scorer or make_scorer(config.scorer)
    pairs = extract_faq(chatlog, scorer, window=config.faq_window)
    return {
        "kind": FAQ_EXTRACTION,
        "parameters": {
            "window": config.faq_window,
            "answer_threshold": config.scorer.answer_threshold,
            "per_label_threshold": config.scorer.per_label_threshold,
            "embedding_dim": config.scorer.embedding_dim,
            "backend": config.scorer.backend,
        },
        "pairs": [p.to_doc() for p in pairs],
    }


def mine_objection_clusters(
    chatlog: Chatlog, config: EngineConfig, scorer: Optional[Scorer] = None
) -> list[Cluster]:
    """Cluster customer messages and fill per-cluster keywords."""
    scorer = scorer or make_scorer(config.scorer)
    customer_utterances = list(iter_utterances(chatlog))
    clusters = build_clusters(
        customer_utterances,
        chatlog.dialogs,
        scorer,
        config=config.clustering,
        seed=config.seed,
    )
    # Keywords contrast each cluster against all clustered customer text.
    all_texts = [m.text for cluster in clusters for m in cluster.members]
    return [
        with_keywords(
            cluster,
            cluster_keywords(
                [m.text for m in cluster.members], all_texts, config.mining
            ),
        )
        for cluster in clusters
    ]


def run_objection_mining(
    chatlog: Chatlog, config: EngineConfig, scorer: Optional[Scorer] = None
) -> dict:
    clusters = mine_objection_clusters(chatlog, config, scorer)
    return {
        "kind": OBJECTION_MINING,
        "parameters": {
            "seed": config.seed,
            "k": config.clustering.k_override,
            "relevance_threshold": config.clustering.relevance_threshold,
            "embedding_dim": config.scorer.embedding_dim,
            "backend": config.scorer.backend,
            "min_support": config.mining.min_support,
            "significance_threshold": config.mining.significance_threshold,
            "max_phrase_len": config.mining.max_phrase_len,
            "max_keywords": config.mining.max_keywords,
        },
        "clusters": [
            {
                "cluster_id": c.cluster_id,
                "anchor_text": c.anchor_text,
                "frequency": c.frequency,
                "mean_relevance": c.mean_relevance,
                "keywords": list(c.keywords),
                "members": [
                    {
                        "dialog_id": m.dialog_id,
                        "turn_index": m.turn_index,
                        "text": m.text,
                        "anchor_relevance": m.anchor_relevance,
                        "responses": [
                            {
                                "dialog_id": r.dialog_id,
                                "turn_index": r.turn_index,
                                "text": r.text,
                            }
                            for r in m.responses
                        ],
                    }
                    for m in c.members
                ],
            }
            for c in clusters
        ],
    }


def clusters_from_doc(doc: dict, scorer: Scorer) -> list[Cluster]:
    """Rebuild cluster objects from a persisted objection-mining document.

    Member vectors are re-embedded from text (embeddings are a pure function
    of text). Centroids are not persisted and are not needed to rebuild the
    search index, so they come back as zero vectors.
    """
    dim = scorer.config.embedding_dim
    clusters = []
    for cdoc in doc.get("clusters", []):
        members = tuple(
            ClusterMember(
                dialog_id=mdoc["dialog_id"],
                turn_index=mdoc["turn_index"],
                text=mdoc["text"],
                vector=scorer.embed(mdoc["text"]),
                anchor_relevance=mdoc["anchor_relevance"],
                responses=tuple(
                    SalesResponse(
                        dialog_id=rdoc["dialog_id"],
                        turn_index=rdoc["turn_index"],
                        text=rdoc["text"],
                    )
                    for rdoc in mdoc["responses"]
                ),
            )
            for mdoc in cdoc["members"]
        )
        clusters.append(
            Cluster(
                cluster_id=cdoc["cluster_id"],
                centroid=np.zeros(dim, dtype=np.float64),
                anchor_text=cdoc["anchor_text"],
                members=members,
                frequency=cdoc["frequency"],
                mean_relevance=cdoc["mean_relevance"],
                keywords=tuple(cdoc.get("keywords", ())),
            )
        )
    return clusters


def run_dashboard(
    chatlog: Chatlog,
    rules: Sequence[SopRule],
    model: IntentModel,
    config: EngineConfig,
) -> dict:
    executions = evaluate_rules(chatlog.dialogs, rules, model)
    views = {
        view: [row.to_doc() for row in aggregate(executions, view).rows]
        for view in ("trigger", "team", "staff")
    }
    return {
        "kind": DASHBOARD,
        "parameters": {
            "rules": [r.rule_id for r in rules],
            "intent_backend": model.backend,
        },
        "executions": [record.to_doc() for record in executions],
        "views": views,
    }
