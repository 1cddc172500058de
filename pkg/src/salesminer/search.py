"""Exact semantic search over mined sales responses.

One index entry per (cluster member, sales response) pair, keyed by the
embedding of the member's customer text. Search is a full scan: exact
top-k by cosine similarity with ties broken by entry id. No approximation;
any future acceleration must reproduce this ranking bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .clustering import Cluster
from .errors import EmptyQuery
from .scoring import Scorer
from .textnorm import normalize_for_match


@dataclass(frozen=True, slots=True)
class IndexEntry:
    entry_id: int
    response_text: str
    customer_query_text: str
    cluster_id: int
    vector: np.ndarray


@dataclass(frozen=True, slots=True)
class SearchHit:
    entry: IndexEntry
    score: float

    def to_doc(self) -> dict:
        return {
            "entry_id": self.entry.entry_id,
            "response_text": self.entry.response_text,
            "customer_query_text": self.entry.customer_query_text,
            "cluster_id": self.entry.cluster_id,
            "score": self.score,
        }


@dataclass(frozen=True, slots=True)
class SearchIndex:
    entries: tuple[IndexEntry, ...]
    matrix: np.ndarray  # (n_entries, dim); row i is entries[i].vector

    def __len__(self) -> int:
        return len(self.entries)


def build_index(clusters: Sequence[Cluster], scorer: Scorer) -> SearchIndex:
    """One entry per (member, response) pair, ids dense from 0."""
    entries: list[IndexEntry] = []
    vectors: list[np.ndarray] = []
    for cluster in clusters:
        for member in cluster.members:
            query_vec = scorer.embed(member.text)
            for response in member.responses:
                entries.append(
                    IndexEntry(
                        entry_id=len(entries),
                        response_text=response.text,
                        customer_query_text=member.text,
                        cluster_id=cluster.cluster_id,
                        vector=query_vec,
                    )
                )
                vectors.append(query_vec)
    dim = scorer.config.embedding_dim
    matrix = np.stack(vectors) if vectors else np.zeros((0, dim), dtype=np.float64)
    return SearchIndex(entries=tuple(entries), matrix=matrix)


def search(
    index: SearchIndex, query: str, top_k: int, scorer: Scorer
) -> list[SearchHit]:
    """Exact top-k by cosine against every entry; deterministic tie-break."""
    if top_k < 1:
        raise ValueError(f"top_k must be >= 1, got {top_k}")
    if not normalize_for_match(query):
        raise EmptyQuery("search query is empty after normalization")
    if not index.entries:
        return []
    query_vec = scorer.embed(query)
    scores = index.matrix @ query_vec
    # lexsort's last key dominates: sort by -score, ties by ascending id.
    order = np.lexsort((np.arange(len(scores)), -scores))[:top_k]
    return [SearchHit(entry=index.entries[int(i)], score=float(scores[int(i)])) for i in order]
