"""Response search: index layout, exact ranking, tie-breaks, edge cases."""

from __future__ import annotations

import numpy as np
import pytest

from salesminer.clustering import Cluster, ClusterMember, SalesResponse
from salesminer.errors import EmptyQuery
from salesminer.search import build_index, search

from oracles import o_rank


def _member(text: str, responses: list[str], dialog_id: str = "d1") -> ClusterMember:
    return ClusterMember(
        dialog_id=dialog_id,
        turn_index=0,
        text=text,
        vector=np.zeros(256),  # build_index re-embeds; this is never read
        anchor_relevance=1.0,
        responses=tuple(
            SalesResponse(dialog_id=dialog_id, turn_index=i + 1, text=r)
            for i, r in enumerate(responses)
        ),
    )


def _cluster(cluster_id: int, members: list[ClusterMember]) -> Cluster:
    return Cluster(
        cluster_id=cluster_id,
        centroid=np.zeros(256),
        anchor_text=members[0].text,
        members=tuple(members),
        frequency=len(members),
        mean_relevance=1.0,
    )


@pytest.fixture()
def small_index(scorer):
    clusters = [
        _cluster(
            0,
            [
                _member(
                    "the price is too high",
                    ["we can offer a discount", "there is a free tier as well"],
                ),
                _member("your pricing seems expensive", ["annual billing is cheaper"]),
            ],
        ),
        _cluster(
            1,
            [_member("when will my order arrive", ["orders ship in two days"])],
        ),
    ]
    return build_index(clusters, scorer)


def test_build_index_one_entry_per_member_response_pair(small_index, scorer):
    assert len(small_index) == 4
    assert [e.entry_id for e in small_index.entries] == [0, 1, 2, 3]
    assert [e.response_text for e in small_index.entries] == [
        "we can offer a discount",
        "there is a free tier as well",
        "annual billing is cheaper",
        "orders ship in two days",
    ]
    assert [e.cluster_id for e in small_index.entries] == [0, 0, 0, 1]
    # Both responses of the first member share that member's query vector.
    vec = scorer.embed("the price is too high")
    assert np.array_equal(small_index.entries[0].vector, vec)
    assert np.array_equal(small_index.entries[1].vector, vec)
    assert small_index.matrix.shape == (4, scorer.config.embedding_dim)
    for i, entry in enumerate(small_index.entries):
        assert np.array_equal(small_index.matrix[i], entry.vector)


def test_search_matches_oracle_ranking(small_index, scorer):
    query = "price too high for my budget"
    hits = search(small_index, query, top_k=4, scorer=scorer)
    scores = (small_index.matrix @ scorer.embed(query)).tolist()
    expected = o_rank(scores, 4)
    assert [h.entry.entry_id for h in hits] == expected
    for hit, idx in zip(hits, expected):
        assert hit.score == pytest.approx(scores[idx], abs=1e-12)


def test_search_scores_are_descending_and_topk_truncates(small_index, scorer):
    hits = search(small_index, "how much does it cost", top_k=2, scorer=scorer)
    assert len(hits) == 2
    assert hits[0].score >= hits[1].score


def test_search_ties_break_by_entry_id(scorer):
    # Two members with the identical text produce identical vectors, so the
    # query scores tie exactly and ids must come back ascending.
    clusters = [
        _cluster(
            0,
            [
                _member("can i export my data", ["yes, csv and json"]),
                _member("can i export my data", ["use the export button"]),
            ],
        )
    ]
    index = build_index(clusters, scorer)
    hits = search(index, "can i export my data", top_k=2, scorer=scorer)
    assert [h.entry.entry_id for h in hits] == [0, 1]
    assert hits[0].score == hits[1].score


def test_search_k_larger_than_index_returns_all(small_index, scorer):
    hits = search(small_index, "pricing", top_k=50, scorer=scorer)
    assert len(hits) == 4


def test_search_rejects_bad_top_k(small_index, scorer):
    with pytest.raises(ValueError):
        search(small_index, "pricing", top_k=0, scorer=scorer)


@pytest.mark.parametrize("query", ["", "   ", "?!,."])
def test_search_rejects_empty_query(small_index, scorer, query):
    with pytest.raises(EmptyQuery):
        search(small_index, query, top_k=3, scorer=scorer)


def test_search_empty_index_returns_no_hits(scorer):
    index = build_index([], scorer)
    assert len(index) == 0
    assert search(index, "anything at all", top_k=5, scorer=scorer) == []


def test_hit_to_doc_shape(small_index, scorer):
    hit = search(small_index, "price is too high", top_k=1, scorer=scorer)[0]
    doc = hit.to_doc()
    assert set(doc) == {
        "entry_id",
        "response_text",
        "customer_query_text",
        "cluster_id",
        "score",
    }
    assert doc["entry_id"] == hit.entry.entry_id
    assert doc["score"] == hit.score


def test_search_exhaustive_against_oracle_on_larger_corpus(scorer):
    # Random-ish but reproducible member texts; ranking must agree with the
    # brute-force oracle for every query.
    words = [
        "price", "cost", "order", "arrive", "refund", "export", "api",
        "support", "contract", "upgrade", "invoice", "cancel",
    ]
    rng = np.random.default_rng(123)
    members = []
    for i in range(60):
        picks = rng.choice(words, size=4, replace=True)
        members.append(_member(" ".join(picks), [f"canned answer {i}"]))
    index = build_index([_cluster(0, members)], scorer)
    for query in ("refund my invoice", "cancel the contract", "api support"):
        hits = search(index, query, top_k=10, scorer=scorer)
        scores = (index.matrix @ scorer.embed(query)).tolist()
        assert [h.entry.entry_id for h in hits] == o_rank(scores, 10)
