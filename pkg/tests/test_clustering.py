"""Clustering: seeded RNG, k heuristic, Lloyd iterations, cluster assembly."""

from __future__ import annotations

import numpy as np
import pytest

from salesminer.clustering import (
    ClusteringConfig,
    SplitMix64,
    build_clusters,
    choose_k,
    filter_trivial,
    kmeans,
    kmeans_pp_init,
    with_keywords,
)
from salesminer.errors import BadK
from salesminer.ingest import Dialog, Speaker, Utterance

from oracles import o_lloyd


def _unit_vectors(n: int, dim: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n, dim))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return [pts[i] for i in range(n)]


# --- SplitMix64 -------------------------------------------------------------


def _reference_splitmix64(seed: int, count: int) -> list[int]:
    """Straight transcription of the published algorithm, kept independent."""
    mask = (1 << 64) - 1
    state = seed & mask
    out = []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & mask
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        out.append(z ^ (z >> 31))
    return out


def test_splitmix64_known_streams():
    # First outputs for seed 0 and seed 1234567 as published for the
    # reference implementation.
    rng = SplitMix64(0)
    assert [rng.next_u64() for _ in range(2)] == [
        0xE220A8397B1DCDAF,
        0x6E789E6AA1B965F4,
    ]
    rng = SplitMix64(1234567)
    assert rng.next_u64() == 6457827717110365317


@pytest.mark.parametrize("seed", [0, 1, 42, 2**63, 2**64 - 1])
def test_splitmix64_matches_independent_transcription(seed):
    rng = SplitMix64(seed)
    assert [rng.next_u64() for _ in range(50)] == _reference_splitmix64(seed, 50)


def test_splitmix64_next_float_in_unit_interval():
    rng = SplitMix64(99)
    values = [rng.next_float() for _ in range(1000)]
    assert all(0.0 <= v < 1.0 for v in values)
    # Same seed replays the identical stream.
    rng2 = SplitMix64(99)
    assert values == [rng2.next_float() for _ in range(1000)]


# --- choose_k ---------------------------------------------------------------


@pytest.mark.parametrize(
    ("n", "expected"),
    [(1, 1), (2, 2), (3, 2), (9, 2), (50, 5), (800, 20), (50000, 50)],
)
def test_choose_k_heuristic(n, expected):
    assert choose_k(n) == expected


def test_choose_k_override_clamped_to_n():
    assert choose_k(5, override=3) == 3
    assert choose_k(5, override=10) == 5
    assert choose_k(5, override=1) == 1


# --- kmeans -----------------------------------------------------------------


def test_kmeans_rejects_bad_k():
    vecs = _unit_vectors(10, 8, seed=0)
    with pytest.raises(BadK):
        kmeans(vecs, 0, seed=0)
    with pytest.raises(BadK):
        kmeans(vecs, 11, seed=0)


def test_kmeans_same_seed_bit_identical():
    vecs = _unit_vectors(200, 16, seed=7)
    a = kmeans(vecs, 8, seed=123)
    b = kmeans(vecs, 8, seed=123)
    assert np.array_equal(a.assignments, b.assignments)
    assert np.array_equal(a.centroids, b.centroids)  # bitwise: same floats
    assert a.inertia == b.inertia
    assert a.inertia_history == b.inertia_history


def test_kmeans_different_seeds_may_differ_but_stay_valid():
    vecs = _unit_vectors(60, 8, seed=3)
    for seed in (0, 1, 2):
        result = kmeans(vecs, 4, seed=seed)
        assert result.assignments.shape == (60,)
        assert set(np.unique(result.assignments)) <= set(range(4))


def test_kmeans_inertia_history_non_increasing():
    vecs = _unit_vectors(300, 12, seed=11)
    result = kmeans(vecs, 6, seed=5)
    history = result.inertia_history
    assert len(history) >= 1
    for prev, cur in zip(history, history[1:]):
        assert cur <= prev + 1e-12
    assert result.inertia == history[-1]


def test_kmeans_final_assignment_is_nearest_centroid():
    vecs = _unit_vectors(250, 10, seed=13)
    result = kmeans(vecs, 7, seed=2)
    matrix = np.stack(vecs)
    # Squared distances to every centroid; ties go to the lowest index,
    # which is exactly what argmin does.
    d2 = ((matrix[:, None, :] - result.centroids[None, :, :]) ** 2).sum(axis=2)
    assert np.array_equal(result.assignments, d2.argmin(axis=1))


def test_kmeans_matches_reference_lloyd_given_same_init():
    vecs = _unit_vectors(150, 8, seed=21)
    points = np.stack(vecs)
    k = 6
    init = kmeans_pp_init(points, k, SplitMix64(77))
    result = kmeans(vecs, k, seed=0, initial_centroids=init)
    ref_assign, ref_centers, ref_inertia, _ = o_lloyd(
        points.tolist(), init.tolist()
    )
    assert result.inertia == pytest.approx(ref_inertia, abs=1e-9)
    assert np.array_equal(result.assignments, np.array(ref_assign))
    assert np.allclose(result.centroids, np.array(ref_centers), atol=1e-9)


def test_kmeans_empty_cluster_reseeded_with_farthest_point():
    # Both initial centroids sit far away on the same side, so after the
    # first assignment one of them owns nothing and must be reseeded.
    pts = [np.array([0.0, 0.0])] * 5 + [np.array([10.0, 10.0])] * 5
    init = np.array([[100.0, 100.0], [200.0, 200.0]])
    result = kmeans(pts, 2, seed=0, initial_centroids=init)
    counts = np.bincount(result.assignments, minlength=2)
    assert counts.min() >= 1
    assert result.inertia == pytest.approx(0.0, abs=1e-12)


def test_kmeans_k_equals_n_gives_zero_inertia():
    vecs = _unit_vectors(6, 5, seed=9)
    result = kmeans(vecs, 6, seed=4)
    assert sorted(result.assignments.tolist()) == list(range(6))
    assert result.inertia == pytest.approx(0.0, abs=1e-12)


def test_kmeans_pp_init_deterministic_and_distinct_rows():
    points = np.stack(_unit_vectors(40, 6, seed=17))
    a = kmeans_pp_init(points, 5, SplitMix64(31))
    b = kmeans_pp_init(points, 5, SplitMix64(31))
    assert np.array_equal(a, b)
    # Chosen centers are actual input points, all different.
    seen = {tuple(row) for row in a.tolist()}
    assert len(seen) == 5
    pool = {tuple(row) for row in points.tolist()}
    assert seen <= pool


# --- filter_trivial ---------------------------------------------------------


def _utt(i: int, speaker: Speaker, text: str, dialog_id: str = "d1") -> Utterance:
    return Utterance(dialog_id=dialog_id, turn_index=i, speaker=speaker, text=text)


def test_filter_trivial_drops_sales_short_and_chitchat(scorer):
    utts = [
        _utt(0, Speaker.CUSTOMER, "the price is too high"),
        _utt(1, Speaker.SALES, "we can offer a discount"),
        _utt(2, Speaker.CUSTOMER, "ok"),
        _utt(3, Speaker.CUSTOMER, "thank you"),
        _utt(4, Speaker.CUSTOMER, "does the api support webhooks"),
    ]
    kept = filter_trivial(utts, scorer)
    assert [u.turn_index for u in kept] == [0, 4]


def test_filter_trivial_min_tokens_override(scorer):
    utts = [
        _utt(0, Speaker.CUSTOMER, "pricing question"),
        _utt(1, Speaker.CUSTOMER, "need more details about pricing"),
    ]
    assert [u.turn_index for u in filter_trivial(utts, scorer, min_tokens=3)] == [1]


# --- build_clusters ---------------------------------------------------------


def _dialog(dialog_id: str, rows: list[tuple[Speaker, str]]) -> Dialog:
    utts = tuple(
        Utterance(dialog_id=dialog_id, turn_index=i, speaker=spk, text=text)
        for i, (spk, text) in enumerate(rows)
    )
    return Dialog(dialog_id=dialog_id, utterances=utts)


def _corpus() -> tuple[list[Utterance], list[Dialog]]:
    dialogs = [
        _dialog(
            "d1",
            [
                (Speaker.CUSTOMER, "the price is way too high for us"),
                (Speaker.SALES, "we can apply a volume discount"),
                (Speaker.SALES, "and the first month is free"),
                (Speaker.CUSTOMER, "when will my order arrive"),
                (Speaker.SALES, "orders ship within two business days"),
            ],
        ),
        _dialog(
            "d2",
            [
                (Speaker.CUSTOMER, "your price is really too high"),
                (Speaker.SALES, "let me put together a custom quote"),
                (Speaker.CUSTOMER, "when does my order arrive exactly"),
                (Speaker.SALES, "delivery takes two days on average"),
            ],
        ),
    ]
    customers = [
        u
        for d in dialogs
        for u in d.utterances
        if u.speaker is Speaker.CUSTOMER
    ]
    return customers, dialogs


def test_build_clusters_invariants(scorer):
    customers, dialogs = _corpus()
    # Threshold 0 keeps every assigned member, so frequencies add up to the
    # number of inputs and the structural checks are exact.
    config = ClusteringConfig(k_override=2, relevance_threshold=0.0)
    clusters = build_clusters(customers, dialogs, scorer, config, seed=0)
    assert clusters
    assert sum(c.frequency for c in clusters) == len(customers)
    for cluster in clusters:
        assert cluster.frequency == len(cluster.members)
        member_texts = [m.text for m in cluster.members]
        assert cluster.anchor_text in member_texts
        rels = [m.anchor_relevance for m in cluster.members]
        assert cluster.mean_relevance == pytest.approx(np.mean(rels))
        anchor = next(m for m in cluster.members if m.text == cluster.anchor_text)
        assert anchor.anchor_relevance == pytest.approx(1.0)
    keys = [(-c.frequency, -c.mean_relevance, c.cluster_id) for c in clusters]
    assert keys == sorted(keys)


def test_build_clusters_responses_are_consecutive_sales_turns(scorer):
    customers, dialogs = _corpus()
    clusters = build_clusters(
        customers,
        dialogs,
        scorer,
        ClusteringConfig(k_override=2, relevance_threshold=0.0),
        seed=0,
    )
    by_member = {
        (m.dialog_id, m.turn_index): m for c in clusters for m in c.members
    }
    d1_price = by_member[("d1", 0)]
    assert [r.text for r in d1_price.responses] == [
        "we can apply a volume discount",
        "and the first month is free",
    ]
    d1_order = by_member[("d1", 3)]
    assert [r.text for r in d1_order.responses] == [
        "orders ship within two business days"
    ]
    d2_price = by_member[("d2", 0)]
    assert [r.text for r in d2_price.responses] == [
        "let me put together a custom quote"
    ]


def test_build_clusters_relevance_filter_keeps_anchor(scorer):
    customers, dialogs = _corpus()
    config = ClusteringConfig(k_override=2, relevance_threshold=1.1)
    clusters = build_clusters(customers, dialogs, scorer, config, seed=0)
    # Nothing can reach relevance 1.1, so only the anchors survive.
    for cluster in clusters:
        assert cluster.frequency == 1
        assert cluster.members[0].text == cluster.anchor_text


def test_build_clusters_deterministic_across_runs(scorer):
    customers, dialogs = _corpus()
    config = ClusteringConfig(k_override=2)
    a = build_clusters(customers, dialogs, scorer, config, seed=42)
    b = build_clusters(customers, dialogs, scorer, config, seed=42)
    assert [(c.cluster_id, c.anchor_text, c.frequency) for c in a] == [
        (c.cluster_id, c.anchor_text, c.frequency) for c in b
    ]
    for ca, cb in zip(a, b):
        assert [m.text for m in ca.members] == [m.text for m in cb.members]
        assert np.array_equal(ca.centroid, cb.centroid)


def test_build_clusters_empty_input(scorer):
    assert build_clusters([], [], scorer) == []


def test_with_keywords_replaces_only_keywords(scorer):
    customers, dialogs = _corpus()
    clusters = build_clusters(
        customers, dialogs, scorer, ClusteringConfig(k_override=2), seed=0
    )
    updated = with_keywords(clusters[0], ["price too high"])
    assert updated.keywords == ("price too high",)
    assert updated.anchor_text == clusters[0].anchor_text
    assert updated.members == clusters[0].members
