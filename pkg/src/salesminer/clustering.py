"""Assemble similar customer messages into ordered clusters with anchors.

K-means over baseline embeddings: k-means++ initialization driven by a
splitmix64 PRNG, Lloyd iterations until the largest centroid shift falls
below 1e-6 (or 100 iterations), empty clusters re-seeded with the point
farthest from its centroid. Clusters carry a real member utterance as
anchor, members low in relevance to the anchor are dropped, and each
member's immediate sales responses are attached.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import BadK, DimensionMismatch
from .ingest import Dialog, Speaker, Utterance
from .phrases import tokenize
from .scoring import Scorer

MAX_ITERATIONS = 100
SHIFT_TOLERANCE = 1e-6
_MASK64 = 0xFFFFFFFFFFFFFFFF


class SplitMix64:
    """Tiny deterministic PRNG; identical streams on every platform."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        # 53 top bits -> uniform double in [0, 1).
        return (self.next_u64() >> 11) * (2.0**-53)


@dataclass(frozen=True, slots=True)
class SalesResponse:
    dialog_id: str
    turn_index: int
    text: str


@dataclass(frozen=True, slots=True)
class ClusterMember:
    dialog_id: str
    turn_index: int
    text: str
    vector: np.ndarray
    anchor_relevance: float
    responses: tuple[SalesResponse, ...]


@dataclass(frozen=True, slots=True)
class Cluster:
    cluster_id: int
    centroid: np.ndarray
    anchor_text: str
    members: tuple[ClusterMember, ...]
    frequency: int
    mean_relevance: float
    keywords: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class ClusteringConfig:
    k_override: Optional[int] = None
    relevance_threshold: float = 0.6
    min_tokens: int = 2


@dataclass(frozen=True, slots=True)
class KMeansResult:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    n_iterations: int
    inertia_history: tuple[float, ...]


def filter_trivial(
    utterances: Sequence[Utterance], scorer: Scorer, min_tokens: int = 2
) -> list[Utterance]:
    """Keep customer utterances that are neither chitchat nor too short."""
    threshold = scorer.config.per_label_threshold
    kept = []
    for utt in utterances:
        if utt.speaker is not Speaker.CUSTOMER:
            continue
        if len(tokenize(utt.text)) < min_tokens:
            continue
        if scorer.score_question(utt.text).not_chitchat >= threshold:
            kept.append(utt)
    return kept


def choose_k(n: int, override: Optional[int] = None) -> int:
    """Cluster-count heuristic: sqrt(n/2) clamped to [2, 50]; override wins."""
    if n < 1:
        raise BadK(f"cannot cluster {n} points")
    if override is not None:
        return max(1, min(override, n))
    if n == 1:
        return 1
    return max(2, min(50, round((n / 2.0) ** 0.5), n))


def _as_matrix(vectors: Sequence[np.ndarray]) -> np.ndarray:
    dims = {np.asarray(v).shape for v in vectors}
    if len(dims) > 1 or any(len(shape) != 1 for shape in dims):
        raise DimensionMismatch(f"inconsistent vector shapes: {sorted(dims)}")
    return np.asarray(np.stack(vectors), dtype=np.float64)


def _pairwise_sq_dists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = np.empty((points.shape[0], centers.shape[0]), dtype=np.float64)
    for j in range(centers.shape[0]):
        diff = points - centers[j]
        d2[:, j] = np.einsum("ij,ij->i", diff, diff)
    return d2


def kmeans_pp_init(points: np.ndarray, k: int, rng: SplitMix64) -> np.ndarray:
    """k-means++ seeding: D^2-weighted draws from the splitmix64 stream."""
    n = points.shape[0]
    first = min(int(rng.next_float() * n), n - 1)
    centers = [points[first].copy()]
    chosen = {first}
    diff = points - centers[0]
    d2 = np.einsum("ij,ij->i", diff, diff)
    while len(centers) < k:
        total = float(d2.sum())
        if total <= 0.0:
            # All remaining points coincide with a center; take the lowest
            # unchosen index to stay deterministic.
            idx = next(i for i in range(n) if i not in chosen)
        else:
            r = rng.next_float() * total
            idx = int(np.searchsorted(np.cumsum(d2), r, side="right"))
            idx = min(idx, n - 1)
        centers.append(points[idx].copy())
        chosen.add(idx)
        diff = points - centers[-1]
        d2 = np.minimum(d2, np.einsum("ij,ij->i", diff, diff))
    return np.stack(centers)


def kmeans(
    vectors: Sequence[np.ndarray],
    k: int,
    seed: int,
    initial_centroids: Optional[np.ndarray] = None,
) -> KMeansResult:
    """Lloyd's algorithm; fully deterministic for a fixed seed and input.

    Point-to-centroid ties resolve to the lowest centroid index. An empty
    cluster is re-seeded with the point farthest from its assigned centroid.
    """
    points = _as_matrix(vectors)
    n = points.shape[0]
    if not 1 <= k <= n:
        raise BadK(f"k={k} outside [1, {n}]")

    if initial_centroids is not None:
        centers = np.array(initial_centroids, dtype=np.float64, copy=True)
        if centers.shape != (k, points.shape[1]):
            raise DimensionMismatch(
                f"initial centroids shape {centers.shape} != ({k}, {points.shape[1]})"
            )
    else:
        centers = kmeans_pp_init(points, k, SplitMix64(seed))

    history: list[float] = []
    assignments = np.zeros(n, dtype=np.int64)
    iterations = 0
    for iterations in range(1, MAX_ITERATIONS + 1):
        d2 = _pairwise_sq_dists(points, centers)
        assignments = d2.argmin(axis=1)
        point_d2 = d2[np.arange(n), assignments]
        history.append(float(point_d2.sum()))

        new_centers = centers.copy()
        counts = np.bincount(assignments, minlength=k)
        for j in range(k):
            if counts[j] > 0:
                new_centers[j] = points[assignments == j].mean(axis=0)
        # Re-seed empty clusters, farthest point first; exclude a point once
        # taken so two empty clusters never grab the same one.
        if (counts == 0).any():
            claimable = point_d2.copy()
            for j in np.flatnonzero(counts == 0):
                far = int(claimable.argmax())
                new_centers[j] = points[far]
                claimable[far] = -1.0

        shift = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        centers = new_centers
        if shift < SHIFT_TOLERANCE:
            break

    d2 = _pairwise_sq_dists(points, centers)
    assignments = d2.argmin(axis=1)
    inertia = float(d2[np.arange(n), assignments].sum())
    history.append(inertia)
    return KMeansResult(
        assignments=assignments,
        centroids=centers,
        inertia=inertia,
        n_iterations=iterations,
        inertia_history=tuple(history),
    )


def _responses_after(dialog: Dialog, turn_index: int) -> tuple[SalesResponse, ...]:
    responses = []
    for utt in dialog.utterances[turn_index + 1 :]:
        if utt.speaker is not Speaker.SALES:
            break
        responses.append(
            SalesResponse(dialog_id=utt.dialog_id, turn_index=utt.turn_index, text=utt.text)
        )
    return tuple(responses)


def build_clusters(
    customer_utterances: Sequence[Utterance],
    dialogs: Sequence[Dialog],
    scorer: Scorer,
    config: ClusteringConfig = ClusteringConfig(),
    seed: int = 0,
) -> list[Cluster]:
    """Filter, embed, cluster and order customer messages.

    Output clusters are sorted by (frequency desc, mean relevance desc,
    cluster_id asc); member order inside a cluster follows the input order.
    """
    survivors = filter_trivial(customer_utterances, scorer, config.min_tokens)
    if not survivors:
        return []

    by_id = {d.dialog_id: d for d in dialogs}
    vectors = [scorer.embed(utt.text) for utt in survivors]
    k = choose_k(len(survivors), config.k_override)
    result = kmeans(vectors, k, seed)

    matrix = np.stack(vectors)
    clusters: list[Cluster] = []
    for cluster_id in range(k):
        member_idx = np.flatnonzero(result.assignments == cluster_id)
        if member_idx.size == 0:
            continue
        centroid = result.centroids[cluster_id]
        diffs = matrix[member_idx] - centroid
        anchor_pos = int(np.einsum("ij,ij->i", diffs, diffs).argmin())
        anchor_global = int(member_idx[anchor_pos])
        anchor_text = survivors[anchor_global].text

        members = []
        for idx in member_idx:
            utt = survivors[int(idx)]
            rel = scorer.relevance(anchor_text, utt.text)
            if int(idx) != anchor_global and rel < config.relevance_threshold:
                continue
            dialog = by_id.get(utt.dialog_id)
            responses = _responses_after(dialog, utt.turn_index) if dialog else ()
            members.append(
                ClusterMember(
                    dialog_id=utt.dialog_id,
                    turn_index=utt.turn_index,
                    text=utt.text,
                    vector=matrix[int(idx)],
                    anchor_relevance=rel,
                    responses=responses,
                )
            )
        mean_rel = float(np.mean([m.anchor_relevance for m in members]))
        clusters.append(
            Cluster(
                cluster_id=cluster_id,
                centroid=centroid,
                anchor_text=anchor_text,
                members=tuple(members),
                frequency=len(members),
                mean_relevance=mean_rel,
            )
        )

    clusters.sort(key=lambda c: (-c.frequency, -c.mean_relevance, c.cluster_id))
    return clusters


def with_keywords(cluster: Cluster, keywords: Sequence[str]) -> Cluster:
    return replace(cluster, keywords=tuple(keywords))
