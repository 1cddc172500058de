"""Scorer backends for question gating, answer ranking, embeddings and relevance.

Every learned-model dependency sits behind the :class:`Scorer` interface.
The baseline backend is deterministic and dependency-free so the whole
pipeline runs and tests offline; the remote backend talks JSON over HTTP to
an external model service (see docs/file-formats.md for the wire schemas).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from .errors import EmptyCandidates, RemoteUnavailable
from .phrases import tokenize
from .textnorm import contains_cjk, normalize_for_match, normalize_text

if TYPE_CHECKING:
    from .faq import DialogSnippet

DEFAULT_EMBEDDING_DIM = 256
REMOTE_TIMEOUT_SECONDS = 2.0

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash; the bucket function of the baseline embedder."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True, slots=True)
class LabelScores:
    """Question-gate scores: semantic integrity, not-chitchat, legal inquiry."""

    semantic_integrity: float
    not_chitchat: float
    legal_inquiry: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.semantic_integrity, self.not_chitchat, self.legal_inquiry)


def _load_default_lexicon(name: str) -> tuple[str, ...]:
    text = resources.files("salesminer.data").joinpath(name).read_text("utf-8")
    entries = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.append(normalize_for_match(line))
    return tuple(entries)


def load_lexicon(path: str) -> tuple[str, ...]:
    """Load a lexicon file: UTF-8, one entry per line, '#' comments allowed."""
    with open(path, encoding="utf-8") as fh:
        return tuple(
            normalize_for_match(line.strip())
            for line in fh
            if line.strip() and not line.strip().startswith("#")
        )


@dataclass(frozen=True)
class Lexicons:
    greetings: tuple[str, ...] = field(
        default_factory=lambda: _load_default_lexicon("greetings.txt")
    )
    interrogatives: tuple[str, ...] = field(
        default_factory=lambda: _load_default_lexicon("interrogatives.txt")
    )
    domain_terms: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScorerConfig:
    backend: str = "baseline"  # "baseline" | "remote"
    remote_url: Optional[str] = None
    per_label_threshold: float = 0.5
    answer_threshold: float = 0.75
    embedding_dim: int = DEFAULT_EMBEDDING_DIM
    lexicons: Lexicons = field(default_factory=Lexicons)

    def __post_init__(self):
        if self.backend not in ("baseline", "remote"):
            raise ValueError(f"unknown scorer backend {self.backend!r}")
        if self.backend == "remote" and not self.remote_url:
            raise ValueError("remote backend requires remote_url")


def is_valid_question(scores: LabelScores, config: ScorerConfig) -> bool:
    """True iff all three gate scores reach the per-label threshold (inclusive)."""
    t = config.per_label_threshold
    return all(score >= t for score in scores.as_tuple())


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


class Scorer:
    """Interface shared by the baseline and remote backends."""

    def __init__(self, config: ScorerConfig):
        self.config = config

    def score_question(self, text: str) -> LabelScores:
        raise NotImplementedError

    def score_answers(self, snippet: "DialogSnippet") -> list[tuple[int, float]]:
        raise NotImplementedError

    def embed(self, text: str) -> np.ndarray:
        raise NotImplementedError

    def relevance(self, text_a: str, text_b: str) -> float:
        raise NotImplementedError

    def is_valid_question(self, scores: LabelScores) -> bool:
        return is_valid_question(scores, self.config)


class BaselineScorer(Scorer):
    """Deterministic lexical stand-ins for the neural models.

    Gate rules: semantic integrity needs >= 3 tokens; chitchat is a whole-text
    greetings-lexicon hit; a legal inquiry ends with a question mark or
    contains an interrogative marker. Embeddings are hashed character
    n-grams (n in 1..3) over the match-normalized text, L2-normalized.
    """

    def __init__(self, config: ScorerConfig):
        super().__init__(config)
        self._greetings = frozenset(config.lexicons.greetings)
        self._cache: dict[str, np.ndarray] = {}

    def score_question(self, text: str) -> LabelScores:
        integrity = 1.0 if len(tokenize(text)) >= 3 else 0.0
        normalized = normalize_for_match(text)
        not_chitchat = 0.0 if normalized in self._greetings else 1.0
        legal = 1.0 if self._is_inquiry(text, normalized) else 0.0
        return LabelScores(integrity, not_chitchat, legal)

    def _is_inquiry(self, text: str, normalized: str) -> bool:
        stripped = normalize_text(text)
        if stripped.endswith("?") or stripped.endswith("？"):
            return True
        token_set = set(tokenize(normalized))
        for entry in self.config.lexicons.interrogatives:
            if not entry:
                continue
            if contains_cjk(entry):
                if entry in normalized:
                    return True
            elif entry in token_set:
                return True
        return False

    def score_answers(self, snippet: "DialogSnippet") -> list[tuple[int, float]]:
        if not snippet.candidates:
            raise EmptyCandidates("snippet has no sales candidates to score")
        query_vec = self.embed(snippet.query.text)
        scored = []
        for idx in snippet.candidates:
            candidate_vec = self.embed(snippet.followers[idx].text)
            score = 0.5 * (1.0 + cosine(query_vec, candidate_vec))
            scored.append((idx, score))
        return scored

    def embed(self, text: str) -> np.ndarray:
        key = normalize_for_match(text)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        vec = self._embed_normalized(key)
        vec.flags.writeable = False
        self._cache[key] = vec
        return vec

    def _embed_normalized(self, normalized: str) -> np.ndarray:
        dim = self.config.embedding_dim
        counts = np.zeros(dim, dtype=np.float64)
        if not normalized:
            return counts
        for n in (1, 2, 3):
            for i in range(len(normalized) - n + 1):
                bucket = fnv1a64(normalized[i : i + n].encode("utf-8")) % dim
                counts[bucket] += 1.0
        norm = float(np.linalg.norm(counts))
        return counts / norm

    def relevance(self, text_a: str, text_b: str) -> float:
        return cosine(self.embed(text_a), self.embed(text_b))


class RemoteScorer(Scorer):
    """HTTP client to an external model service. 2 s timeout, no retries."""

    def __init__(self, config: ScorerConfig, transport=None):
        super().__init__(config)
        import httpx

        self._client = httpx.Client(
            base_url=config.remote_url.rstrip("/"),
            timeout=REMOTE_TIMEOUT_SECONDS,
            transport=transport,
        )

    def _post(self, endpoint: str, payload: dict) -> dict:
        import httpx

        url = f"{self.config.remote_url.rstrip('/')}{endpoint}"
        try:
            response = self._client.post(endpoint, json=payload)
            response.raise_for_status()
            return response.json()
        except httpx.HTTPError as exc:
            raise RemoteUnavailable(url, str(exc)) from exc
        except ValueError as exc:  # non-JSON body
            raise RemoteUnavailable(url, f"bad response: {exc}") from exc

    def score_question(self, text: str) -> LabelScores:
        doc = self._post("/v1/question_labels", {"texts": [text]})
        try:
            si, nc, li = doc["scores"][0]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise RemoteUnavailable(
                self.config.remote_url, f"malformed question_labels response: {exc}"
            ) from exc
        return LabelScores(float(si), float(nc), float(li))

    def score_answers(self, snippet: "DialogSnippet") -> list[tuple[int, float]]:
        if not snippet.candidates:
            raise EmptyCandidates("snippet has no sales candidates to score")
        payload = {
            "query": snippet.query.text,
            "followers": [u.text for u in snippet.followers],
            "candidates": list(snippet.candidates),
        }
        doc = self._post("/v1/answer_scores", payload)
        scores = doc.get("scores")
        if not isinstance(scores, list) or len(scores) != len(snippet.candidates):
            raise RemoteUnavailable(
                self.config.remote_url, "answer_scores response length mismatch"
            )
        return [(idx, float(s)) for idx, s in zip(snippet.candidates, scores)]

    def embed(self, text: str) -> np.ndarray:
        doc = self._post("/v1/embed", {"texts": [text]})
        try:
            vec = np.asarray(doc["vectors"][0], dtype=np.float64)
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise RemoteUnavailable(
                self.config.remote_url, f"malformed embed response: {exc}"
            ) from exc
        norm = float(np.linalg.norm(vec))
        return vec / norm if norm > 0 else vec

    def relevance(self, text_a: str, text_b: str) -> float:
        doc = self._post("/v1/pair_score", {"text_a": text_a, "text_b": text_b})
        if "score" not in doc:
            raise RemoteUnavailable(
                self.config.remote_url, "malformed pair_score response"
            )
        # Service reports a match probability in [0,1]; map onto [-1,1].
        return 2.0 * float(doc["score"]) - 1.0


def make_scorer(config: ScorerConfig) -> Scorer:
    if config.backend == "remote":
        return RemoteScorer(config)
    return BaselineScorer(config)
