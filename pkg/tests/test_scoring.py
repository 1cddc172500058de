import json

import httpx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from salesminer.errors import EmptyCandidates, RemoteUnavailable
from salesminer.faq import DialogSnippet
from salesminer.ingest import Speaker, Utterance
from salesminer.scoring import (
    BaselineScorer,
    LabelScores,
    RemoteScorer,
    ScorerConfig,
    cosine,
    fnv1a64,
    is_valid_question,
    make_scorer,
)

from oracles import o_embed, o_fnv1a64


# --- hashing ---------------------------------------------------------------


def test_fnv1a64_published_vectors():
    # Reference values for the 64-bit FNV-1a parameters.
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=64))
def test_fnv1a64_matches_independent_implementation(data):
    assert fnv1a64(data) == o_fnv1a64(data)


# --- embeddings ------------------------------------------------------------


def test_embed_is_unit_norm_or_zero(scorer):
    for text in ["hello world", "你好，这个产品多少钱", "a", "what?", ""]:
        vec = scorer.embed(text)
        assert vec.shape == (256,)
        norm = float(np.linalg.norm(vec))
        if text.strip() and text.strip("?"):
            assert norm == pytest.approx(1.0, abs=1e-12)
        else:
            assert norm == 0.0


def test_embed_matches_oracle(scorer):
    texts = [
        "what is the price of the pro plan?",
        "这个产品的价格是多少",
        "Mixed 中文 and english 123",
        "  spaced   out  ",
    ]
    for text in texts:
        dense = scorer.embed(text)
        sparse = o_embed(text)
        for bucket in range(256):
            assert dense[bucket] == pytest.approx(sparse.get(bucket, 0.0), abs=1e-12)


def test_embed_cache_returns_immutable_array(scorer):
    a = scorer.embed("cache me")
    b = scorer.embed("  cache   me ")  # same normalized key
    assert a is b
    with pytest.raises(ValueError):
        a[0] = 5.0


def test_cosine_zero_safe():
    zero = np.zeros(4)
    one = np.array([1.0, 0.0, 0.0, 0.0])
    assert cosine(zero, one) == 0.0
    assert cosine(one, one) == pytest.approx(1.0)


# --- the question gate -----------------------------------------------------


@pytest.mark.parametrize(
    "text,expected",
    [
        ("ok thanks", (0.0, 1.0, 0.0)),  # too short, not chitchat, no inquiry
        ("what is the price?", (1.0, 1.0, 1.0)),
        ("hi", (0.0, 0.0, 0.0)),
        ("good morning", (0.0, 0.0, 0.0)),
        ("the weather is nice today", (1.0, 1.0, 0.0)),
        ("tell me the price", (1.0, 1.0, 0.0)),  # no '?' and no interrogative
        ("这个产品的价格是多少", (1.0, 1.0, 1.0)),  # CJK interrogative
        ("这个方案支持定制吗", (1.0, 1.0, 1.0)),  # sentence-final particle
        ("你们提供发票服务", (1.0, 1.0, 0.0)),
        ("请问价格是多少？", (1.0, 1.0, 1.0)),  # full-width question mark
    ],
)
def test_gate_examples(scorer, text, expected):
    assert scorer.score_question(text).as_tuple() == expected


def test_gate_interrogative_needs_whole_token(scorer):
    # "what" inside "whatever" must not fire the inquiry label.
    scores = scorer.score_question("whatever simulation tool works")
    assert scores.legal_inquiry == 0.0
    scores = scorer.score_question("tell me what works")
    assert scores.legal_inquiry == 1.0


def test_gate_question_mark_after_whitespace(scorer):
    assert scorer.score_question("is this available ?  ").legal_inquiry == 1.0


def test_is_valid_question_threshold_inclusive():
    config = ScorerConfig()
    assert is_valid_question(LabelScores(0.5, 0.5, 0.5), config)
    assert not is_valid_question(LabelScores(0.49, 1.0, 1.0), config)
    strict = ScorerConfig(per_label_threshold=0.75)
    assert not is_valid_question(LabelScores(0.5, 1.0, 1.0), strict)


def test_scorer_config_validation():
    with pytest.raises(ValueError):
        ScorerConfig(backend="quantum")
    with pytest.raises(ValueError):
        ScorerConfig(backend="remote")  # no URL
    assert make_scorer(ScorerConfig()).__class__ is BaselineScorer
    remote = make_scorer(
        ScorerConfig(backend="remote", remote_url="http://models.example")
    )
    assert remote.__class__ is RemoteScorer


# --- baseline answer scoring ------------------------------------------------


def _snippet(question: str, candidates: list[str]) -> DialogSnippet:
    query = Utterance("d", 0, Speaker.CUSTOMER, question)
    followers = tuple(
        Utterance("d", i + 1, Speaker.SALES, text) for i, text in enumerate(candidates)
    )
    return DialogSnippet(
        query=query, followers=followers, candidates=tuple(range(len(followers)))
    )


def test_score_answers_is_shifted_cosine(scorer):
    snippet = _snippet("what is the price?", ["the price is ten dollars", "hello"])
    scored = dict(scorer.score_answers(snippet))
    for idx, follower in enumerate(snippet.followers):
        expected = 0.5 * (
            1.0 + cosine(scorer.embed(snippet.query.text), scorer.embed(follower.text))
        )
        assert scored[idx] == pytest.approx(expected, abs=1e-15)


def test_score_answers_requires_candidates(scorer):
    snippet = DialogSnippet(
        query=Utterance("d", 0, Speaker.CUSTOMER, "any candidates?"),
        followers=(),
        candidates=(),
    )
    with pytest.raises(EmptyCandidates):
        scorer.score_answers(snippet)


# --- remote backend over a mock transport ------------------------------------


def remote_scorer(handler) -> RemoteScorer:
    config = ScorerConfig(backend="remote", remote_url="http://models.example")
    return RemoteScorer(config, transport=httpx.MockTransport(handler))


def test_remote_question_labels():
    def handler(request: httpx.Request) -> httpx.Response:
        assert request.url.path == "/v1/question_labels"
        body = json.loads(request.content)
        assert body == {"texts": ["how much?"]}
        return httpx.Response(200, json={"scores": [[0.9, 0.8, 0.7]]})

    scores = remote_scorer(handler).score_question("how much?")
    assert scores.as_tuple() == (0.9, 0.8, 0.7)


def test_remote_answer_scores_align_with_candidates():
    def handler(request: httpx.Request) -> httpx.Response:
        assert request.url.path == "/v1/answer_scores"
        body = json.loads(request.content)
        assert body["query"] == "q text"
        assert body["candidates"] == [0, 2]
        return httpx.Response(200, json={"scores": [0.1, 0.95]})

    query = Utterance("d", 0, Speaker.CUSTOMER, "q text")
    followers = (
        Utterance("d", 1, Speaker.SALES, "first"),
        Utterance("d", 2, Speaker.CUSTOMER, "noise"),
        Utterance("d", 3, Speaker.SALES, "second"),
    )
    snippet = DialogSnippet(query=query, followers=followers, candidates=(0, 2))
    assert remote_scorer(handler).score_answers(snippet) == [(0, 0.1), (2, 0.95)]


def test_remote_embed_renormalizes():
    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(200, json={"vectors": [[3.0, 4.0]]})

    vec = remote_scorer(handler).embed("anything")
    assert vec == pytest.approx(np.array([0.6, 0.8]))


def test_remote_relevance_maps_probability_to_signed_score():
    def handler(request: httpx.Request) -> httpx.Response:
        assert request.url.path == "/v1/pair_score"
        return httpx.Response(200, json={"score": 0.75})

    assert remote_scorer(handler).relevance("a", "b") == pytest.approx(0.5)


def test_remote_malformed_response_raises():
    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(200, json={"unexpected": True})

    with pytest.raises(RemoteUnavailable):
        remote_scorer(handler).score_question("hello?")


def test_remote_http_error_raises_with_url():
    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(503, text="overloaded")

    with pytest.raises(RemoteUnavailable) as exc_info:
        remote_scorer(handler).score_question("hello?")
    assert "models.example" in str(exc_info.value)


def test_remote_connection_failure_raises():
    def handler(request: httpx.Request) -> httpx.Response:
        raise httpx.ConnectError("refused")

    with pytest.raises(RemoteUnavailable):
        remote_scorer(handler).embed("text")


# --- property: norm of every embedding is 0 or 1 -----------------------------


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=40))
def test_embed_norm_property(text):
    scorer = BaselineScorer(ScorerConfig())
    norm = float(np.linalg.norm(scorer.embed(text)))
    assert norm == 0.0 or norm == pytest.approx(1.0, abs=1e-12)
