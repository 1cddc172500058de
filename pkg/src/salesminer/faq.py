"""Mine FAQ question-answer pairs from dialogs.

Pipeline per dialog: gate customer questions through the three-label
classifier, window the subsequent utterances into a snippet, score the sales
candidates, and keep the best answer only when its score clears the answer
threshold (strictly). Pairs are deduplicated on the normalized question text.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Collection, Iterable, Optional, Sequence

from .errors import RemoteUnavailable
from .ingest import Chatlog, Dialog, Speaker, Utterance
from .scoring import Scorer
from .textnorm import normalize_for_match

DEFAULT_WINDOW = 6


@dataclass(frozen=True, slots=True)
class DialogSnippet:
    """A validated customer question plus its windowed follow-up utterances.

    ``candidates`` are indices into ``followers`` where the speaker is Sales.
    """

    query: Utterance
    followers: tuple[Utterance, ...]
    candidates: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class QAPair:
    question: str
    answer: str
    score: float
    dialog_id: str
    question_index: int
    answer_index: int

    def to_doc(self) -> dict:
        return {
            "question": self.question,
            "answer": self.answer,
            "score": self.score,
            "dialog_id": self.dialog_id,
            "question_index": self.question_index,
            "answer_index": self.answer_index,
        }


def extract_questions(dialog: Dialog, scorer: Scorer) -> list[Utterance]:
    """Customer utterances passing all three gate labels, in dialog order."""
    questions = []
    for utt in dialog.utterances:
        if utt.speaker is not Speaker.CUSTOMER:
            continue
        if scorer.is_valid_question(_score_with_context(scorer, utt)):
            questions.append(utt)
    return questions


def build_snippet(
    dialog: Dialog,
    question_index: int,
    window: int = DEFAULT_WINDOW,
    stop_indices: Collection[int] = (),
) -> DialogSnippet:
    """Window up to ``window - 1`` utterances after the question.

    Construction stops early at the next validated customer question
    (``stop_indices``) so one reply is never claimed by two questions.
    """
    query = dialog.utterances[question_index]
    followers: list[Utterance] = []
    for utt in dialog.utterances[question_index + 1 :]:
        if len(followers) >= window - 1:
            break
        if utt.turn_index in stop_indices:
            break
        followers.append(utt)
    candidates = tuple(
        i for i, utt in enumerate(followers) if utt.speaker is Speaker.SALES
    )
    return DialogSnippet(query=query, followers=tuple(followers), candidates=candidates)


def select_answer(snippet: DialogSnippet, scorer: Scorer) -> Optional[QAPair]:
    """Best-scoring candidate if it clears the threshold strictly, else None.

    Ties go to the earliest candidate.
    """
    if not snippet.candidates:
        return None
    scored = _scored_with_context(scorer, snippet)
    best_idx, best_score = scored[0]
    for idx, score in scored[1:]:
        if score > best_score:
            best_idx, best_score = idx, score
    if best_score <= scorer.config.answer_threshold:
        return None
    answer = snippet.followers[best_idx]
    return QAPair(
        question=snippet.query.text,
        answer=answer.text,
        score=best_score,
        dialog_id=snippet.query.dialog_id,
        question_index=snippet.query.turn_index,
        answer_index=answer.turn_index,
    )


def extract_faq(
    chatlog: Chatlog, scorer: Scorer, window: int = DEFAULT_WINDOW
) -> list[QAPair]:
    """Run the full pipeline over every dialog and deduplicate.

    Duplicate questions (identical normalized text) keep the highest-scoring
    pair; output is ordered by score descending, then dialog_id, then
    question index.
    """
    best: dict[str, QAPair] = {}
    for dialog in chatlog.dialogs:
        questions = extract_questions(dialog, scorer)
        question_indices = {q.turn_index for q in questions}
        for query in questions:
            snippet = build_snippet(
                dialog,
                query.turn_index,
                window=window,
                stop_indices=question_indices - {query.turn_index},
            )
            pair = select_answer(snippet, scorer)
            if pair is None:
                continue
            key = normalize_for_match(pair.question)
            current = best.get(key)
            if current is None or pair.score > current.score:
                best[key] = pair
    return sorted(
        best.values(), key=lambda p: (-p.score, p.dialog_id, p.question_index)
    )


def _score_with_context(scorer: Scorer, utt: Utterance):
    try:
        return scorer.score_question(utt.text)
    except RemoteUnavailable as exc:
        raise RemoteUnavailable(
            exc.url, exc.cause, context=f"dialog {utt.dialog_id} turn {utt.turn_index}"
        ) from exc


def _scored_with_context(scorer: Scorer, snippet: DialogSnippet):
    try:
        return scorer.score_answers(snippet)
    except RemoteUnavailable as exc:
        q = snippet.query
        raise RemoteUnavailable(
            exc.url, exc.cause, context=f"dialog {q.dialog_id} turn {q.turn_index}"
        ) from exc
