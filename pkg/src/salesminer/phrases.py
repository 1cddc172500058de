"""Frequent phrase mining and significance-driven segmentation.

Two phases: contiguous pattern mining with a minimum support threshold,
then bottom-up merging of adjacent units while the merge significance stays
above a threshold. Keywords for a cluster are the highest-scoring segmented
phrases, with generic terms (no more frequent in the cluster than in the
background corpus) demoted to the back of the ranking.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .textnorm import is_cjk

Tokens = tuple[str, ...]


@dataclass(frozen=True, slots=True)
class Phrase:
    """A mined token sequence with its corpus support."""

    tokens: Tokens
    support: int
    significance: float = 0.0

    def render(self) -> str:
        return render_tokens(self.tokens)


@dataclass(frozen=True, slots=True)
class MiningConfig:
    min_support: int = 3
    significance_threshold: float = 2.0
    max_phrase_len: int = 6
    max_keywords: int = 5


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens; each CJK codepoint is its own token.

    Punctuation and whitespace act as separators and are dropped.
    """
    tokens: list[str] = []
    buf: list[str] = []

    def flush() -> None:
        if buf:
            tokens.append("".join(buf))
            buf.clear()

    for ch in text:
        if is_cjk(ch):
            flush()
            tokens.append(ch)
        elif ch.isalnum():
            buf.append(ch.casefold())
        else:
            flush()
    flush()
    return tokens


def render_tokens(tokens: Sequence[str]) -> str:
    """Join tokens, spacing Latin words but not CJK characters."""
    parts: list[str] = []
    for i, tok in enumerate(tokens):
        if i > 0 and not (is_cjk(tok[0]) or is_cjk(parts[-1][-1])):
            parts.append(" ")
        parts.append(tok)
    return "".join(parts)


def count_total_tokens(corpus: Iterable[Sequence[str]]) -> int:
    return sum(len(doc) for doc in corpus)


def mine_frequent_phrases(
    corpus: Sequence[Sequence[str]], config: MiningConfig = MiningConfig()
) -> set[Phrase]:
    """All contiguous phrases of length 1..max_phrase_len with support >= min_support.

    Occurrences overlap (["a","a","a"] holds ("a","a") twice) and are summed
    over documents. Counting is level-wise: a length-L occurrence is counted
    only where both its length-(L-1) prefix and suffix are frequent, which by
    downward closure yields exactly the brute-force frequent set.
    """
    sigma = config.min_support
    total = count_total_tokens(corpus)

    level_counts = Counter()
    for doc in corpus:
        for tok in doc:
            level_counts[(tok,)] += 1
    frequent: dict[Tokens, int] = {
        g: c for g, c in level_counts.items() if c >= sigma
    }
    previous = set(frequent)

    length = 2
    while previous and length <= config.max_phrase_len:
        level_counts = Counter()
        for doc in corpus:
            for i in range(len(doc) - length + 1):
                gram = tuple(doc[i : i + length])
                if gram[:-1] in previous and gram[1:] in previous:
                    level_counts[gram] += 1
        current = {g: c for g, c in level_counts.items() if c >= sigma}
        frequent.update(current)
        previous = set(current)
        length += 1

    phrases = set()
    for gram, support in frequent.items():
        if len(gram) == 1:
            sig = 0.0
        else:
            prefix = frequent[gram[:-1]]
            last = frequent[gram[-1:]]
            sig = _significance(prefix, last, support, total)
        phrases.add(Phrase(tokens=gram, support=support, significance=sig))
    return phrases


def significance(
    p1: Phrase, p2: Phrase, joint_support: int, total_tokens: int
) -> float:
    """Excess of observed collocation count over the independence expectation,
    normalized by sqrt(max(observed, 1))."""
    return _significance(p1.support, p2.support, joint_support, total_tokens)


def _significance(f1: int, f2: int, joint: int, total_tokens: int) -> float:
    mu0 = f1 * f2 / total_tokens
    return (joint - mu0) / math.sqrt(max(joint, 1))


def segment(
    tokens: Sequence[str],
    phrases: set[Phrase],
    config: MiningConfig = MiningConfig(),
    total_tokens: Optional[int] = None,
) -> list[Phrase]:
    """Partition a token sequence into phrases by greedy adjacent merging.

    Repeatedly merges the adjacent pair with the highest significance while
    it stays >= the threshold; ties go to the leftmost pair. The output
    concatenated in order always reproduces the input tokens.
    """
    support = {p.tokens: p.support for p in phrases}
    if total_tokens is None:
        total_tokens = sum(c for g, c in support.items() if len(g) == 1)
    total_tokens = max(total_tokens, 1)

    units: list[Tokens] = [(tok,) for tok in tokens]
    merge_sig: dict[Tokens, float] = {}

    while len(units) > 1:
        best_sig = -math.inf
        best_idx = -1
        for i in range(len(units) - 1):
            joined = units[i] + units[i + 1]
            if len(joined) > config.max_phrase_len:
                continue
            sig = _significance(
                support.get(units[i], 0),
                support.get(units[i + 1], 0),
                support.get(joined, 0),
                total_tokens,
            )
            if sig > best_sig:
                best_sig = sig
                best_idx = i
        if best_idx < 0 or best_sig < config.significance_threshold:
            break
        merged = units[best_idx] + units[best_idx + 1]
        merge_sig[merged] = best_sig
        units[best_idx : best_idx + 2] = [merged]

    return [
        Phrase(
            tokens=unit,
            support=support.get(unit, 0),
            significance=merge_sig.get(unit, 0.0),
        )
        for unit in units
    ]


def count_occurrences(gram: Tokens, corpus: Sequence[Sequence[str]]) -> int:
    """Overlap-counted occurrences of a token sequence across documents."""
    n = len(gram)
    count = 0
    for doc in corpus:
        for i in range(len(doc) - n + 1):
            if tuple(doc[i : i + n]) == gram:
                count += 1
    return count


def cluster_keywords(
    cluster_texts: Sequence[str],
    background_corpus: Sequence[str],
    config: MiningConfig = MiningConfig(),
) -> list[str]:
    """Top keywords for a cluster of customer messages.

    Mines and segments within the cluster, scores each segmented phrase by
    support * max(significance, 1), and demotes phrases whose frequency rate
    in the background corpus is at least their rate in the cluster.
    """
    cluster_docs = [tokenize(t) for t in cluster_texts]
    cluster_total = count_total_tokens(cluster_docs)
    if cluster_total == 0 or config.max_keywords <= 0:
        return []

    phrases = mine_frequent_phrases(cluster_docs, config)
    sig_by_gram = {p.tokens: p.significance for p in phrases}

    seen: set[Tokens] = set()
    candidates: list[Tokens] = []
    for doc in cluster_docs:
        for unit in segment(doc, phrases, config, total_tokens=cluster_total):
            if unit.tokens not in seen:
                seen.add(unit.tokens)
                candidates.append(unit.tokens)

    background_docs = [tokenize(t) for t in background_corpus]
    background_total = count_total_tokens(background_docs)

    ranked = []
    for gram in candidates:
        support = count_occurrences(gram, cluster_docs)
        if support == 0:
            continue
        score = support * max(sig_by_gram.get(gram, 0.0), 1.0)
        cluster_rate = support / cluster_total
        if background_total > 0:
            background_rate = count_occurrences(gram, background_docs) / background_total
        else:
            background_rate = 0.0
        demoted = background_rate >= cluster_rate
        ranked.append((demoted, -score, render_tokens(gram)))

    ranked.sort()
    return [text for _, _, text in ranked[: config.max_keywords]]
