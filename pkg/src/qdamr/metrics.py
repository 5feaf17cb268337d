"""Answer metrics (EM/F1) and sub-question quality metrics."""

from __future__ import annotations

import re
import string
from collections import Counter
from typing import Sequence

__all__ = [
    "normalize_answer",
    "exact_match",
    "f1_score",
    "token_levenshtein",
    "token_edit_distance",
    "length_ratio",
]

_ARTICLES_RE = re.compile(r"\b(a|an|the)\b")
_PUNCT = set(string.punctuation)


def normalize_answer(text: str) -> str:
    """Lowercase, drop punctuation and articles, collapse whitespace."""
    lowered = text.lower()
    no_punct = "".join(ch for ch in lowered if ch not in _PUNCT)
    no_articles = _ARTICLES_RE.sub(" ", no_punct)
    return " ".join(no_articles.split())


def exact_match(prediction: str, gold: str) -> int:
    return int(normalize_answer(prediction) == normalize_answer(gold))


def f1_score(prediction: str, gold: str) -> float:
    """Token-overlap harmonic mean after normalization."""
    pred_tokens = normalize_answer(prediction).split()
    gold_tokens = normalize_answer(gold).split()
    if not pred_tokens and not gold_tokens:
        return 1.0
    common = Counter(pred_tokens) & Counter(gold_tokens)
    overlap = sum(common.values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred_tokens)
    recall = overlap / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def token_levenshtein(a: Sequence[str], b: Sequence[str]) -> int:
    """Edit distance between token sequences (insert/delete/substitute)."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, start=1):
        current = [i]
        for j, tok_b in enumerate(b, start=1):
            cost = 0 if tok_a == tok_b else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def _tokens(text: str) -> list[str]:
    # Raw whitespace split, case kept: these are surface-form metrics.
    return text.split()


def token_edit_distance(question: str, sub_questions: Sequence[str]) -> float:
    """Mean token edit distance between the question and each sub-question."""
    if not sub_questions:
        raise ValueError("at least one sub-question is required")
    q = _tokens(question)
    total = 0
    for sq in sub_questions:
        sq_tokens = _tokens(sq)
        if not sq_tokens:
            raise ValueError("sub-question has no tokens")
        total += token_levenshtein(q, sq_tokens)
    return total / len(sub_questions)


def length_ratio(question: str, sub_questions: Sequence[str]) -> float:
    """Mean ratio of question length to sub-question length, in tokens."""
    if not sub_questions:
        raise ValueError("at least one sub-question is required")
    q_len = len(_tokens(question))
    ratios = []
    for sq in sub_questions:
        sq_tokens = _tokens(sq)
        if not sq_tokens:
            raise ValueError("sub-question has no tokens")
        ratios.append(q_len / len(sq_tokens))
    return sum(ratios) / len(ratios)
