"""HotpotQA distractor-format ingestion."""

from __future__ import annotations

import json
from dataclasses import dataclass

from qdamr.errors import SchemaError

__all__ = ["HotpotExample", "load_hotpotqa", "example_to_dict"]


@dataclass(frozen=True)
class HotpotExample:
    id: str
    question: str
    answer: str
    qtype: str
    level: str
    context: tuple[tuple[str, tuple[str, ...]], ...]
    supporting_facts: tuple[tuple[str, int], ...]


def _fail(path: str, index: int, message: str) -> SchemaError:
    return SchemaError(f"{path}: example {index}: {message}")


def _load_example(raw: object, path: str, index: int) -> HotpotExample:
    if not isinstance(raw, dict):
        raise _fail(path, index, "expected an object")
    for key in ("_id", "question", "answer", "context"):
        if key not in raw:
            raise _fail(path, index, f"missing required field '{key}'")
    question = raw["question"]
    answer = raw["answer"]
    if not isinstance(question, str) or not question.strip():
        raise _fail(path, index, "'question' must be a nonempty string")
    if not isinstance(answer, str):
        raise _fail(path, index, "'answer' must be a string")

    raw_context = raw["context"]
    if not isinstance(raw_context, list) or not raw_context:
        raise _fail(path, index, "'context' must be a nonempty array")
    context: list[tuple[str, tuple[str, ...]]] = []
    for p, para in enumerate(raw_context):
        if (
            not isinstance(para, list)
            or len(para) != 2
            or not isinstance(para[0], str)
            or not isinstance(para[1], list)
            or not all(isinstance(s, str) for s in para[1])
        ):
            raise _fail(path, index, f"context paragraph {p} must be [title, [sentence, ...]]")
        context.append((para[0], tuple(para[1])))
    sentence_counts = {title: len(sentences) for title, sentences in context}

    facts: list[tuple[str, int]] = []
    for f, fact in enumerate(raw.get("supporting_facts", [])):
        if (
            not isinstance(fact, list)
            or len(fact) != 2
            or not isinstance(fact[0], str)
            or not isinstance(fact[1], int)
        ):
            raise _fail(path, index, f"supporting fact {f} must be [title, sentence_index]")
        title, sent_index = fact
        if title not in sentence_counts:
            raise _fail(path, index, f"supporting fact {f} names unknown paragraph {title!r}")
        if not 0 <= sent_index < sentence_counts[title]:
            raise _fail(path, index, f"supporting fact {f} sentence index {sent_index} out of range")
        facts.append((title, sent_index))

    return HotpotExample(
        id=str(raw["_id"]),
        question=question,
        answer=answer,
        qtype=str(raw.get("type", "")),
        level=str(raw.get("level", "")),
        context=tuple(context),
        supporting_facts=tuple(facts),
    )


def load_hotpotqa(path: str) -> list[HotpotExample]:
    """Load and validate a HotpotQA-format JSON array."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, list):
        raise SchemaError(f"{path}: expected a JSON array of examples")
    return [_load_example(raw, path, i) for i, raw in enumerate(data)]


def example_to_dict(example: HotpotExample) -> dict:
    return {
        "_id": example.id,
        "question": example.question,
        "answer": example.answer,
        "type": example.qtype,
        "level": example.level,
        "context": [[title, list(sentences)] for title, sentences in example.context],
        "supporting_facts": [[title, index] for title, index in example.supporting_facts],
    }
