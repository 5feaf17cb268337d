"""Pluggable interface to the three model services: parse, generate, answer.

The wire protocol is JSON over HTTP POST with one endpoint per request kind
(``/parse``, ``/generate``, ``/answer``). Request bodies mirror the request
type, including its ``kind`` field::

    {"kind": "parse",    "text": "..."}
    {"kind": "generate", "amr": "..."}
    {"kind": "answer",   "question": "...", "context": [[title, [sentence, ...]], ...]}

Responses::

    {"amr": "..."}                                             (parse)
    {"text": "..."}                                            (generate)
    {"answer": "...", "score": 0.9,
     "title": "...", "sentence_index": 0}                      (answer; source optional)

Every parse response is validated as PENMAN before it leaves this module,
and every answer span must occur verbatim in a context sentence or be
yes/no. Fixture files are JSON arrays of ``{"request": ..., "response":
...}`` pairs keyed by a stable hash of the canonicalized request.
"""

from __future__ import annotations

import hashlib
import json
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Sequence

import requests

from qdamr.errors import (
    FixtureFormatError,
    FixtureMissError,
    PenmanSyntaxError,
    ProtocolError,
    TransportError,
)
from qdamr.graph import AmrGraph, parse_penman
from qdamr.linear import linearize, render

__all__ = [
    "KIND_PARSE",
    "KIND_GENERATE",
    "KIND_ANSWER",
    "Answer",
    "Backend",
    "FixtureBackend",
    "HttpBackend",
    "canonical_json",
    "request_key",
    "parse_request",
    "generate_request",
    "answer_request",
    "load_fixtures",
    "decode_parse_response",
    "decode_generate_response",
    "decode_answer_response",
    "BACKEND_URL_ENV",
]

KIND_PARSE = "parse"
KIND_GENERATE = "generate"
KIND_ANSWER = "answer"
KINDS = (KIND_PARSE, KIND_GENERATE, KIND_ANSWER)

BACKEND_URL_ENV = "QDAMR_BACKEND_URL"

Context = Sequence[tuple[str, Sequence[str]]]


@dataclass(frozen=True)
class Answer:
    text: str
    score: float
    source: tuple[str, int] | None = None


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def request_key(request: dict) -> str:
    return hashlib.sha256(canonical_json(request).encode("utf-8")).hexdigest()


def parse_request(text: str) -> dict:
    return {"kind": KIND_PARSE, "text": text}


def generate_request(amr_text: str) -> dict:
    return {"kind": KIND_GENERATE, "amr": amr_text}


def answer_request(question: str, context: Context) -> dict:
    return {
        "kind": KIND_ANSWER,
        "question": question,
        "context": [[title, list(sentences)] for title, sentences in context],
    }


def decode_parse_response(response: dict) -> AmrGraph:
    amr = response.get("amr")
    if not isinstance(amr, str) or not amr.strip():
        raise ProtocolError(f"parse response missing 'amr' text: {response!r}")
    try:
        return parse_penman(amr)
    except PenmanSyntaxError as exc:
        raise ProtocolError(f"parse response is not valid PENMAN: {exc}") from exc


def decode_generate_response(response: dict) -> str:
    text = response.get("text")
    if not isinstance(text, str) or not text.strip():
        raise ProtocolError(f"generate response missing nonempty 'text': {response!r}")
    return text


def decode_answer_response(response: dict, context: Context) -> Answer:
    answer = response.get("answer")
    score = response.get("score")
    if not isinstance(answer, str) or not answer:
        raise ProtocolError(f"answer response missing nonempty 'answer': {response!r}")
    if not isinstance(score, (int, float)) or not 0.0 <= float(score) <= 1.0:
        raise ProtocolError(f"answer score must be a real in [0, 1]: {score!r}")
    if answer.lower() not in ("yes", "no") and not any(
        answer in sentence for _, sentences in context for sentence in sentences
    ):
        raise ProtocolError(f"answer {answer!r} does not occur verbatim in the context")
    title = response.get("title")
    index = response.get("sentence_index")
    source: tuple[str, int] | None = None
    if title is not None or index is not None:
        if not isinstance(title, str) or not isinstance(index, int):
            raise ProtocolError(f"answer source must pair a title with a sentence index: {response!r}")
        source = (title, index)
    return Answer(answer, float(score), source)


class Backend(ABC):
    """One handle for the three model operations. Safe to share."""

    @abstractmethod
    def parse_text(self, text: str) -> AmrGraph: ...

    @abstractmethod
    def generate_text(self, g: AmrGraph) -> str: ...

    @abstractmethod
    def answer_question(self, question: str, context: Context) -> Answer: ...


def _check_parse_pre(text: str) -> None:
    if not text or not text.strip():
        raise ValueError("text must be nonempty")


def _check_answer_pre(question: str, context: Context) -> None:
    if not question or not question.strip():
        raise ValueError("question must be nonempty")
    if not any(sentences for _, sentences in context):
        raise ValueError("context must contain at least one sentence")


class FixtureBackend(Backend):
    """Deterministic offline backend answering by request-content hash."""

    def __init__(self, entries: dict[str, dict]):
        self._entries = dict(entries)

    def __len__(self) -> int:
        return len(self._entries)

    def _lookup(self, request: dict) -> dict:
        key = request_key(request)
        if key not in self._entries:
            raise FixtureMissError(key, request)
        return self._entries[key]

    def parse_text(self, text: str) -> AmrGraph:
        _check_parse_pre(text)
        return decode_parse_response(self._lookup(parse_request(text)))

    def generate_text(self, g: AmrGraph) -> str:
        request = generate_request(render(linearize(g)))
        return decode_generate_response(self._lookup(request))

    def answer_question(self, question: str, context: Context) -> Answer:
        _check_answer_pre(question, context)
        request = answer_request(question, context)
        return decode_answer_response(self._lookup(request), context)


def load_fixtures(path: str) -> FixtureBackend:
    """Load a fixture file; malformed entries are reported with their index."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FixtureFormatError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if not isinstance(data, list):
        raise FixtureFormatError(f"{path}: expected a JSON array of request/response pairs")
    entries: dict[str, dict] = {}
    for i, item in enumerate(data):
        if (
            not isinstance(item, dict)
            or not isinstance(item.get("request"), dict)
            or not isinstance(item.get("response"), dict)
        ):
            raise FixtureFormatError(f"{path}: entry {i}: expected request/response objects")
        request = item["request"]
        if request.get("kind") not in KINDS:
            raise FixtureFormatError(f"{path}: entry {i}: unknown request kind {request.get('kind')!r}")
        key = request_key(request)
        if key in entries and entries[key] != item["response"]:
            raise FixtureFormatError(f"{path}: entry {i}: conflicting duplicate for request {key}")
        entries[key] = item["response"]
    return FixtureBackend(entries)


class HttpBackend(Backend):
    """JSON-over-HTTP client with bounded retries and exponential backoff.

    Timeouts and connection refusals surface as distinct
    :class:`~qdamr.errors.TransportError` kinds. Only transport-level
    failures and 5xx responses are retried.
    """

    def __init__(
        self,
        base_url: str,
        timeout: float = 60.0,
        max_retries: int = 3,
        backoff: float = 0.25,
        session: requests.Session | None = None,
    ):
        self._base = base_url.rstrip("/")
        self._timeout = timeout
        self._max_retries = max_retries
        self._backoff = backoff
        self._session = session or requests.Session()

    def _post(self, endpoint: str, request: dict) -> dict:
        url = f"{self._base}/{endpoint}"
        delay = self._backoff
        failure: TransportError | None = None
        for attempt in range(self._max_retries + 1):
            try:
                resp = self._session.post(url, json=request, timeout=self._timeout)
            except requests.Timeout as exc:
                failure = TransportError(f"request to {url} timed out: {exc}", kind="timeout")
            except requests.ConnectionError as exc:
                failure = TransportError(f"connection to {url} failed: {exc}", kind="connection")
            else:
                if resp.status_code >= 500:
                    failure = TransportError(
                        f"{url} answered {resp.status_code}: {resp.text[:200]}", kind="server"
                    )
                elif resp.status_code >= 400:
                    raise TransportError(
                        f"{url} rejected the request ({resp.status_code}): {resp.text[:200]}",
                        kind="client",
                    )
                else:
                    try:
                        body = resp.json()
                    except ValueError as exc:
                        raise ProtocolError(f"{url} returned non-JSON body") from exc
                    if not isinstance(body, dict):
                        raise ProtocolError(f"{url} returned a non-object body")
                    return body
            if attempt < self._max_retries:
                time.sleep(delay)
                delay *= 2
        assert failure is not None
        raise failure

    def parse_text(self, text: str) -> AmrGraph:
        _check_parse_pre(text)
        return decode_parse_response(self._post(KIND_PARSE, parse_request(text)))

    def generate_text(self, g: AmrGraph) -> str:
        request = generate_request(render(linearize(g)))
        return decode_generate_response(self._post(KIND_GENERATE, request))

    def answer_question(self, question: str, context: Context) -> Answer:
        _check_answer_pre(question, context)
        request = answer_request(question, context)
        return decode_answer_response(self._post(KIND_ANSWER, request), context)
