"""Capture live request/response pairs into replayable fixture files."""

from __future__ import annotations

import json
import os
import threading
from typing import Sequence

from qdamr.backends import (
    KIND_ANSWER,
    KIND_GENERATE,
    KIND_PARSE,
    request_key,
)

from qdamr_model_server.models import ModelSet

__all__ = ["FixtureRecorder", "respond", "record_fixtures"]


def respond(models: ModelSet, request: dict) -> dict:
    """Dispatch one protocol request object to the right model."""
    kind = request.get("kind")
    if kind == KIND_PARSE:
        return {"amr": models.parser.parse(request["text"])}
    if kind == KIND_GENERATE:
        return {"text": models.generator.generate(request["amr"])}
    if kind == KIND_ANSWER:
        context = [(title, sentences) for title, sentences in request["context"]]
        answer, score, source = models.qa.answer(request["question"], context)
        return {
            "answer": answer,
            "score": score,
            "title": source[0],
            "sentence_index": source[1],
        }
    raise ValueError(f"unknown request kind {kind!r}")


class FixtureRecorder:
    """Deduplicating fixture sink, rewritten to disk after every record."""

    def __init__(self, path: str):
        self._path = path
        self._lock = threading.Lock()
        self._entries: dict[str, dict] = {}
        self._flush()

    def record(self, request: dict, response: dict) -> None:
        key = request_key(request)
        with self._lock:
            self._entries[key] = {"request": request, "response": response}
            self._flush()

    def _flush(self) -> None:
        tmp = self._path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(list(self._entries.values()), fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, self._path)

    def __len__(self) -> int:
        return len(self._entries)


def record_fixtures(requests: Sequence[dict], out_path: str, models: ModelSet) -> int:
    """Play ``requests`` through the models and write a fixture file.

    Duplicate requests collapse to one entry; an empty request list yields
    an empty, still loadable file. Returns the number of entries written.
    """
    recorder = FixtureRecorder(out_path)
    for request in requests:
        recorder.record(request, respond(models, request))
    return len(recorder)
