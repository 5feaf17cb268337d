"""Model implementations behind the three endpoints.

The ``rule`` identifiers name small deterministic models that satisfy the
wire contracts without any ML dependency, which keeps the server testable
offline. Pretrained identifiers (``amrlib``, ``hf:<name>``) load heavyweight
libraries at startup and fail fast when those are unavailable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Protocol, Sequence

from qdamr.graph import AmrGraph, Literal, Var, parse_penman, serialize_penman
from qdamr.linear import delinearize, sequence_from_text

Context = Sequence[tuple[str, Sequence[str]]]

_WORD_RE = re.compile(r"[A-Za-z0-9][\w'.-]*")
_FRAME_SUFFIX_RE = re.compile(r"-[0-9]{2,3}$")
# tokens starting with a capital or a digit, chained into spans
_SPAN_RE = re.compile(r"\b[A-Z0-9][\w'.-]*(?:\s+[A-Z0-9][\w'.-]*)*")


class TextToGraphModel(Protocol):
    identifier: str

    def parse(self, text: str) -> str: ...


class GraphToTextModel(Protocol):
    identifier: str

    def generate(self, amr_text: str) -> str: ...


class QaModel(Protocol):
    identifier: str

    def answer(self, question: str, context: Context) -> tuple[str, float, tuple[str, int]]: ...


class RuleBasedParser:
    """Deterministic stand-in parser: the question becomes a named topic."""

    identifier = "rule"

    def parse(self, text: str) -> str:
        words = _WORD_RE.findall(text)[:8]
        concepts = {"q": "thing", "u": "amr-unknown"}
        edges = [("q", ":domain", Var("u"))]
        if words:
            concepts["n"] = "name"
            edges.append(("q", ":topic", Var("n")))
            edges.extend(("n", f":op{i + 1}", Literal(w)) for i, w in enumerate(words))
        return serialize_penman(AmrGraph("q", concepts, edges))


class RuleBasedGenerator:
    """Deterministic stand-in generator: read the graph back as a question."""

    identifier = "rule"

    def generate(self, amr_text: str) -> str:
        graph = delinearize(sequence_from_text(amr_text))
        parts: list[str] = []
        for var in graph.concepts:
            concept = graph.concepts[var]
            if concept in ("amr-unknown", "name", "thing"):
                continue
            parts.append(_FRAME_SUFFIX_RE.sub("", concept))
        parts.extend(
            t.value for _, _, t in graph.edges if isinstance(t, Literal)
        )
        body = " ".join(parts) if parts else "it"
        return f"What is {body}?"


class RuleBasedQa:
    """Deterministic stand-in QA: overlap retrieval plus a capitalized span."""

    identifier = "rule"

    def answer(self, question: str, context: Context) -> tuple[str, float, tuple[str, int]]:
        q_tokens = {w.lower() for w in _WORD_RE.findall(question)}
        best: tuple[int, int, int] | None = None  # (-overlap, para, sent)
        flat: list[tuple[str, int, str]] = []
        for p, (title, sentences) in enumerate(context):
            for i, sentence in enumerate(sentences):
                flat.append((title, i, sentence))
                s_tokens = {w.lower() for w in _WORD_RE.findall(sentence)}
                overlap = len(q_tokens & s_tokens)
                key = (-overlap, p, i)
                if best is None or key < best:
                    best = key
                    chosen = (title, i, sentence, overlap)
        if best is None:
            raise ValueError("context has no sentences")
        title, index, sentence, overlap = chosen
        spans = [m.group(0) for m in _SPAN_RE.finditer(sentence)]
        inner = [s for s in spans if not sentence.startswith(s)]
        pool = inner or spans
        if pool:
            answer = max(pool, key=lambda s: (len(s.split()), len(s), -sentence.index(s)))
        else:
            answer = sentence.split()[0]
        score = min(1.0, overlap / max(1, len(q_tokens)))
        return answer, score, (title, index)


def _require(identifier: str, module: str) -> None:
    try:
        __import__(module)
    except ImportError as exc:
        raise RuntimeError(
            f"model '{identifier}' requires the optional dependency '{module}', "
            "which is not installed"
        ) from exc


def _load_pretrained_parser(identifier: str) -> TextToGraphModel:
    if identifier == "amrlib":
        _require(identifier, "amrlib")
        return _AmrlibParser()
    raise ValueError(f"unknown parser model '{identifier}'")


class _AmrlibParser:
    identifier = "amrlib"

    def __init__(self):
        import amrlib

        self._model = amrlib.load_stog_model()

    def parse(self, text: str) -> str:
        graphs = self._model.parse_sents([text])
        penman_text = graphs[0].split("\n", 1)[-1]
        parse_penman(penman_text)
        return penman_text


class _AmrlibGenerator:
    identifier = "amrlib"

    def __init__(self):
        import amrlib

        self._model = amrlib.load_gtos_model()

    def generate(self, amr_text: str) -> str:
        graph = delinearize(sequence_from_text(amr_text))
        texts, _ = self._model.generate([serialize_penman(graph)])
        return texts[0]


@dataclass(frozen=True)
class ModelSet:
    parser: TextToGraphModel
    generator: GraphToTextModel
    qa: QaModel

    @property
    def identifiers(self) -> dict[str, str]:
        return {
            "parser": self.parser.identifier,
            "generator": self.generator.identifier,
            "qa": self.qa.identifier,
        }


def load_models(parser_model: str, generator_model: str, qa_model: str) -> ModelSet:
    """Instantiate all three models, failing fast on unavailable ones."""
    if parser_model == "rule":
        parser: TextToGraphModel = RuleBasedParser()
    else:
        parser = _load_pretrained_parser(parser_model)

    if generator_model == "rule":
        generator: GraphToTextModel = RuleBasedGenerator()
    elif generator_model == "amrlib":
        _require(generator_model, "amrlib")
        generator = _AmrlibGenerator()
    else:
        raise ValueError(f"unknown generator model '{generator_model}'")

    if qa_model == "rule":
        qa: QaModel = RuleBasedQa()
    else:
        raise ValueError(f"unknown QA model '{qa_model}'")

    return ModelSet(parser=parser, generator=generator, qa=qa)
