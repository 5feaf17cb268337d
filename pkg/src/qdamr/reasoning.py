"""Classify a question graph as bridging, intersection, or comparison.

The decision is purely structural, driven by concepts and roles, so it is
invariant under variable renaming. The trigger concepts live in a line
oriented lexicon file (``<type> <concept>``) so annotation behaviour can be
tuned without code changes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources

from qdamr.errors import UntypeableQuestionError
from qdamr.graph import (
    AMR_UNKNOWN,
    AmrGraph,
    Var,
    find_nodes_by_concept,
    is_frame_concept,
    semantic_edges,
)

__all__ = ["ReasoningType", "TypeLexicon", "load_lexicon", "default_lexicon", "classify"]

_OP_ROLE_RE = re.compile(r"^:op[0-9]+$", re.IGNORECASE)

_LEXICON_TYPES = ("comparison", "comparison-root", "degree", "conjunction", "intersection")


class ReasoningType(str, Enum):
    BRIDGING = "bridging"
    INTERSECTION = "intersection"
    COMPARISON = "comparison"


@dataclass(frozen=True)
class TypeLexicon:
    comparison_concepts: frozenset[str]
    comparison_roots: frozenset[str]
    degree_words: frozenset[str]
    conjunctions: frozenset[str]
    intersection_markers: frozenset[str]


def load_lexicon(path: str) -> TypeLexicon:
    with open(path, encoding="utf-8") as fh:
        return _parse_lexicon(fh.read(), source=path)


def _parse_lexicon(text: str, source: str = "<lexicon>") -> TypeLexicon:
    buckets: dict[str, set[str]] = {t: set() for t in _LEXICON_TYPES}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2 or parts[0] not in buckets:
            raise ValueError(f"{source}:{lineno}: expected '<type> <concept>', got {line!r}")
        buckets[parts[0]].add(parts[1])
    return TypeLexicon(
        comparison_concepts=frozenset(buckets["comparison"]),
        comparison_roots=frozenset(buckets["comparison-root"]),
        degree_words=frozenset(buckets["degree"]),
        conjunctions=frozenset(buckets["conjunction"]),
        intersection_markers=frozenset(buckets["intersection"]),
    )


@lru_cache(maxsize=1)
def default_lexicon() -> TypeLexicon:
    text = resources.files("qdamr").joinpath("data/type_lexicon.txt").read_text("utf-8")
    return _parse_lexicon(text, source="qdamr/data/type_lexicon.txt")


def _subtree_vars(g: AmrGraph, start: str) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        var = stack.pop()
        for _, _, t in g.outgoing(var):
            if isinstance(t, Var) and t.name not in seen:
                seen.add(t.name)
                stack.append(t.name)
    return seen


def _has_degree_edge(g: AmrGraph, degree_words: frozenset[str]) -> bool:
    for s, r, t, _ in semantic_edges(g):
        if r == ":degree" and isinstance(t, Var) and g.concepts[t.name] in degree_words:
            return True
    return False


def _polarity_unknown(g: AmrGraph, unknown: str) -> bool:
    return any(
        r == ":polarity" and isinstance(t, Var) and t.name == unknown
        for _, r, t, _ in semantic_edges(g)
    )


def _parallel_predicate_branches(g: AmrGraph, unknown: str, lex: TypeLexicon) -> bool:
    for var, concept in g.concepts.items():
        if concept not in lex.conjunctions:
            continue
        branches = [
            t.name
            for s, r, t, _ in semantic_edges(g)
            if s == var and _OP_ROLE_RE.match(r) and isinstance(t, Var)
        ]
        if len(branches) < 2:
            continue
        subtrees = [_subtree_vars(g, b) for b in branches]
        if any(unknown in sub for sub in subtrees):
            continue
        if all(any(is_frame_concept(g.concepts[v]) for v in sub) for sub in subtrees):
            return True
    return False


def classify(g: AmrGraph, lexicon: TypeLexicon | None = None) -> ReasoningType:
    """Reasoning type of a question graph.

    The graph must contain exactly one primary unknown node; anything else
    raises :class:`~qdamr.errors.UntypeableQuestionError`.
    """
    unknowns = find_nodes_by_concept(g, AMR_UNKNOWN)
    if len(unknowns) != 1:
        raise UntypeableQuestionError(
            f"expected exactly one {AMR_UNKNOWN} node, found {len(unknowns)}"
        )
    unknown = unknowns[0]
    lex = lexicon or default_lexicon()

    if any(c in lex.comparison_concepts for c in g.concepts.values()):
        return ReasoningType.COMPARISON
    if _has_degree_edge(g, lex.degree_words):
        return ReasoningType.COMPARISON
    if g.concepts[g.root] in lex.comparison_roots:
        return ReasoningType.COMPARISON

    has_marker = any(c in lex.intersection_markers for c in g.concepts.values())
    has_conjunction = any(c in lex.conjunctions for c in g.concepts.values())
    if _polarity_unknown(g, unknown) and (has_marker or has_conjunction):
        return ReasoningType.INTERSECTION
    if _parallel_predicate_branches(g, unknown, lex):
        return ReasoningType.INTERSECTION

    return ReasoningType.BRIDGING
