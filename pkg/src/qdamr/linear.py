"""Graph linearization: an invertible flattening of a graph into symbols.

The traversal walks depth-first from the root and emits an open marker, the
variable, the concept, then each (role, target) pair in stored edge order;
targets already visited become back-reference tokens. No adjacency
information is lost: ``delinearize(linearize(g))`` rebuilds the same graph.

Each token also records the edge that produced it, which lets callers map a
token span back to the sub-graph it covers (``subtree_spans``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from qdamr.errors import LinearizeError
from qdamr.graph import (
    MODE_CONSTANTS,
    AmrGraph,
    Const,
    Edge,
    Literal,
    Var,
    _adjacency,
    _quote,
)

__all__ = [
    "Token",
    "LinearSeq",
    "linearize",
    "delinearize",
    "render",
    "sequence_from_text",
    "abstract_symbols",
    "subtree_spans",
    "ENTITY_SYMBOL",
    "VARIABLE_SYMBOL",
]

OPEN = "open"
CLOSE = "close"
VAR = "var"
CONCEPT = "concept"
ROLE = "role"
REF = "ref"
CONST = "const"
LITERAL = "literal"

ENTITY_SYMBOL = "<Entity>"
VARIABLE_SYMBOL = "<Var>"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str


@dataclass(frozen=True)
class LinearSeq:
    """A token sequence plus, per token, the edge that introduced it.

    ``token_edges`` is provenance only: it never affects equality, and
    sequences built from plain text carry ``None`` entries.
    """

    tokens: tuple[Token, ...]
    token_edges: tuple[Edge | None, ...] = field(compare=False, default=())

    def __post_init__(self):
        if not self.token_edges:
            object.__setattr__(self, "token_edges", (None,) * len(self.tokens))
        if len(self.token_edges) != len(self.tokens):
            raise ValueError("token_edges must parallel tokens")

    def texts(self) -> list[str]:
        return [t.text for t in self.tokens]

    def __len__(self) -> int:
        return len(self.tokens)


def linearize(g: AmrGraph) -> LinearSeq:
    adj = _adjacency(g)
    tokens: list[Token] = []
    edges: list[Edge | None] = []
    defined: set[str] = set()

    def emit(kind: str, text: str, edge: Edge | None) -> None:
        tokens.append(Token(kind, text))
        edges.append(edge)

    def walk(var: str, entry: Edge | None) -> None:
        defined.add(var)
        emit(OPEN, "(", entry)
        emit(VAR, var, entry)
        emit(CONCEPT, g.concepts[var], entry)
        for e in adj.get(var, ()):
            _, role, target = e
            emit(ROLE, role, e)
            if isinstance(target, Var):
                if target.name in defined:
                    emit(REF, target.name, e)
                else:
                    walk(target.name, e)
            elif isinstance(target, Literal):
                emit(LITERAL, target.value, e)
            else:
                emit(CONST, target.value, e)
        emit(CLOSE, ")", entry)

    walk(g.root, None)
    return LinearSeq(tuple(tokens), tuple(edges))


def delinearize(seq: LinearSeq) -> AmrGraph:
    """Rebuild the graph a sequence came from.

    Raises :class:`~qdamr.errors.LinearizeError` on unbalanced markers or a
    back-reference to a variable the sequence never defines.
    """
    toks = seq.tokens
    pos = 0
    concepts: dict[str, str] = {}
    edges: list[tuple[str, str, object]] = []
    pending_refs: list[tuple[str, int]] = []

    def take(kind: str, what: str) -> Token:
        nonlocal pos
        if pos >= len(toks):
            raise LinearizeError(f"unexpected end of sequence, expected {what}")
        tok = toks[pos]
        if tok.kind != kind:
            raise LinearizeError(f"expected {what} at index {pos}, found {tok.kind} {tok.text!r}")
        pos += 1
        return tok

    def parse_node() -> str:
        nonlocal pos
        take(OPEN, "an open marker")
        var = take(VAR, "a variable").text
        if var in concepts:
            raise LinearizeError(f"duplicate definition of variable '{var}'")
        concepts[var] = take(CONCEPT, "a concept").text
        while pos < len(toks) and toks[pos].kind == ROLE:
            role = toks[pos].text
            pos += 1
            if pos >= len(toks):
                raise LinearizeError("unexpected end of sequence after role")
            tok = toks[pos]
            if tok.kind == OPEN:
                if pos + 1 < len(toks) and toks[pos + 1].kind == VAR:
                    edges.append((var, role, Var(toks[pos + 1].text)))
                parse_node()
            elif tok.kind in (REF, VAR):
                pending_refs.append((tok.text, len(edges)))
                edges.append((var, role, Var(tok.text)))
                pos += 1
            elif tok.kind == CONST:
                edges.append((var, role, Const(tok.text)))
                pos += 1
            elif tok.kind == LITERAL:
                edges.append((var, role, Literal(tok.text)))
                pos += 1
            else:
                raise LinearizeError(f"expected a target at index {pos}, found {tok.kind}")
        take(CLOSE, "a close marker")
        return var

    root = parse_node()
    if pos != len(toks):
        raise LinearizeError(f"trailing symbols at index {pos}")
    for name, _ in pending_refs:
        if name not in concepts:
            raise LinearizeError(f"dangling back-reference to '{name}'")
    return AmrGraph(root, concepts, edges)  # type: ignore[arg-type]


def render(seq: LinearSeq) -> str:
    """Whitespace-joined token text, suitable for backend transport."""
    parts = []
    for tok in seq.tokens:
        parts.append(_quote(tok.text) if tok.kind == LITERAL else tok.text)
    return " ".join(parts)


def sequence_from_text(text: str) -> LinearSeq:
    """Inverse of :func:`render`: re-tokenize whitespace-joined symbol text."""
    raw: list[tuple[bool, str]] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == '"':
            j = i + 1
            buf: list[str] = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    buf.append(text[j + 1])
                    j += 2
                else:
                    buf.append(text[j])
                    j += 1
            if j >= n:
                raise LinearizeError("unterminated string literal")
            raw.append((True, "".join(buf)))
            i = j + 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] != '"':
            j += 1
        raw.append((False, text[i:j]))
        i = j

    # First pass: variable names are the tokens sitting right after "(".
    defined: set[str] = set()
    for k in range(len(raw) - 1):
        if not raw[k][0] and raw[k][1] == "(" and not raw[k + 1][0]:
            defined.add(raw[k + 1][1])

    tokens: list[Token] = []
    expect: str | None = None
    for quoted, value in raw:
        if quoted:
            tokens.append(Token(LITERAL, value))
            expect = None
        elif value == "(":
            tokens.append(Token(OPEN, "("))
            expect = VAR
        elif value == ")":
            tokens.append(Token(CLOSE, ")"))
            expect = None
        elif expect == VAR:
            tokens.append(Token(VAR, value))
            expect = CONCEPT
        elif expect == CONCEPT:
            tokens.append(Token(CONCEPT, value))
            expect = None
        elif value.startswith(":"):
            tokens.append(Token(ROLE, value))
            expect = None
        elif value in defined:
            tokens.append(Token(REF, value))
            expect = None
        elif value[0].isalpha() and value not in MODE_CONSTANTS:
            # Looks like a variable but is never defined; delinearize will
            # report it as a dangling back-reference.
            tokens.append(Token(REF, value))
            expect = None
        else:
            tokens.append(Token(CONST, value))
            expect = None
    return LinearSeq(tuple(tokens))


def abstract_symbols(seq: LinearSeq) -> tuple[str, ...]:
    """Token texts with variables and quoted literals masked for matching."""
    out: list[str] = []
    for tok in seq.tokens:
        if tok.kind in (VAR, REF):
            out.append(VARIABLE_SYMBOL)
        elif tok.kind == LITERAL:
            out.append(ENTITY_SYMBOL)
        else:
            out.append(tok.text)
    return tuple(out)


@dataclass(frozen=True)
class SubtreeSpan:
    edge: Edge
    open_index: int
    close_index: int
    depth: int


def subtree_spans(seq: LinearSeq) -> list[SubtreeSpan]:
    """Token span of each sub-graph entered through an edge.

    Only edges that introduce a nested subtree appear; back-references and
    leaf targets have no span.
    """
    spans: list[SubtreeSpan] = []
    stack: list[tuple[int, Edge | None]] = []
    for i, tok in enumerate(seq.tokens):
        if tok.kind == OPEN:
            stack.append((i, seq.token_edges[i]))
        elif tok.kind == CLOSE:
            if not stack:
                raise LinearizeError(f"unbalanced close marker at index {i}")
            open_index, edge = stack.pop()
            if edge is not None:
                spans.append(SubtreeSpan(edge, open_index, i, len(stack)))
    if stack:
        raise LinearizeError("unbalanced open marker")
    spans.sort(key=lambda sp: sp.open_index)
    return spans
