"""Rooted AMR graphs and their PENMAN text form.

A graph is a root variable, a mapping from variables to concept labels, and
an ordered list of role-labelled edges. Edge order is preserved exactly as
parsed because downstream text generation is order-sensitive. Inverse roles
(``:ARG0-of``) are stored as written; reachability always follows edges in
their stored source-to-target direction, so an inverse role needs no special
casing when walking the graph.

Graphs are immutable values: every operation returns a new graph, and every
constructed graph is validated. Sharing across threads is safe.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from qdamr.errors import GraphError, PenmanSyntaxError

__all__ = [
    "Var",
    "Const",
    "Literal",
    "NodeRef",
    "Edge",
    "AmrGraph",
    "is_inverse_role",
    "invert_role",
    "is_frame_concept",
    "parse_penman",
    "serialize_penman",
    "is_isomorphic",
    "detach_subtree",
    "find_nodes_by_concept",
    "traversal_order",
    "semantic_edges",
    "fresh_variable",
]

ROLE_RE = re.compile(r"^:[A-Za-z0-9-]+$")
FRAME_RE = re.compile(r"^[^\s()/:~]+-[0-9]{2,3}$")

# Unquoted alphabetic atoms that are constants, not variable references.
MODE_CONSTANTS = frozenset({"imperative", "expressive", "interrogative"})

AMR_UNKNOWN = "amr-unknown"


@dataclass(frozen=True)
class Var:
    """Reference to a variable defined elsewhere in the graph."""

    name: str


@dataclass(frozen=True)
class Const:
    """Unquoted constant target: numbers, ``-``, ``+``, mode values."""

    value: str


@dataclass(frozen=True)
class Literal:
    """Quoted string target, e.g. name parts. Never has outgoing edges."""

    value: str


NodeRef = Var | Const | Literal
Edge = tuple[str, str, NodeRef]


def is_inverse_role(role: str) -> bool:
    return role.endswith("-of")


def invert_role(role: str) -> str:
    """Flip a role between its forward and ``-of`` form (an involution)."""
    return role[: -len("-of")] if role.endswith("-of") else role + "-of"


def is_frame_concept(concept: str) -> bool:
    """True for predicate concepts of the ``label-NN`` frame shape."""
    return bool(FRAME_RE.match(concept))


@dataclass(frozen=True)
class AmrGraph:
    root: str
    concepts: Mapping[str, str]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "concepts", dict(self.concepts))
        object.__setattr__(self, "edges", tuple(self.edges))
        _validate(self)

    def concept(self, var: str) -> str:
        return self.concepts[var]

    def outgoing(self, var: str) -> list[Edge]:
        return [e for e in self.edges if e[0] == var]

    @property
    def variables(self) -> Iterable[str]:
        return self.concepts.keys()

    def __str__(self) -> str:
        return serialize_penman(self)


def _adjacency(g: AmrGraph) -> dict[str, list[Edge]]:
    adj: dict[str, list[Edge]] = {}
    for e in g.edges:
        adj.setdefault(e[0], []).append(e)
    return adj


def _reachable(root: str, edges: Sequence[Edge]) -> set[str]:
    adj: dict[str, list[str]] = {}
    for s, _, t in edges:
        if isinstance(t, Var):
            adj.setdefault(s, []).append(t.name)
    seen = {root}
    stack = [root]
    while stack:
        for nxt in adj.get(stack.pop(), ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def _validate(g: AmrGraph) -> None:
    if not g.concepts:
        raise GraphError("graph has no nodes")
    if g.root not in g.concepts:
        raise GraphError(f"root '{g.root}' is not a defined variable")
    for var, concept in g.concepts.items():
        if not var or not concept:
            raise GraphError(f"empty variable or concept ({var!r}: {concept!r})")
    for s, r, t in g.edges:
        if s not in g.concepts:
            raise GraphError(f"edge source '{s}' is not a defined variable")
        if not ROLE_RE.match(r):
            raise GraphError(f"invalid role label {r!r}")
        if isinstance(t, Var) and t.name not in g.concepts:
            raise GraphError(f"edge target '{t.name}' is not a defined variable")
    reachable = _reachable(g.root, g.edges)
    unreachable = [v for v in g.concepts if v not in reachable]
    if unreachable:
        raise GraphError(f"nodes unreachable from root: {', '.join(unreachable)}")


def traversal_order(g: AmrGraph) -> list[str]:
    """Variables in depth-first first-visit order, following stored edge order."""
    adj = _adjacency(g)
    order: list[str] = []
    seen: set[str] = set()

    def walk(var: str) -> None:
        seen.add(var)
        order.append(var)
        for _, _, t in adj.get(var, ()):
            if isinstance(t, Var) and t.name not in seen:
                walk(t.name)

    walk(g.root)
    return order


def semantic_edges(g: AmrGraph) -> Iterator[tuple[str, str, NodeRef, Edge]]:
    """Edges with inverse roles flipped to their forward reading.

    Yields ``(source, role, target, stored_edge)`` so callers can recover the
    stored form. Inverse roles on non-variable targets are left as written.
    """
    for e in g.edges:
        s, r, t = e
        if is_inverse_role(r) and isinstance(t, Var):
            yield t.name, invert_role(r), Var(s), e
        else:
            yield s, r, t, e


def find_nodes_by_concept(g: AmrGraph, concept: str) -> list[str]:
    """All variables carrying ``concept``, in traversal order."""
    return [v for v in traversal_order(g) if g.concepts[v] == concept]


def fresh_variable(g: AmrGraph, prefix: str = "z", taken: Iterable[str] = ()) -> str:
    used = set(g.concepts) | set(taken)
    n = 0
    while f"{prefix}{n}" in used:
        n += 1
    return f"{prefix}{n}"


# ---------------------------------------------------------------------------
# PENMAN text


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "()/":
            tokens.append((c, c, i))
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
                raise PenmanSyntaxError("unterminated string literal", i)
            tokens.append(("string", "".join(buf), i))
            i = j + 1
            continue
        j = i
        while j < n and text[j] not in '()/"' and not text[j].isspace():
            j += 1
        tokens.append(("atom", text[i:j], i))
        i = j
    return tokens


def _scan_definitions(tokens: Sequence[tuple[str, str, int]]) -> set[str]:
    defined: set[str] = set()
    for k in range(len(tokens) - 2):
        if tokens[k][0] == "(" and tokens[k + 1][0] == "atom" and tokens[k + 2][0] == "/":
            name = tokens[k + 1][1]
            if name in defined:
                raise PenmanSyntaxError(
                    f"duplicate definition of variable '{name}'", tokens[k + 1][2]
                )
            defined.add(name)
    return defined


def _classify_atom(value: str, pos: int, defined: set[str]) -> NodeRef:
    if value in defined:
        return Var(value)
    if value[0].isalpha() and value not in MODE_CONSTANTS:
        raise PenmanSyntaxError(f"reference to undefined variable '{value}'", pos)
    return Const(value)


def parse_penman(text: str) -> AmrGraph:
    """Parse PENMAN text ``( var / concept :role target ... )`` into a graph.

    Re-entrant mentions (bare variable tokens) become edges to the existing
    variable; forward references are allowed. Raises
    :class:`~qdamr.errors.PenmanSyntaxError` with the character offset on
    malformed input.
    """
    if not text or not text.strip():
        raise PenmanSyntaxError("empty input", 0)
    tokens = _tokenize(text)
    defined = _scan_definitions(tokens)
    concepts: dict[str, str] = {}
    edges: list[Edge] = []
    pos = 0

    def peek() -> tuple[str, str, int] | None:
        return tokens[pos] if pos < len(tokens) else None

    def take(kind: str, what: str) -> tuple[str, str, int]:
        nonlocal pos
        tok = peek()
        if tok is None:
            raise PenmanSyntaxError(f"unexpected end of input, expected {what}", len(text))
        if tok[0] != kind:
            raise PenmanSyntaxError(f"expected {what}, found {tok[1]!r}", tok[2])
        pos += 1
        return tok

    def parse_node() -> str:
        nonlocal pos
        take("(", "'('")
        var_tok = take("atom", "a variable name")
        take("/", "'/'")
        concept_tok = take("atom", "a concept label")
        var = var_tok[1]
        concepts[var] = concept_tok[1]
        while True:
            tok = peek()
            if tok is None:
                raise PenmanSyntaxError("unexpected end of input, expected ')'", len(text))
            if tok[0] == ")":
                pos += 1
                return var
            if tok[0] != "atom" or not tok[1].startswith(":"):
                raise PenmanSyntaxError(f"expected a role or ')', found {tok[1]!r}", tok[2])
            role = tok[1]
            if not ROLE_RE.match(role):
                raise PenmanSyntaxError(f"invalid role label {role!r}", tok[2])
            pos += 1
            target_tok = peek()
            if target_tok is None:
                raise PenmanSyntaxError("unexpected end of input after role", len(text))
            if target_tok[0] == "(":
                # the child's variable token follows its '(': record the edge
                # in surface order, before the child's own edges
                if pos + 1 < len(tokens) and tokens[pos + 1][0] == "atom":
                    edges.append((var, role, Var(tokens[pos + 1][1])))
                parse_node()
            elif target_tok[0] == "string":
                pos += 1
                edges.append((var, role, Literal(target_tok[1])))
            elif target_tok[0] == "atom":
                pos += 1
                edges.append((var, role, _classify_atom(target_tok[1], target_tok[2], defined)))
            else:
                raise PenmanSyntaxError(
                    f"expected a target, found {target_tok[1]!r}", target_tok[2]
                )

    root = parse_node()
    trailing = peek()
    if trailing is not None:
        raise PenmanSyntaxError(f"trailing input {trailing[1]!r}", trailing[2])
    return AmrGraph(root, concepts, edges)


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_penman(g: AmrGraph) -> str:
    """Deterministic single-line PENMAN text.

    Edges are emitted in stored order per node; the first mention of a
    variable is its definition site, later mentions are bare references.
    """
    adj = _adjacency(g)
    defined: set[str] = set()
    parts: list[str] = []

    def emit(var: str) -> None:
        defined.add(var)
        parts.append(f"({var} / {g.concepts[var]}")
        for _, r, t in adj.get(var, ()):
            parts.append(f" {r} ")
            if isinstance(t, Var):
                if t.name in defined:
                    parts.append(t.name)
                else:
                    emit(t.name)
            elif isinstance(t, Literal):
                parts.append(_quote(t.value))
            else:
                parts.append(t.value)
        parts.append(")")

    emit(g.root)
    return "".join(parts)


def _dfs_edge_order(g: AmrGraph) -> list[Edge]:
    """Edges ordered so that every edge's source appears before the edge."""
    adj = _adjacency(g)
    out: list[Edge] = []
    seen: set[str] = set()

    def walk(var: str) -> None:
        seen.add(var)
        for e in adj.get(var, ()):
            out.append(e)
            t = e[2]
            if isinstance(t, Var) and t.name not in seen:
                walk(t.name)

    walk(g.root)
    return out


def is_isomorphic(g1: AmrGraph, g2: AmrGraph) -> bool:
    """True iff a variable renaming maps g1 onto g2.

    The mapping must preserve the root, every concept label, every role, and
    the edge multiset.
    """
    if len(g1.concepts) != len(g2.concepts) or len(g1.edges) != len(g2.edges):
        return False
    if g1.concepts[g1.root] != g2.concepts[g2.root]:
        return False
    if sorted(g1.concepts.values()) != sorted(g2.concepts.values()):
        return False
    if (
        g1.root == g2.root
        and g1.concepts == g2.concepts
        and Counter(g1.edges) == Counter(g2.edges)
    ):
        return True

    edges1 = _dfs_edge_order(g1)
    e2list = list(g2.edges)
    used = [False] * len(e2list)
    mapping = {g1.root: g2.root}
    image = {g2.root}

    def backtrack(i: int) -> bool:
        if i == len(edges1):
            return True
        s, r, t = edges1[i]
        ms = mapping[s]
        for j, (s2, r2, t2) in enumerate(e2list):
            if used[j] or s2 != ms or r2 != r:
                continue
            if isinstance(t, Var):
                if not isinstance(t2, Var):
                    continue
                if t.name in mapping:
                    if mapping[t.name] != t2.name:
                        continue
                    used[j] = True
                    if backtrack(i + 1):
                        return True
                    used[j] = False
                else:
                    if t2.name in image or g1.concepts[t.name] != g2.concepts[t2.name]:
                        continue
                    mapping[t.name] = t2.name
                    image.add(t2.name)
                    used[j] = True
                    if backtrack(i + 1):
                        return True
                    used[j] = False
                    image.discard(t2.name)
                    del mapping[t.name]
            else:
                if t2 != t:
                    continue
                used[j] = True
                if backtrack(i + 1):
                    return True
                used[j] = False
        return False

    return backtrack(0)


def detach_subtree(g: AmrGraph, edge: Edge) -> AmrGraph:
    """Remove ``edge`` and every node left unreachable from the root."""
    edges = list(g.edges)
    try:
        edges.remove(edge)
    except ValueError:
        raise GraphError(f"edge not found: {edge!r}") from None
    reachable = _reachable(g.root, edges)
    kept = [e for e in edges if e[0] in reachable]
    concepts = {v: c for v, c in g.concepts.items() if v in reachable}
    return AmrGraph(g.root, concepts, kept)
