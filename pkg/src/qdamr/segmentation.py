"""Split a question graph into two sub-question graphs.

Bridging questions are segmented around the secondary unknown: the clause
that does not contain the primary unknown becomes its own question asking
for the bridge entity. Intersection and comparison questions are segmented
by locating the longest repeated path in the linearized graph and cutting
one parallel branch at a time.

All functions are pure; input graphs are never mutated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from qdamr.errors import (
    NoParallelStructureError,
    SegmentationError,
    UndecomposableError,
    UntypeableQuestionError,
)
from qdamr.graph import (
    AMR_UNKNOWN,
    AmrGraph,
    Edge,
    Var,
    detach_subtree,
    find_nodes_by_concept,
    fresh_variable,
    invert_role,
    is_frame_concept,
    semantic_edges,
    traversal_order,
)
from qdamr.linear import LinearSeq, SubtreeSpan, abstract_symbols, subtree_spans

__all__ = [
    "SubgraphRole",
    "PathOccurrence",
    "SegmentationResult",
    "find_secondary_unknown",
    "unknowns_based_segmentation",
    "longest_repeated_run",
    "longest_identical_path",
    "path_based_segmentation",
    "MIN_PATH_LENGTH",
]

_ARG_ROLE_RE = re.compile(r"^:ARG[0-9]+$", re.IGNORECASE)
_OP_ROLE_RE = re.compile(r"^:op[0-9]+$", re.IGNORECASE)
_SUBJECT_ROLE = ":ARG0"

MIN_PATH_LENGTH = 2


class SubgraphRole(str, Enum):
    SECONDARY_UNKNOWN_HOLDER = "secondary_unknown_holder"
    PRIMARY_REMAINDER = "primary_remainder"
    PARALLEL_BRANCH = "parallel_branch"
    SINGLE_HOP = "single_hop"


@dataclass(frozen=True)
class PathOccurrence:
    """A repeated token run and where each copy attaches to the graph."""

    symbols: tuple[str, ...]
    occurrences: tuple[tuple[int, int], ...]
    anchor_edges: tuple[Edge, ...]


@dataclass(frozen=True)
class SegmentationResult:
    subgraphs: tuple[AmrGraph, AmrGraph]
    roles: tuple[SubgraphRole, SubgraphRole]
    bridge_variable: str | None = None


# ---------------------------------------------------------------------------
# Bridging: unknowns-based segmentation


def _sole_unknown(g: AmrGraph) -> str:
    unknowns = find_nodes_by_concept(g, AMR_UNKNOWN)
    if len(unknowns) != 1:
        raise UntypeableQuestionError(
            f"expected exactly one {AMR_UNKNOWN} node, found {len(unknowns)}"
        )
    return unknowns[0]


def _undirected_components(g: AmrGraph, removed: str) -> dict[str, int]:
    """Component id per variable once ``removed`` and its edges are dropped."""
    nodes = [v for v in g.concepts if v != removed]
    adj: dict[str, list[str]] = {v: [] for v in nodes}
    for s, _, t in g.edges:
        if not isinstance(t, Var):
            continue
        if s == removed or t.name == removed:
            continue
        adj[s].append(t.name)
        adj[t.name].append(s)
    comp: dict[str, int] = {}
    next_id = 0
    for start in nodes:
        if start in comp:
            continue
        comp[start] = next_id
        stack = [start]
        while stack:
            for nxt in adj[stack.pop()]:
                if nxt not in comp:
                    comp[nxt] = next_id
                    stack.append(nxt)
        next_id += 1
    return comp


def _hop_distance(g: AmrGraph, source: str, target: str) -> int:
    adj: dict[str, set[str]] = {v: set() for v in g.concepts}
    for s, _, t in g.edges:
        if isinstance(t, Var):
            adj[s].add(t.name)
            adj[t.name].add(s)
    frontier = {source}
    seen = {source}
    dist = 0
    while frontier:
        if target in frontier:
            return dist
        frontier = {n for v in frontier for n in adj[v]} - seen
        seen |= frontier
        dist += 1
    return len(g.concepts) + 1


def find_secondary_unknown(g: AmrGraph) -> str:
    """Pick the bridge variable of a bridging question.

    Candidates are unnamed ``:ARG0`` subjects of predicate nodes, excluding
    the primary unknown. The winner is the candidate attached to the most
    predicates (at least two), ties broken by hop distance to the unknown,
    then by traversal order. Raises
    :class:`~qdamr.errors.UndecomposableError` when no candidate qualifies.
    """
    unknown = _sole_unknown(g)
    predicates = {v for v, c in g.concepts.items() if is_frame_concept(c)}

    named: set[str] = set()
    subjects: set[str] = set()
    attached: dict[str, set[str]] = {}
    for s, r, t, _ in semantic_edges(g):
        if r == ":name":
            named.add(s)
        if s in predicates and isinstance(t, Var) and _ARG_ROLE_RE.match(r):
            attached.setdefault(t.name, set()).add(s)
            if r.upper() == _SUBJECT_ROLE:
                subjects.add(t.name)

    candidates = [v for v in subjects if v != unknown and v not in named]
    if not candidates:
        raise UndecomposableError("no secondary unknown candidate")
    best_score = max(len(attached[v]) for v in candidates)
    if best_score < 2:
        raise UndecomposableError(
            "no candidate is an argument of two or more predicates"
        )
    order = {v: i for i, v in enumerate(traversal_order(g))}
    pool = [v for v in candidates if len(attached[v]) == best_score]
    pool.sort(key=lambda v: (_hop_distance(g, v, unknown), order[v]))
    return pool[0]


def _extract(g: AmrGraph, root: str, concepts: dict[str, str], edges: list[Edge]) -> AmrGraph:
    """Build a graph from a node/edge selection, re-oriented to hang from ``root``.

    An edge traversed against its stored direction is flipped to its inverse
    role so the result is reachable from the new root; edges between two
    already-visited nodes keep their stored form.
    """
    incident: dict[str, list[tuple[int, Edge]]] = {v: [] for v in concepts}
    for i, e in enumerate(edges):
        s, _, t = e
        incident[s].append((i, e))
        if isinstance(t, Var) and t.name != s:
            incident[t.name].append((i, e))

    out: list[Edge] = []
    used: set[int] = set()
    visited: set[str] = set()

    def walk(var: str) -> None:
        visited.add(var)
        for eid, e in incident[var]:
            if eid in used:
                continue
            s, r, t = e
            used.add(eid)
            if s == var:
                out.append(e)
                if isinstance(t, Var) and t.name not in visited:
                    walk(t.name)
            else:
                # entered from the target side: flip so the source is `var`
                out.append((var, invert_role(r), Var(s)))
                if s not in visited:
                    walk(s)

    walk(root)
    if len(used) != len(edges) or len(visited) != len(concepts):
        raise SegmentationError("selected clause is not connected")
    return AmrGraph(root, concepts, out)


def unknowns_based_segmentation(g: AmrGraph, secondary_unknown: str) -> SegmentationResult:
    """Segment a bridging question around its secondary unknown.

    The first sub-graph is the clause that does not contain the primary
    unknown, re-rooted at its predicate, with a bare copy of the bridge node
    marked as the asked-for entity. The second is the remainder of the
    graph, with the bridge node kept as a placeholder.
    """
    if secondary_unknown not in g.concepts:
        raise SegmentationError(f"unknown variable '{secondary_unknown}'")
    unknown = _sole_unknown(g)
    attach_edges: list[tuple[str, Edge]] = []
    for s, r, t, stored in semantic_edges(g):
        if (
            isinstance(t, Var)
            and t.name == secondary_unknown
            and _ARG_ROLE_RE.match(r)
            and is_frame_concept(g.concepts[s])
        ):
            attach_edges.append((s, stored))
    if not attach_edges:
        raise SegmentationError("secondary unknown has no predicate attachment")

    comp = _undirected_components(g, secondary_unknown)
    unknown_comp = comp[unknown]
    detachable = [(p, e) for p, e in attach_edges if comp[p] != unknown_comp]
    if not detachable:
        raise SegmentationError("every clause of the secondary unknown contains the primary unknown")
    pred, attach = detachable[0]
    clause = {v for v in comp if comp[v] == comp[pred]}

    bridge_concept = g.concepts[secondary_unknown]
    new_unknown = fresh_variable(g)
    g1_concepts = {v: g.concepts[v] for v in g.concepts if v in clause}
    g1_concepts[secondary_unknown] = bridge_concept
    g1_concepts[new_unknown] = AMR_UNKNOWN
    g1_edges: list[Edge] = [attach, (secondary_unknown, ":domain", Var(new_unknown))]
    g1_edges.extend(
        e
        for e in g.edges
        if e[0] in clause and (not isinstance(e[2], Var) or e[2].name in clause)
    )
    g1 = _extract(g, pred, g1_concepts, g1_edges)

    keep = {v for v in g.concepts if v not in clause}
    g2_concepts = {v: g.concepts[v] for v in g.concepts if v in keep}
    g2_edges = [
        e
        for e in g.edges
        if e is not attach
        and e[0] in keep
        and (not isinstance(e[2], Var) or e[2].name in keep)
    ]
    if g.root in keep:
        g2_root = g.root
    else:
        unknown_side = [p for p, _ in attach_edges if p in keep and comp[p] == unknown_comp]
        other_side = [p for p, _ in attach_edges if p in keep]
        g2_root = (unknown_side or other_side or [secondary_unknown])[0]
    g2 = _extract(g, g2_root, g2_concepts, g2_edges)

    for sub in (g1, g2):
        if len(find_nodes_by_concept(sub, AMR_UNKNOWN)) != 1:
            raise SegmentationError("segmentation did not yield exactly one unknown per sub-graph")
    return SegmentationResult(
        subgraphs=(g1, g2),
        roles=(SubgraphRole.SECONDARY_UNKNOWN_HOLDER, SubgraphRole.PRIMARY_REMAINDER),
        bridge_variable=secondary_unknown,
    )


# ---------------------------------------------------------------------------
# Intersection / comparison: path-based segmentation


def longest_repeated_run(
    symbols: Sequence[str], min_len: int = MIN_PATH_LENGTH
) -> tuple[int, list[int]] | None:
    """Longest token run occurring at least twice without overlap.

    Returns ``(length, starts)`` where ``starts`` are the greedy
    left-to-right non-overlapping occurrences of the winning run, or ``None``
    when nothing of the minimum length repeats. Ties on length are broken by
    the earliest first occurrence, then the earliest second occurrence.
    """
    syms = list(symbols)
    n = len(syms)

    def best_pair(length: int) -> tuple[int, int] | None:
        first: dict[tuple[str, ...], int] = {}
        best: tuple[int, int] | None = None
        for k in range(n - length + 1):
            window = tuple(syms[k : k + length])
            start = first.setdefault(window, k)
            if start != k and k >= start + length:
                cand = (start, k)
                if best is None or cand < best:
                    best = cand
        return best

    lo, hi = min_len, n // 2
    best_len = None
    while lo <= hi:
        mid = (lo + hi) // 2
        if best_pair(mid) is not None:
            best_len = mid
            lo = mid + 1
        else:
            hi = mid - 1
    if best_len is None:
        return None
    i, _ = best_pair(best_len)  # type: ignore[misc]
    run = tuple(syms[i : i + best_len])
    starts: list[int] = []
    k = 0
    while k + best_len <= n:
        if tuple(syms[k : k + best_len]) == run:
            starts.append(k)
            k += best_len
        else:
            k += 1
    return best_len, starts


def _anchor_edge(
    spans: list[SubtreeSpan],
    occurrence: tuple[int, int],
    others: list[tuple[int, int]],
) -> Edge:
    start, length = occurrence
    end = start + length  # exclusive
    inside = [sp for sp in spans if start <= sp.open_index < end]
    if not inside:
        raise NoParallelStructureError("repeated path contains no detachable branch")
    anchor = min(inside, key=lambda sp: (sp.depth, sp.open_index))

    def overlaps_other(sp: SubtreeSpan) -> bool:
        return any(
            sp.open_index <= o_start + o_len - 1 and o_start <= sp.close_index
            for o_start, o_len in others
        )

    while True:
        parents = [
            sp
            for sp in spans
            if sp.open_index < anchor.open_index and sp.close_index > anchor.close_index
        ]
        if not parents:
            break
        parent = max(parents, key=lambda sp: sp.depth)
        if overlaps_other(parent):
            break
        anchor = parent
    return anchor.edge


def longest_identical_path(seq: LinearSeq, min_len: int = MIN_PATH_LENGTH) -> PathOccurrence:
    """Longest repeated run in the abstracted linearization, with anchors.

    Variables and quoted literals are masked before matching so that two
    branches mentioning different entities still align. Each occurrence is
    anchored at the highest edge whose subtree starts inside the occurrence
    and stays clear of every other occurrence: detaching that edge removes
    the occurrence's branch and nothing shared.
    """
    symbols = abstract_symbols(seq)
    found = longest_repeated_run(symbols, min_len)
    if found is None:
        raise NoParallelStructureError(
            f"no repeated run of length >= {min_len} in the linearization"
        )
    length, starts = found
    occurrences = tuple((s, length) for s in starts)
    spans = subtree_spans(seq)
    anchors = []
    for occ in occurrences:
        others = [o for o in occurrences if o != occ]
        anchors.append(_anchor_edge(spans, occ, others))
    return PathOccurrence(
        symbols=tuple(symbols[starts[0] : starts[0] + length]),
        occurrences=occurrences,
        anchor_edges=tuple(anchors),
    )


def _renumber_ops(g: AmrGraph, source: str) -> AmrGraph:
    """Re-sequence a conjunction's surviving ``:opN`` edges from 1."""
    k = 0
    edges: list[Edge] = []
    for e in g.edges:
        if e[0] == source and _OP_ROLE_RE.match(e[1]):
            k += 1
            edges.append((e[0], f":op{k}", e[2]))
        else:
            edges.append(e)
    return AmrGraph(g.root, g.concepts, edges)


def _detach_branch(g: AmrGraph, anchor: Edge) -> AmrGraph:
    out = detach_subtree(g, anchor)
    if _OP_ROLE_RE.match(anchor[1]) and anchor[0] in out.concepts:
        out = _renumber_ops(out, anchor[0])
    return out


def path_based_segmentation(g: AmrGraph, path: PathOccurrence) -> SegmentationResult:
    """Cut one parallel branch at a time: sub-graph k keeps occurrence k.

    ``path`` must come from the linearization of ``g``. When the cut edge is
    a conjunction operand, the surviving operands are renumbered from
    ``:op1`` so fully parallel questions yield isomorphic sub-graphs.
    """
    if len(path.occurrences) != 2:
        raise SegmentationError(
            f"expected exactly 2 parallel branches, found {len(path.occurrences)}"
        )
    g1 = _detach_branch(g, path.anchor_edges[1])
    g2 = _detach_branch(g, path.anchor_edges[0])
    for sub in (g1, g2):
        if len(find_nodes_by_concept(sub, AMR_UNKNOWN)) != 1:
            raise SegmentationError("detaching a parallel branch would remove the question unknown")
    return SegmentationResult(
        subgraphs=(g1, g2),
        roles=(SubgraphRole.PARALLEL_BRANCH, SubgraphRole.PARALLEL_BRANCH),
    )
