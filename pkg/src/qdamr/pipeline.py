"""End-to-end orchestration: decompose, order, answer, substitute, combine.

A multi-hop question is parsed to a graph, classified, segmented, and its
sub-questions generated and answered in the order the reasoning type
demands. Bridging answers the secondary sub-question first and substitutes
its answer into the primary one; intersection answers both branches and
intersects; comparison answers both branches and applies a discrete
operation, recording the constructed third question in the trace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources

from qdamr.backends import Answer, Backend, Context
from qdamr.errors import (
    BackendError,
    GraphError,
    NoParallelStructureError,
    OpEvaluationError,
    PipelineStageError,
    UndecomposableError,
    UnsupportedComparisonError,
)
from qdamr.graph import (
    AMR_UNKNOWN,
    AmrGraph,
    Edge,
    Literal,
    Var,
    find_nodes_by_concept,
    fresh_variable,
    semantic_edges,
)
from qdamr.linear import linearize
from qdamr.metrics import normalize_answer
from qdamr.reasoning import ReasoningType, TypeLexicon, classify
from qdamr.segmentation import (
    SubgraphRole,
    find_secondary_unknown,
    longest_identical_path,
    path_based_segmentation,
    unknowns_based_segmentation,
)

__all__ = [
    "OpKind",
    "ValueDomain",
    "DiscreteOp",
    "SubQuestion",
    "Decomposition",
    "TraceStep",
    "ReasoningTrace",
    "decompose",
    "substitute_answer",
    "find_operation",
    "construct_op_question",
    "eval_discrete_op",
    "answer_multihop",
    "collect_evidence",
    "trace_to_dict",
    "parse_date",
    "parse_number",
]


class OpKind(str, Enum):
    SMALLER_OF = "smaller_of"
    LARGER_OF = "larger_of"
    SAME_ENTITY_YES_NO = "same_entity_yes_no"
    INTERSECT_SETS = "intersect_sets"


class ValueDomain(str, Enum):
    DATE = "date"
    NUMBER = "number"
    STRING = "string"


@dataclass(frozen=True)
class DiscreteOp:
    kind: OpKind
    domain: ValueDomain
    subjects: tuple[str, str]

    def __post_init__(self):
        if self.kind in (OpKind.SMALLER_OF, OpKind.LARGER_OF) and self.domain not in (
            ValueDomain.DATE,
            ValueDomain.NUMBER,
        ):
            raise ValueError(f"{self.kind.value} requires a date or number domain")


@dataclass(frozen=True)
class SubQuestion:
    graph: AmrGraph
    text: str
    role: SubgraphRole


@dataclass(frozen=True)
class Decomposition:
    question: str
    reasoning_type: ReasoningType
    sub_questions: tuple[SubQuestion, ...]
    op: DiscreteOp | None = None
    bridge_variable: str | None = None
    fallback: bool = False


@dataclass(frozen=True)
class TraceStep:
    sub_question: str
    answer: str
    evidence: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class ReasoningTrace:
    question: str
    reasoning_type: ReasoningType
    steps: tuple[TraceStep, ...]
    final_answer: str
    third_question: str | None = None
    fallback: bool = False


# ---------------------------------------------------------------------------
# Discrete operations

_MONTHS = {
    name: i + 1
    for i, name in enumerate(
        (
            "january",
            "february",
            "march",
            "april",
            "may",
            "june",
            "july",
            "august",
            "september",
            "october",
            "november",
            "december",
        )
    )
}
_MONTH_ALT = "|".join(_MONTHS)
_MDY_RE = re.compile(rf"\b({_MONTH_ALT})\s+(\d{{1,2}})(?:st|nd|rd|th)?\s*,?\s+(\d{{3,4}})\b", re.I)
_DMY_RE = re.compile(rf"\b(\d{{1,2}})(?:st|nd|rd|th)?\s+({_MONTH_ALT})\s*,?\s+(\d{{3,4}})\b", re.I)
_YEAR_RE = re.compile(r"\b(\d{3,4})\b")
_NUMBER_RE = re.compile(r"-?\d[\d,]*(?:\.\d+)?")


def parse_date(text: str) -> tuple[int, int, int] | None:
    """(year, month, day) found anywhere in ``text``, or None."""
    m = _MDY_RE.search(text)
    if m:
        return int(m.group(3)), _MONTHS[m.group(1).lower()], int(m.group(2))
    m = _DMY_RE.search(text)
    if m:
        return int(m.group(3)), _MONTHS[m.group(2).lower()], int(m.group(1))
    m = _YEAR_RE.search(text)
    if m:
        return int(m.group(1)), 1, 1
    return None


def parse_number(text: str) -> float | None:
    m = _NUMBER_RE.search(text)
    if m is None:
        return None
    return float(m.group(0).replace(",", ""))


def _answer_set(text: str) -> set[str]:
    parts = re.split(r",|;|\band\b", text)
    return {normalize_answer(p) for p in parts if normalize_answer(p)}


def eval_discrete_op(op: DiscreteOp, answer1: str, answer2: str) -> str:
    """Apply ``op`` to two sub-answers.

    Ordering operations return the subject entity whose answer holds the
    selected value; unparseable values raise
    :class:`~qdamr.errors.OpEvaluationError` so the caller can fall back to
    asking the constructed question instead.
    """
    if op.kind in (OpKind.SMALLER_OF, OpKind.LARGER_OF):
        parse = parse_date if op.domain == ValueDomain.DATE else parse_number
        values = (parse(answer1), parse(answer2))
        if values[0] is None or values[1] is None:
            bad = answer1 if values[0] is None else answer2
            raise OpEvaluationError(f"cannot read a {op.domain.value} from {bad!r}")
        if op.kind == OpKind.SMALLER_OF:
            index = 0 if values[0] <= values[1] else 1
        else:
            index = 0 if values[0] >= values[1] else 1
        return op.subjects[index]
    if op.kind == OpKind.SAME_ENTITY_YES_NO:
        n1, n2 = normalize_answer(answer1), normalize_answer(answer2)
        return "yes" if n1 and n1 == n2 else "no"
    shared = _answer_set(answer1) & _answer_set(answer2)
    return ", ".join(sorted(shared)) if shared else "no"


_OP_TEMPLATES = {
    OpKind.SMALLER_OF: "Which is smaller ({0})({1})?",
    OpKind.LARGER_OF: "Which is larger ({0})({1})?",
    OpKind.SAME_ENTITY_YES_NO: "Is ({0}) the same as ({1})?",
    OpKind.INTERSECT_SETS: "What is shared by ({0}) and ({1})?",
}


def construct_op_question(op: DiscreteOp, answer1: str, answer2: str) -> str:
    return _OP_TEMPLATES[op.kind].format(answer1, answer2)


@lru_cache(maxsize=1)
def _default_op_table() -> tuple[tuple[OpKind, ValueDomain, str], ...]:
    text = resources.files("qdamr").joinpath("data/op_keywords.txt").read_text("utf-8")
    return _parse_op_table(text)


def _parse_op_table(text: str) -> tuple[tuple[OpKind, ValueDomain, str], ...]:
    rows: list[tuple[OpKind, ValueDomain, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"op table line {lineno}: expected '<op> <domain> <keyword>'")
        rows.append((OpKind(parts[0]), ValueDomain(parts[1]), parts[2].lower()))
    return tuple(rows)


_PAIR_AFTER_COMMA_RE = re.compile(r",\s*(.+?)\s+(?:or|and)\s+(.+?)\s*\??$")
_PAIR_BOTH_RE = re.compile(
    r"\bboth\s+(.+?)\s+and\s+(.+?)(?:\s+(?:from|in|of|at|on|for)\b|\s*\?|$)", re.I
)


def _entities_from_text(question: str) -> tuple[str, str]:
    m = _PAIR_AFTER_COMMA_RE.search(question)
    if m:
        return m.group(1), m.group(2)
    m = _PAIR_BOTH_RE.search(question)
    if m:
        return m.group(1), m.group(2)
    return "", ""


def find_operation(
    question: str,
    entities: tuple[str, str] | None = None,
    table: tuple[tuple[OpKind, ValueDomain, str], ...] | None = None,
) -> DiscreteOp:
    """Keyword-table lookup of the discrete operation a comparison needs.

    ``entities`` should be the two entity strings from the parallel
    branches; when absent they are guessed from the question text.
    """
    tokens = set(re.findall(r"[a-z]+", question.lower()))
    for kind, domain, keyword in table or _default_op_table():
        if keyword in tokens:
            subjects = entities if entities is not None else _entities_from_text(question)
            return DiscreteOp(kind, domain, subjects)
    raise UnsupportedComparisonError(f"no comparison keyword in {question!r}")


# ---------------------------------------------------------------------------
# Graph rewriting


def substitute_answer(g: AmrGraph, bridge_variable: str, answer_text: str) -> AmrGraph:
    """Replace the bridge node's subtree with a named entity for the answer.

    The node keeps its variable and concept; its outgoing subtree is dropped
    and a ``:name`` node carrying the answer tokens as ``:opN`` literals is
    attached.
    """
    if bridge_variable not in g.concepts:
        raise GraphError(f"bridge variable '{bridge_variable}' is not in the graph")
    if bridge_variable == g.root:
        raise GraphError("cannot substitute at the root node")
    tokens = [tok.strip(",;") for tok in answer_text.split()]
    tokens = [tok for tok in tokens if tok]
    if not tokens:
        raise GraphError("answer text has no tokens to substitute")

    remaining = [e for e in g.edges if e[0] != bridge_variable]
    reachable = _reachable_vars(g.root, remaining)
    if bridge_variable not in reachable:
        raise GraphError("bridge node would be orphaned by substitution")
    kept = [e for e in remaining if e[0] in reachable]
    concepts = {v: c for v, c in g.concepts.items() if v in reachable}

    name_var = fresh_variable(g)
    concepts[name_var] = "name"
    kept.append((bridge_variable, ":name", Var(name_var)))
    kept.extend((name_var, f":op{i + 1}", Literal(tok)) for i, tok in enumerate(tokens))
    result = AmrGraph(g.root, concepts, kept)
    if len(find_nodes_by_concept(result, AMR_UNKNOWN)) != 1:
        raise GraphError("substitution must leave exactly one unknown")
    return result


def _reachable_vars(root: str, edges: list[Edge]) -> set[str]:
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


def _branch_entity(g: AmrGraph, anchor: Edge) -> str:
    """Name literals under an anchored branch, joined; falls back to the concept."""
    target = anchor[2]
    if not isinstance(target, Var):
        return str(getattr(target, "value", target))
    branch_vars = _reachable_vars(target.name, list(g.edges)) | {target.name}
    parts = [
        t.value
        for s, r, t in g.edges
        if s in branch_vars and isinstance(t, Literal) and g.concepts.get(s) == "name"
    ]
    return " ".join(parts) if parts else g.concepts[target.name]


def _is_polarity_question(g: AmrGraph) -> bool:
    return any(
        r == ":polarity" and isinstance(t, Var) and g.concepts[t.name] == AMR_UNKNOWN
        for _, r, t, _ in semantic_edges(g)
    )


# ---------------------------------------------------------------------------
# Orchestration


def _stage(stage: str, fn, *args):
    try:
        return fn(*args)
    except BackendError as exc:
        raise PipelineStageError(stage, exc) from exc


def decompose(
    question: str,
    backend: Backend,
    lexicon: TypeLexicon | None = None,
) -> Decomposition:
    """Decompose a multi-hop question into ordered sub-questions.

    Bridging questions without a secondary unknown candidate, and questions
    without parallel structure, degrade to a single-hop decomposition
    flagged ``fallback`` instead of failing.
    """
    if not question or not question.strip():
        raise ValueError("question must be nonempty")
    g = _stage("parse-question", backend.parse_text, question)
    reasoning_type = classify(g, lexicon)

    if reasoning_type == ReasoningType.BRIDGING:
        try:
            bridge = find_secondary_unknown(g)
        except UndecomposableError:
            return _single_hop(question, g, reasoning_type)
        result = unknowns_based_segmentation(g, bridge)
        op = None
        entities = None
    else:
        try:
            path = longest_identical_path(linearize(g))
        except NoParallelStructureError:
            return _single_hop(question, g, reasoning_type)
        result = path_based_segmentation(g, path)
        entities = (
            _branch_entity(g, path.anchor_edges[0]),
            _branch_entity(g, path.anchor_edges[1]),
        )
        op = (
            find_operation(question, entities=entities)
            if reasoning_type == ReasoningType.COMPARISON
            else None
        )

    subs = tuple(
        SubQuestion(sub, _stage("generate-sub-question", backend.generate_text, sub), role)
        for sub, role in zip(result.subgraphs, result.roles)
    )
    return Decomposition(
        question=question,
        reasoning_type=reasoning_type,
        sub_questions=subs,
        op=op,
        bridge_variable=result.bridge_variable,
    )


def _single_hop(question: str, g: AmrGraph, reasoning_type: ReasoningType) -> Decomposition:
    return Decomposition(
        question=question,
        reasoning_type=reasoning_type,
        sub_questions=(SubQuestion(g, question, SubgraphRole.SINGLE_HOP),),
        fallback=True,
    )


def collect_evidence(answer_text: str, context: Context) -> list[tuple[str, int]]:
    """Every context sentence containing the normalized answer string."""
    norm = normalize_answer(answer_text)
    if not norm:
        return []
    return [
        (title, i)
        for title, sentences in context
        for i, sentence in enumerate(sentences)
        if norm in normalize_answer(sentence)
    ]


def _answered_step(backend: Backend, question: str, context: Context) -> tuple[TraceStep, Answer]:
    answer = _stage("answer-sub-question", backend.answer_question, question, context)
    evidence = tuple(collect_evidence(answer.text, context))
    return TraceStep(question, answer.text, evidence), answer


def answer_multihop(question: str, context: Context, backend: Backend) -> ReasoningTrace:
    """Run the full chain for one question and return its reasoning trace."""
    deco = decompose(question, backend)

    if deco.fallback:
        step, answer = _answered_step(backend, question, context)
        return ReasoningTrace(
            question=question,
            reasoning_type=deco.reasoning_type,
            steps=(step,),
            final_answer=answer.text,
            fallback=True,
        )

    if deco.reasoning_type == ReasoningType.BRIDGING:
        first = deco.sub_questions[0]
        step1, answer1 = _answered_step(backend, first.text, context)
        assert deco.bridge_variable is not None
        substituted = substitute_answer(
            deco.sub_questions[1].graph, deco.bridge_variable, answer1.text
        )
        primary_text = _stage("generate-sub-question", backend.generate_text, substituted)
        step2, answer2 = _answered_step(backend, primary_text, context)
        return ReasoningTrace(
            question=question,
            reasoning_type=deco.reasoning_type,
            steps=(step1, step2),
            final_answer=answer2.text,
        )

    step1, answer1 = _answered_step(backend, deco.sub_questions[0].text, context)
    step2, answer2 = _answered_step(backend, deco.sub_questions[1].text, context)

    if deco.reasoning_type == ReasoningType.INTERSECTION:
        shared = _answer_set(answer1.text) & _answer_set(answer2.text)
        if _is_polarity_question(deco.sub_questions[0].graph):
            final = "Yes" if shared else "No"
        else:
            final = ", ".join(sorted(shared)) if shared else "no"
        return ReasoningTrace(
            question=question,
            reasoning_type=deco.reasoning_type,
            steps=(step1, step2),
            final_answer=final,
        )

    assert deco.op is not None
    third = construct_op_question(deco.op, answer1.text, answer2.text)
    try:
        final = eval_discrete_op(deco.op, answer1.text, answer2.text)
    except OpEvaluationError:
        final = _stage("answer-op-question", backend.answer_question, third, context).text
    step3 = TraceStep(third, final, tuple(collect_evidence(final, context)))
    return ReasoningTrace(
        question=question,
        reasoning_type=deco.reasoning_type,
        steps=(step1, step2, step3),
        final_answer=final,
        third_question=third,
    )


def trace_to_dict(trace: ReasoningTrace, qid: str) -> dict:
    """JSON form of a trace, one object per question."""
    return {
        "id": qid,
        "type": trace.reasoning_type.value,
        "steps": [
            {
                "subq": step.sub_question,
                "answer": step.answer,
                "evidence": [[title, index] for title, index in step.evidence],
            }
            for step in trace.steps
        ],
        "op_question": trace.third_question,
        "final_answer": trace.final_answer,
        "fallback": trace.fallback,
    }
