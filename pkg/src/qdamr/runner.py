"""Batch evaluation: run the pipeline over a dataset, score the traces."""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from typing import Sequence

from qdamr.backends import Backend
from qdamr.dataset import HotpotExample
from qdamr.errors import QdamrError
from qdamr.metrics import exact_match, f1_score, length_ratio, token_edit_distance
from qdamr.pipeline import answer_multihop, trace_to_dict

__all__ = ["TypeScore", "EvalReport", "run_batch", "build_report", "load_traces"]


@dataclass
class TypeScore:
    count: int = 0
    em_total: float = 0.0
    f1_total: float = 0.0

    @property
    def em(self) -> float:
        return self.em_total / self.count if self.count else 0.0

    @property
    def f1(self) -> float:
        return self.f1_total / self.count if self.count else 0.0


@dataclass
class EvalReport:
    overall: TypeScore = field(default_factory=TypeScore)
    per_type: dict[str, TypeScore] = field(default_factory=dict)
    mean_edit_distance: float | None = None
    mean_length_ratio: float | None = None
    errors: list[tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "count": self.overall.count,
            "em": self.overall.em,
            "f1": self.overall.f1,
            "per_type": {
                name: {"count": score.count, "em": score.em, "f1": score.f1}
                for name, score in sorted(self.per_type.items())
            },
            "mean_edit_distance": self.mean_edit_distance,
            "mean_length_ratio": self.mean_length_ratio,
            "errors": [{"id": qid, "error": message} for qid, message in self.errors],
        }


def _generated_sub_questions(trace: dict) -> list[str]:
    # The constructed third question of a comparison is not a generated
    # sub-question, so quality metrics look at the first two steps only.
    steps = trace["steps"][:2]
    return [step["subq"] for step in steps]


def build_report(examples: Sequence[HotpotExample], traces: dict[str, dict]) -> EvalReport:
    report = EvalReport()
    distances: list[float] = []
    ratios: list[float] = []
    for example in examples:
        trace = traces.get(example.id)
        if trace is None:
            continue
        em = exact_match(trace["final_answer"], example.answer)
        f1 = f1_score(trace["final_answer"], example.answer)
        report.overall.count += 1
        report.overall.em_total += em
        report.overall.f1_total += f1
        by_type = report.per_type.setdefault(trace["type"], TypeScore())
        by_type.count += 1
        by_type.em_total += em
        by_type.f1_total += f1
        if not trace.get("fallback"):
            subs = _generated_sub_questions(trace)
            if subs:
                distances.append(token_edit_distance(example.question, subs))
                ratios.append(length_ratio(example.question, subs))
    if distances:
        report.mean_edit_distance = sum(distances) / len(distances)
        report.mean_length_ratio = sum(ratios) / len(ratios)
    return report


def run_batch(
    examples: Sequence[HotpotExample],
    backend: Backend,
    out_path: str | None = None,
) -> EvalReport:
    """Answer every example, write traces as JSON lines, score the results.

    Per-example failures are recorded in the report and the run continues.
    Output ordering follows the dataset, so identical inputs produce
    byte-identical trace files.
    """
    traces: dict[str, dict] = {}
    errors: list[tuple[str, str]] = []
    lines: list[str] = []
    for example in examples:
        try:
            trace = answer_multihop(example.question, example.context, backend)
        except QdamrError as exc:
            errors.append((example.id, str(exc)))
            print(f"error: {example.id}: {exc}", file=sys.stderr)
            continue
        record = trace_to_dict(trace, example.id)
        traces[example.id] = record
        lines.append(json.dumps(record, sort_keys=True))
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            for line in lines:
                fh.write(line + "\n")
    report = build_report(examples, traces)
    report.errors = errors
    return report


def load_traces(path: str) -> dict[str, dict]:
    """Read a JSON-lines trace file into a mapping keyed by question id."""
    traces: dict[str, dict] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise QdamrError(f"{path}:{lineno}: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise QdamrError(f"{path}:{lineno}: expected a trace object")
            missing = {"id", "type", "steps", "final_answer"} - set(record)
            if missing:
                raise QdamrError(f"{path}:{lineno}: trace missing fields {sorted(missing)}")
            traces[record["id"]] = record
    return traces
