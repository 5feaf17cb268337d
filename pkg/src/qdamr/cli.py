"""Command line interface.

    qdamr decompose --question <text> (--fixtures F | --backend-url U)
    qdamr run --dataset <hotpot.json> (--fixtures F | --backend-url U) --out <trace.jsonl>
    qdamr eval --trace <trace.jsonl> --dataset <hotpot.json>

The backend URL falls back to the QDAMR_BACKEND_URL environment variable
when no flag is given. Exit codes: 0 on success, 2 on schema errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from qdamr.backends import BACKEND_URL_ENV, Backend, HttpBackend, load_fixtures
from qdamr.dataset import load_hotpotqa
from qdamr.errors import FixtureFormatError, QdamrError, SchemaError
from qdamr.pipeline import decompose
from qdamr.runner import build_report, load_traces, run_batch

__all__ = ["main"]


def _add_backend_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--fixtures", metavar="FILE", help="answer from a recorded fixture file")
    group.add_argument(
        "--backend-url",
        metavar="URL",
        help=f"model server base URL (default: ${BACKEND_URL_ENV})",
    )


def _resolve_backend(args: argparse.Namespace) -> Backend:
    if args.fixtures:
        return load_fixtures(args.fixtures)
    url = args.backend_url or os.environ.get(BACKEND_URL_ENV)
    if not url:
        raise SchemaError(
            f"no backend configured: pass --fixtures or --backend-url, or set {BACKEND_URL_ENV}"
        )
    return HttpBackend(url)


def _cmd_decompose(args: argparse.Namespace) -> int:
    backend = _resolve_backend(args)
    deco = decompose(args.question, backend)
    payload = {
        "question": deco.question,
        "type": deco.reasoning_type.value,
        "sub_questions": [
            {"text": sub.text, "role": sub.role.value} for sub in deco.sub_questions
        ],
        "bridge_variable": deco.bridge_variable,
        "op": None
        if deco.op is None
        else {
            "kind": deco.op.kind.value,
            "domain": deco.op.domain.value,
            "subjects": list(deco.op.subjects),
        },
        "fallback": deco.fallback,
    }
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    examples = load_hotpotqa(args.dataset)
    backend = _resolve_backend(args)
    report = run_batch(examples, backend, args.out)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    examples = load_hotpotqa(args.dataset)
    traces = load_traces(args.trace)
    report = build_report(examples, traces)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdamr", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_decompose = sub.add_parser("decompose", help="decompose one question")
    p_decompose.add_argument("--question", required=True)
    _add_backend_flags(p_decompose)
    p_decompose.set_defaults(func=_cmd_decompose)

    p_run = sub.add_parser("run", help="answer a dataset and write traces")
    p_run.add_argument("--dataset", required=True)
    p_run.add_argument("--out", required=True, metavar="FILE")
    _add_backend_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_eval = sub.add_parser("eval", help="score an existing trace file")
    p_eval.add_argument("--trace", required=True)
    p_eval.add_argument("--dataset", required=True)
    p_eval.set_defaults(func=_cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, FixtureFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QdamrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
