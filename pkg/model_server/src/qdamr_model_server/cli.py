"""Model-server entry point: qdamr-model-server [--config FILE] [flags]."""

from __future__ import annotations

import argparse

from qdamr_model_server.config import load_config
from qdamr_model_server.server import serve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdamr-model-server")
    parser.add_argument("--config", metavar="FILE", help="JSON config file")
    parser.add_argument("--parser-model", dest="parser_model")
    parser.add_argument("--generator-model", dest="generator_model")
    parser.add_argument("--qa-model", dest="qa_model")
    parser.add_argument("--host")
    parser.add_argument("--port", type=int)
    parser.add_argument(
        "--record-fixtures",
        dest="record_fixtures",
        metavar="FILE",
        help="capture live request/response pairs into a fixture file",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = load_config(
        args.config,
        parser_model=args.parser_model,
        generator_model=args.generator_model,
        qa_model=args.qa_model,
        host=args.host,
        port=args.port,
        record_fixtures=args.record_fixtures,
    )
    serve(config)
    return 0
