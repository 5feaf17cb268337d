"""HTTP server exposing /parse, /generate, /answer, and /health.

The wire protocol is owned by the client package; this server conforms to
it bit-exactly and is checked against the shared golden requests. A parse
response that fails PENMAN validation is a 500, never a 200.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from qdamr.backends import KIND_ANSWER, KIND_GENERATE, KIND_PARSE, canonical_json
from qdamr.errors import QdamrError
from qdamr.graph import parse_penman

from qdamr_model_server.config import ServerConfig
from qdamr_model_server.models import ModelSet, load_models
from qdamr_model_server.recording import FixtureRecorder, respond

__all__ = ["ModelServer", "create_server", "serve"]

_ENDPOINT_KINDS = {
    "/parse": KIND_PARSE,
    "/generate": KIND_GENERATE,
    "/answer": KIND_ANSWER,
}

_REQUIRED_FIELDS = {
    KIND_PARSE: ("text",),
    KIND_GENERATE: ("amr",),
    KIND_ANSWER: ("question", "context"),
}


class _BadRequest(Exception):
    pass


def _validate_body(kind: str, body: object) -> dict:
    if not isinstance(body, dict):
        raise _BadRequest("request body must be a JSON object")
    if "kind" in body and body["kind"] != kind:
        raise _BadRequest(f"request kind {body['kind']!r} does not match the endpoint")
    for field in _REQUIRED_FIELDS[kind]:
        if field not in body:
            raise _BadRequest(f"missing required field '{field}'")
        if field in ("text", "amr", "question"):
            value = body[field]
            if not isinstance(value, str) or not value.strip():
                raise _BadRequest(f"field '{field}' must be a nonempty string")
    if kind == KIND_ANSWER:
        context = body["context"]
        if (
            not isinstance(context, list)
            or not context
            or not all(
                isinstance(p, list)
                and len(p) == 2
                and isinstance(p[0], str)
                and isinstance(p[1], list)
                and all(isinstance(s, str) for s in p[1])
                for p in context
            )
        ):
            raise _BadRequest("field 'context' must be [[title, [sentence, ...]], ...]")
    return {"kind": kind, **{k: v for k, v in body.items() if k != "kind"}}


class _Handler(BaseHTTPRequestHandler):
    server: "ModelServer"

    def log_message(self, *args):
        pass

    def _send_json(self, status: int, payload: dict) -> None:
        data = canonical_json(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_GET(self):  # noqa: N802  (stdlib naming)
        if self.path != "/health":
            self._send_json(404, {"error": f"unknown path {self.path}"})
            return
        self._send_json(200, {"models": self.server.models.identifiers, "status": "ok"})

    def do_POST(self):  # noqa: N802
        kind = _ENDPOINT_KINDS.get(self.path)
        if kind is None:
            self._send_json(404, {"error": f"unknown path {self.path}"})
            return
        try:
            length = int(self.headers.get("Content-Length", 0))
            body = json.loads(self.rfile.read(length).decode("utf-8")) if length else None
        except (ValueError, UnicodeDecodeError):
            self._send_json(400, {"error": "body is not valid JSON"})
            return
        try:
            request = _validate_body(kind, body)
        except _BadRequest as exc:
            self._send_json(400, {"error": str(exc)})
            return
        try:
            response = respond(self.server.models, request)
            if kind == KIND_PARSE:
                parse_penman(response["amr"])
        except (QdamrError, ValueError, KeyError, RuntimeError) as exc:
            self._send_json(500, {"error": str(exc), "stage": kind})
            return
        if self.server.recorder is not None:
            self.server.recorder.record(request, response)
        self._send_json(200, response)


class ModelServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, config: ServerConfig, models: ModelSet):
        super().__init__((config.host, config.port), _Handler)
        self.config = config
        self.models = models
        self.recorder = (
            FixtureRecorder(config.record_fixtures) if config.record_fixtures else None
        )

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"

    def start_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


def create_server(config: ServerConfig) -> ModelServer:
    """Load the configured models (failing fast) and bind the server."""
    models = load_models(config.parser_model, config.generator_model, config.qa_model)
    return ModelServer(config, models)


def serve(config: ServerConfig) -> None:
    server = create_server(config)
    print(f"serving {server.models.identifiers} on {server.url}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
