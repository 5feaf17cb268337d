import json
from pathlib import Path

import pytest

from qdamr_model_server.config import ServerConfig
from qdamr_model_server.server import create_server

REPO_ROOT = Path(__file__).resolve().parents[2]


def _free_port() -> int:
    import socket

    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture()
def server():
    srv = create_server(ServerConfig(port=_free_port()))
    thread = srv.start_background()
    try:
        yield srv
    finally:
        srv.shutdown()
        thread.join()


@pytest.fixture()
def recording_server(tmp_path):
    record_path = tmp_path / "recorded.json"
    srv = create_server(ServerConfig(port=_free_port(), record_fixtures=str(record_path)))
    thread = srv.start_background()
    try:
        yield srv, str(record_path)
    finally:
        srv.shutdown()
        thread.join()


@pytest.fixture(scope="session")
def golden():
    path = REPO_ROOT / "tests" / "golden" / "protocol.json"
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
