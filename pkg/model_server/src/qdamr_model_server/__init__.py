"""Serve parse/generate/answer models over the decomposition wire protocol."""

from qdamr_model_server.config import ServerConfig, load_config
from qdamr_model_server.models import ModelSet, load_models
from qdamr_model_server.recording import FixtureRecorder, record_fixtures
from qdamr_model_server.server import ModelServer, create_server, serve

__version__ = "0.1.0"

__all__ = [
    "ServerConfig",
    "load_config",
    "ModelSet",
    "load_models",
    "FixtureRecorder",
    "record_fixtures",
    "ModelServer",
    "create_server",
    "serve",
    "__version__",
]
