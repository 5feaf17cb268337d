"""Server configuration: model identifiers, bind address, recording."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields


@dataclass(frozen=True)
class ServerConfig:
    parser_model: str = "rule"
    generator_model: str = "rule"
    qa_model: str = "rule"
    host: str = "127.0.0.1"
    port: int = 8470
    record_fixtures: str | None = None

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port must be in [1, 65535], got {self.port}")


def load_config(path: str | None = None, **overrides) -> ServerConfig:
    """Build a config from an optional JSON file plus flag overrides."""
    values: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: expected a JSON object")
        known = {f.name for f in fields(ServerConfig)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
        values.update(raw)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ServerConfig(**values)
