#!/usr/bin/env python3
"""Freeze the model server's responses to the shared golden requests.

Requires the model_server package to be installed. Run from the repository
root after gen_fixtures.py:

    python3 tools/gen_golden_responses.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from qdamr.backends import canonical_json

from qdamr_model_server.models import load_models
from qdamr_model_server.recording import respond

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    path = ROOT / "tests" / "golden" / "protocol.json"
    golden = json.loads(path.read_text(encoding="utf-8"))
    models = load_models("rule", "rule", "rule")
    responses = []
    for entry in golden["requests"]:
        response = respond(models, entry["request"])
        responses.append(
            {
                "key": entry["key"],
                "response": response,
                "canonical": canonical_json(response),
            }
        )
    golden["responses"] = responses
    path.write_text(json.dumps(golden, indent=2, ensure_ascii=False) + "\n", "utf-8")
    print(f"froze {len(responses)} golden responses into {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
