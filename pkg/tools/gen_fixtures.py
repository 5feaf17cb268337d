#!/usr/bin/env python3
"""Regenerate the committed test data files from tests/support/fixtures_src.

Run from the repository root after changing the example questions or the
linearization, then commit the refreshed files:

    python3 tools/gen_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from support import fixtures_src  # noqa: E402


def main() -> int:
    data_dir = ROOT / "tests" / "data"
    data_dir.mkdir(parents=True, exist_ok=True)

    fixtures = fixtures_src.build_fixture_entries()
    (data_dir / "fixtures.json").write_text(
        json.dumps(fixtures, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    dataset = fixtures_src.build_dataset()
    (data_dir / "hotpot_mini.json").write_text(
        json.dumps(dataset, indent=2) + "\n", encoding="utf-8"
    )

    golden_dir = ROOT / "tests" / "golden"
    golden_dir.mkdir(parents=True, exist_ok=True)
    golden_path = golden_dir / "protocol.json"
    golden = {"requests": fixtures_src.build_golden_requests()}
    if golden_path.exists():
        # keep recorded model-server responses when only requests changed
        previous = json.loads(golden_path.read_text(encoding="utf-8"))
        if "responses" in previous:
            golden["responses"] = previous["responses"]
    golden_path.write_text(json.dumps(golden, indent=2, ensure_ascii=False) + "\n", "utf-8")

    print(f"wrote {len(fixtures)} fixtures and {len(dataset)} dataset examples to {data_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
