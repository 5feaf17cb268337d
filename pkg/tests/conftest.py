import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))

DATA_DIR = TESTS_DIR / "data"
GOLDEN_DIR = TESTS_DIR / "golden"


@pytest.fixture(scope="session")
def fixtures_path() -> str:
    return str(DATA_DIR / "fixtures.json")


@pytest.fixture(scope="session")
def dataset_path() -> str:
    return str(DATA_DIR / "hotpot_mini.json")


@pytest.fixture(scope="session")
def golden_path() -> str:
    return str(GOLDEN_DIR / "protocol.json")
