from __future__ import annotations

import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = Path(__file__).resolve().parent / "data"

# Make the sibling oracles module importable regardless of rootdir layout.
sys.path.insert(0, str(Path(__file__).resolve().parent))


@pytest.fixture(scope="session")
def table2_cfg_path() -> Path:
    return REPO_ROOT / "table2.cfg"


@pytest.fixture(scope="session")
def office_csv_path() -> Path:
    return DATA_DIR / "office_temperature.csv"
