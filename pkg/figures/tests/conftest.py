import shutil
from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def golden() -> Path:
    """Read-only golden CSV directory."""
    return GOLDEN


@pytest.fixture
def work(tmp_path) -> Path:
    """Mutable copy of the golden directory for tampering tests."""
    dest = tmp_path / "golden"
    shutil.copytree(GOLDEN, dest)
    return dest
