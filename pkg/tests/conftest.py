import sys
from pathlib import Path

import pytest

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

INSTANCES_DIR = project_root / "suprec" / "instances"
SPECS_DIR = project_root / "scripts" / "specs"


@pytest.fixture(autouse=True)
def _no_env_seed(monkeypatch):
    """A SUPREC_SEED from the developer's shell would override every seed under test"""
    monkeypatch.delenv("SUPREC_SEED", raising=False)


@pytest.fixture
def tiny_instance_path() -> str:
    return str(INSTANCES_DIR / "tiny_k1.json")


@pytest.fixture
def smoke_spec_path() -> str:
    return str(SPECS_DIR / "smoke_single_point.json")
