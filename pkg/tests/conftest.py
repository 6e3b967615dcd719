from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from smm.fixtures import (  # noqa: E402
    REFERENCE_ASSESSMENT,
    REFERENCE_MODEL,
    fixture_text,
    reference_assessment,
    reference_model,
)

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def fixture_model():
    return reference_model()


@pytest.fixture(scope="session")
def fixture_assessment():
    return reference_assessment()


@pytest.fixture(scope="session")
def fixture_model_text():
    return fixture_text(REFERENCE_MODEL)


@pytest.fixture(scope="session")
def fixture_assessment_text():
    return fixture_text(REFERENCE_ASSESSMENT)


def golden(name: str) -> str:
    return (DATA_DIR / name).read_text(encoding="utf-8")
