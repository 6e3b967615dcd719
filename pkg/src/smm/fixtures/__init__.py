"""Shipped reference model and assessment, usable as demo data and test fixtures."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from smm.dsl import parse_assessment, parse_model
from smm.model import Assessment, MaturityModel

REFERENCE_MODEL = "geant-smm.smmdl"
REFERENCE_ASSESSMENT = "team-alpha.smma"


def fixture_text(name: str) -> str:
    return (resources.files(__package__) / name).read_text(encoding="utf-8")


def fixture_path(name: str) -> Path:
    return Path(str(resources.files(__package__) / name))


def reference_model() -> MaturityModel:
    return parse_model(fixture_text(REFERENCE_MODEL), file=REFERENCE_MODEL)


def reference_assessment() -> Assessment:
    return parse_assessment(fixture_text(REFERENCE_ASSESSMENT), file=REFERENCE_ASSESSMENT)
