"""File-backed persistence for models and assessments with optimistic versioning.

Layout under the store root::

    models/<id>.smmdl
    assessments/<id>.smma
    index.json            # sidecar: current revision per entity

Writes are atomic (temp file + rename) and guarded by a per-store lock plus
an expected-revision check, so concurrent writers cannot clobber each other.
Reads are lock-free snapshots. The index is rebuilt by scanning the
directories when missing or unreadable (revisions restart at 1).
"""

from __future__ import annotations

import datetime as dt
import json
import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path

from smm.dsl import parse_assessment, parse_model, serialize_assessment, serialize_model
from smm.errors import ConflictError, NotFoundError, SmmError, ValidationFailedError
from smm.model import (
    Assessment,
    Diagnostic,
    MaturityModel,
    Severity,
    has_errors,
    validate_assessment,
    validate_model,
)

MODEL_EXT = ".smmdl"
ASSESSMENT_EXT = ".smma"
INDEX_FILE = "index.json"


@dataclass(frozen=True)
class ModelSummary:
    id: str
    name: str
    version: int
    revision: int


@dataclass(frozen=True)
class AssessmentSummary:
    id: str
    model_id: str
    model_version: int
    team: str
    date: dt.date
    status: str
    revision: int


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


class Store:
    """Directory of models and assessments with per-entity revisions."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.models_dir = self.root / "models"
        self.assessments_dir = self.root / "assessments"
        self.models_dir.mkdir(parents=True, exist_ok=True)
        self.assessments_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._index = self._load_index()

    # -- index ---------------------------------------------------------------

    def _index_path(self) -> Path:
        return self.root / INDEX_FILE

    def _load_index(self) -> dict:
        try:
            raw = json.loads(self._index_path().read_text(encoding="utf-8"))
            index = {
                "models": {str(k): int(v) for k, v in raw.get("models", {}).items()},
                "assessments": {str(k): int(v) for k, v in raw.get("assessments", {}).items()},
            }
        except (OSError, ValueError):
            index = {"models": {}, "assessments": {}}
        # Adopt files the index does not know about; drop stale entries.
        for kind, directory, ext in (
            ("models", self.models_dir, MODEL_EXT),
            ("assessments", self.assessments_dir, ASSESSMENT_EXT),
        ):
            on_disk = {p.name[: -len(ext)] for p in directory.glob(f"*{ext}")}
            for entity_id in on_disk:
                index[kind].setdefault(entity_id, 1)
            for entity_id in list(index[kind]):
                if entity_id not in on_disk:
                    del index[kind][entity_id]
        self._save_index(index)
        return index

    def _save_index(self, index: dict | None = None) -> None:
        _atomic_write(self._index_path(), json.dumps(index or self._index, indent=2, sort_keys=True) + "\n")

    def _revision(self, kind: str, entity_id: str) -> int:
        return self._index[kind].get(entity_id, 0)

    # -- generic put ----------------------------------------------------------

    def _put(self, kind: str, path: Path, entity_id: str, text: str, expected_revision: int) -> int:
        with self._lock:
            current = self._revision(kind, entity_id)
            if expected_revision != current:
                # Replay tolerance: re-sending exactly what was just written succeeds.
                if (
                    expected_revision == current - 1
                    and path.exists()
                    and path.read_text(encoding="utf-8") == text
                ):
                    return current
                raise ConflictError(
                    f'revision conflict on {kind[:-1]} "{entity_id}": '
                    f"expected {expected_revision}, current is {current}"
                )
            _atomic_write(path, text)
            self._index[kind][entity_id] = current + 1
            self._save_index()
            return current + 1

    def _delete(self, kind: str, path: Path, entity_id: str, expected_revision: int | None) -> None:
        with self._lock:
            current = self._revision(kind, entity_id)
            if current == 0:
                raise NotFoundError(f'{kind[:-1]} "{entity_id}" not found')
            if expected_revision is not None and expected_revision != current:
                raise ConflictError(
                    f'revision conflict on {kind[:-1]} "{entity_id}": '
                    f"expected {expected_revision}, current is {current}"
                )
            path.unlink(missing_ok=True)
            del self._index[kind][entity_id]
            self._save_index()

    # -- models ---------------------------------------------------------------

    def _model_path(self, model_id: str) -> Path:
        return self.models_dir / f"{model_id}{MODEL_EXT}"

    def list_models(self) -> list[ModelSummary]:
        summaries = []
        for model_id in sorted(self._index["models"]):
            model, revision = self.get_model(model_id)
            summaries.append(ModelSummary(model.id, model.name, model.version, revision))
        return summaries

    def get_model(self, model_id: str) -> tuple[MaturityModel, int]:
        path = self._model_path(model_id)
        revision = self._revision("models", model_id)
        if revision == 0 or not path.exists():
            raise NotFoundError(f'model "{model_id}" not found')
        model = parse_model(path.read_text(encoding="utf-8"), file=str(path))
        if model.id != model_id:
            raise SmmError("ID_MISMATCH",
                           f'file "{path.name}" declares model id "{model.id}"; '
                           "store files must be named <id>" + MODEL_EXT)
        return model, revision

    def put_model(self, model: MaturityModel, expected_revision: int) -> int:
        diagnostics = validate_model(model)
        if has_errors(diagnostics):
            raise ValidationFailedError(diagnostics, f'model "{model.id}" failed validation')
        return self._put("models", self._model_path(model.id), model.id,
                         serialize_model(model), expected_revision)

    def delete_model(self, model_id: str, expected_revision: int | None = None) -> None:
        self._delete("models", self._model_path(model_id), model_id, expected_revision)

    # -- assessments ------------------------------------------------------------

    def _assessment_path(self, assessment_id: str) -> Path:
        return self.assessments_dir / f"{assessment_id}{ASSESSMENT_EXT}"

    def list_assessments(self) -> list[AssessmentSummary]:
        summaries = []
        for assessment_id in sorted(self._index["assessments"]):
            assessment, revision = self.get_assessment(assessment_id)
            summaries.append(AssessmentSummary(
                assessment.id, assessment.model_id, assessment.model_version,
                assessment.team, assessment.date, assessment.status.value, revision,
            ))
        return summaries

    def get_assessment(self, assessment_id: str) -> tuple[Assessment, int]:
        path = self._assessment_path(assessment_id)
        revision = self._revision("assessments", assessment_id)
        if revision == 0 or not path.exists():
            raise NotFoundError(f'assessment "{assessment_id}" not found')
        assessment = parse_assessment(path.read_text(encoding="utf-8"), file=str(path))
        if assessment.id != assessment_id:
            raise SmmError("ID_MISMATCH",
                           f'file "{path.name}" declares assessment id "{assessment.id}"; '
                           "store files must be named <id>" + ASSESSMENT_EXT)
        return assessment, revision

    def put_assessment(self, assessment: Assessment, expected_revision: int) -> int:
        try:
            model, _ = self.get_model(assessment.model_id)
        except NotFoundError:
            raise ValidationFailedError(
                [Diagnostic(Severity.ERROR, "UNKNOWN_MODEL",
                            f'assessment references model "{assessment.model_id}" '
                            "which is not in the store")],
                f'assessment "{assessment.id}" failed validation',
            ) from None
        diagnostics = validate_assessment(assessment, model)
        if has_errors(diagnostics):
            raise ValidationFailedError(diagnostics, f'assessment "{assessment.id}" failed validation')
        return self._put("assessments", self._assessment_path(assessment.id), assessment.id,
                         serialize_assessment(assessment, model), expected_revision)

    def delete_assessment(self, assessment_id: str, expected_revision: int | None = None) -> None:
        self._delete("assessments", self._assessment_path(assessment_id), assessment_id, expected_revision)
