"""Domain types for maturity models and assessments, plus structural validation.

All types are immutable values; the validators return diagnostic lists instead
of raising, so callers can report every problem at once.
"""

from __future__ import annotations

import datetime as dt
import math
import re
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterator, Mapping

ID_MAX_LENGTH = 64
_ID_RE = re.compile(r"^[A-Za-z0-9._-]{1,64}$")


def is_valid_id(value: str) -> bool:
    """ASCII letters, digits, dot, underscore, hyphen; 1-64 chars; case-sensitive."""
    return isinstance(value, str) and bool(_ID_RE.match(value))


class ParameterCategory(str, Enum):
    """The five categories a pool parameter can belong to."""

    PROCESS_QUALITY = "process"
    ESTIMATION_ACCURACY = "estimation"
    PRODUCT_QUALITY = "product"
    TEAM_QUALITY = "team"
    TECHNOLOGY_QUALITY = "technology"

    @property
    def label(self) -> str:
        return _CATEGORY_LABELS[self]


_CATEGORY_LABELS = {
    ParameterCategory.PROCESS_QUALITY: "Process Quality",
    ParameterCategory.ESTIMATION_ACCURACY: "Estimation Accuracy",
    ParameterCategory.PRODUCT_QUALITY: "Product Quality",
    ParameterCategory.TEAM_QUALITY: "Team Quality",
    ParameterCategory.TECHNOLOGY_QUALITY: "Technology Quality",
}


class GoalTier(str, Enum):
    BASIC = "basic"
    ADVANCED = "advanced"


class ScoreLevel(IntEnum):
    """Three-level parameter scoring: absent/unaware, practiced but unwritten, institutionalized."""

    NOT_AVAILABLE = 0
    IMPLICIT = 1
    EXPLICIT = 2


class AssessmentStatus(str, Enum):
    DRAFT = "draft"
    REVIEWED = "reviewed"
    FINAL = "final"


class MaturityLevel(IntEnum):
    """Ordered interpretation of process-area scores."""

    INITIAL = 0
    INTERMEDIATE = 1
    ADVANCED = 2
    OPTIMIZING = 3

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "MaturityLevel":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown maturity level {text!r}") from None


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    """1-based position of a diagnostic in its source file."""

    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    """A validation or parse finding. Errors block evaluation; warnings do not."""

    severity: Severity
    rule_code: str
    message: str
    location: SourceSpan | None = None

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR


def has_errors(diagnostics) -> bool:
    return any(d.is_error for d in diagnostics)


@dataclass(frozen=True)
class ParameterBinding:
    """Attachment of a pool parameter to a goal, with its weight inside that goal."""

    parameter_id: str
    weight: float


@dataclass(frozen=True)
class SpecificGoalDef:
    id: str
    name: str
    tier: GoalTier
    bindings: tuple[ParameterBinding, ...]

    def bound_parameter_ids(self) -> tuple[str, ...]:
        return tuple(b.parameter_id for b in self.bindings)


@dataclass(frozen=True)
class KpaDef:
    id: str
    name: str
    plm_stage: str
    goals: tuple[SpecificGoalDef, ...]

    def bound_parameter_ids(self) -> tuple[str, ...]:
        """Unique parameter ids bound anywhere in this KPA, in first-use order."""
        seen: dict[str, None] = {}
        for goal in self.goals:
            for binding in goal.bindings:
                seen.setdefault(binding.parameter_id, None)
        return tuple(seen)

    def tiers_present(self) -> frozenset[GoalTier]:
        return frozenset(g.tier for g in self.goals)


@dataclass(frozen=True)
class ParameterDef:
    id: str
    description: str
    category: ParameterCategory
    step_cost: float = 1.0


@dataclass(frozen=True)
class MaturityModel:
    id: str
    name: str
    version: int
    parameters: tuple[ParameterDef, ...]
    kpas: tuple[KpaDef, ...]

    def parameter(self, parameter_id: str) -> ParameterDef | None:
        for p in self.parameters:
            if p.id == parameter_id:
                return p
        return None

    def parameters_by_id(self) -> dict[str, ParameterDef]:
        return {p.id: p for p in self.parameters}

    def kpa(self, kpa_id: str) -> KpaDef | None:
        for k in self.kpas:
            if k.id == kpa_id:
                return k
        return None

    def goals(self) -> Iterator[tuple[KpaDef, SpecificGoalDef]]:
        for kpa in self.kpas:
            for goal in kpa.goals:
                yield kpa, goal


@dataclass(frozen=True)
class ScoreEntry:
    level: ScoreLevel
    note: str | None = None


@dataclass(frozen=True)
class Assessment:
    """One team's dated set of parameter scores against a model version."""

    id: str
    model_id: str
    model_version: int
    date: dt.date
    team: str
    status: AssessmentStatus = AssessmentStatus.DRAFT
    scores: Mapping[str, ScoreEntry] = field(default_factory=dict)

    def levels(self) -> dict[str, ScoreLevel]:
        return {pid: entry.level for pid, entry in self.scores.items()}


def _err(code: str, message: str) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message)


def _warn(code: str, message: str) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message)


def _check_positive_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) \
        and math.isfinite(value) and value > 0


def validate_model(model: MaturityModel) -> list[Diagnostic]:
    """Check every structural invariant of a model.

    Returns an empty list exactly when the model is sound. Violations are
    returned (never raised), one diagnostic per violation, in declaration
    order, so identical models always yield identical diagnostics.
    """
    diags: list[Diagnostic] = []

    if not is_valid_id(model.id):
        diags.append(_err("BAD_ID", f"model id {model.id!r} is not a valid identifier"))
    if not isinstance(model.version, int) or isinstance(model.version, bool) or model.version < 1:
        diags.append(_err("BAD_VERSION", f"model version must be a positive integer, got {model.version!r}"))

    seen_params: set[str] = set()
    for param in model.parameters:
        if not is_valid_id(param.id):
            diags.append(_err("BAD_ID", f"parameter id {param.id!r} is not a valid identifier"))
        if param.id in seen_params:
            diags.append(_err("DUP_PARAM_ID", f'parameter "{param.id}" is declared more than once'))
        seen_params.add(param.id)
        if not _check_positive_number(param.step_cost):
            diags.append(_err("BAD_COST", f'parameter "{param.id}" has non-positive step cost {param.step_cost!r}'))

    seen_kpas: set[str] = set()
    seen_goals: set[str] = set()
    bound: set[str] = set()
    for kpa in model.kpas:
        if not is_valid_id(kpa.id):
            diags.append(_err("BAD_ID", f"KPA id {kpa.id!r} is not a valid identifier"))
        if kpa.id in seen_kpas:
            diags.append(_err("DUP_KPA_ID", f'KPA "{kpa.id}" is declared more than once'))
        seen_kpas.add(kpa.id)
        if not kpa.plm_stage.strip():
            diags.append(_err("EMPTY_PLM", f'KPA "{kpa.id}" has an empty PLM stage'))
        if not kpa.goals:
            diags.append(_err("EMPTY_KPA", f'KPA "{kpa.id}" declares no goals'))
        for goal in kpa.goals:
            if not is_valid_id(goal.id):
                diags.append(_err("BAD_ID", f"goal id {goal.id!r} is not a valid identifier"))
            if goal.id in seen_goals:
                diags.append(_err("DUP_SG_ID", f'goal "{goal.id}" is declared more than once'))
            seen_goals.add(goal.id)
            if not goal.bindings:
                diags.append(_err("EMPTY_GOAL", f'goal "{goal.id}" binds no parameters'))
            seen_bindings: set[str] = set()
            for binding in goal.bindings:
                if binding.parameter_id not in seen_params:
                    diags.append(_err(
                        "UNKNOWN_PARAM",
                        f'goal "{goal.id}" binds parameter "{binding.parameter_id}" which is not in the pool',
                    ))
                if binding.parameter_id in seen_bindings:
                    diags.append(_err(
                        "DUP_BINDING",
                        f'goal "{goal.id}" binds parameter "{binding.parameter_id}" more than once',
                    ))
                seen_bindings.add(binding.parameter_id)
                if not _check_positive_number(binding.weight):
                    diags.append(_err(
                        "BAD_WEIGHT",
                        f'binding of "{binding.parameter_id}" in goal "{goal.id}" has non-positive weight {binding.weight!r}',
                    ))
                bound.add(binding.parameter_id)

    for param in model.parameters:
        if param.id not in bound:
            diags.append(_err("ORPHAN_PARAM", f'parameter "{param.id}" is not bound by any goal'))

    return diags


def validate_assessment(assessment: Assessment, model: MaturityModel) -> list[Diagnostic]:
    """Check an assessment against its model.

    Unknown parameters and model id/version mismatches are errors; pool
    parameters without a score yield UNSCORED_PARAM warnings (they evaluate
    as level 0).
    """
    diags: list[Diagnostic] = []

    if not is_valid_id(assessment.id):
        diags.append(_err("BAD_ID", f"assessment id {assessment.id!r} is not a valid identifier"))
    if assessment.model_id != model.id:
        diags.append(_err(
            "MODEL_MISMATCH",
            f'assessment references model "{assessment.model_id}" but was checked against "{model.id}"',
        ))
    if assessment.model_version != model.version:
        diags.append(_err(
            "MODEL_MISMATCH",
            f"assessment references model version {assessment.model_version} "
            f"but the model is version {model.version}",
        ))

    pool = {p.id for p in model.parameters}
    for pid in assessment.scores:
        if pid not in pool:
            diags.append(_err("UNKNOWN_PARAM", f'score for unknown parameter "{pid}"'))
    for param in model.parameters:
        if param.id not in assessment.scores:
            diags.append(_warn("UNSCORED_PARAM", f'parameter "{param.id}" has no score; treated as 0'))

    return diags
