"""Maturity evaluation: goal completeness, both aggregation methods, level tables.

All functions are pure and operate on immutable inputs. Scores live on the
0-100 scale; level boundaries are half-open and lower-inclusive, with 100
included in the top level.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Mapping

from smm.errors import EvaluationError, SmmError
from smm.model import (
    Assessment,
    Diagnostic,
    GoalTier,
    KpaDef,
    MaturityLevel,
    MaturityModel,
    ParameterCategory,
    ScoreLevel,
    Severity,
    SpecificGoalDef,
    has_errors,
    validate_assessment,
    validate_model,
)

MAX_SCORE_LEVEL = int(ScoreLevel.EXPLICIT)


@dataclass(frozen=True)
class SgScore:
    sg_id: str
    completeness: float
    tier: GoalTier


@dataclass(frozen=True)
class PaEvaluation:
    """Everything reported about one KPA: per-goal completeness, both methods'
    scores and levels, and the per-category breakdown.

    The two-tier fields are None exactly when the KPA lacks a basic or an
    advanced goal; category entries are absent when the KPA binds no parameter
    of that category.
    """

    kpa_id: str
    kpa_name: str
    plm_stage: str
    sg_scores: tuple[SgScore, ...]
    compensatory_score: float
    compensatory_level: MaturityLevel
    basic_score: float | None
    advanced_score: float | None
    two_tier_level: MaturityLevel | None
    category_breakdown: Mapping[ParameterCategory, float]


@dataclass(frozen=True)
class EvaluationResult:
    """Per-KPA evaluations for one assessment. Deliberately carries no
    cross-KPA aggregate of any kind."""

    assessment_id: str
    model_id: str
    model_version: int
    date: dt.date
    pa_evaluations: tuple[PaEvaluation, ...]
    diagnostics: tuple[Diagnostic, ...]

    def pa(self, kpa_id: str) -> PaEvaluation | None:
        for pa in self.pa_evaluations:
            if pa.kpa_id == kpa_id:
                return pa
        return None


LevelMap = Mapping[str, ScoreLevel]


def _level(scores: LevelMap, parameter_id: str) -> int:
    return int(scores.get(parameter_id, ScoreLevel.NOT_AVAILABLE))


def sg_completeness(goal: SpecificGoalDef, scores: LevelMap) -> float:
    """Weighted completeness of one goal on the 0-100 scale.

    Sums weight*score over the goal's bindings and normalizes by the maximum
    attainable weighted sum, so all-explicit is 100 and all-absent is 0.
    Parameters without a score count as level 0.
    """
    if not goal.bindings:
        raise SmmError("EMPTY_GOAL", f'goal "{goal.id}" binds no parameters')
    weight_total = 0.0
    achieved = 0.0
    for binding in goal.bindings:
        weight_total += binding.weight
        achieved += binding.weight * _level(scores, binding.parameter_id)
    return 100.0 * achieved / (MAX_SCORE_LEVEL * weight_total)


def interpret_compensatory(score: float) -> MaturityLevel:
    """Map a 0-100 compensatory score onto a maturity level.

    Bands: [0,30) initial, [30,60) intermediate, [60,80) advanced,
    [80,100] optimizing.
    """
    _check_range(score, "score")
    if score < 30:
        return MaturityLevel.INITIAL
    if score < 60:
        return MaturityLevel.INTERMEDIATE
    if score < 80:
        return MaturityLevel.ADVANCED
    return MaturityLevel.OPTIMIZING


def interpret_two_tier(basic: float, advanced: float) -> MaturityLevel:
    """Map a (basic, advanced) score pair onto a maturity level.

    The basic score alone gates initial/intermediate; the advanced score
    differentiates only once basic reaches 80. The high-basic/low-advanced
    cell maps to intermediate so the mapping is total.
    """
    _check_range(basic, "basic score")
    _check_range(advanced, "advanced score")
    if basic < 50:
        return MaturityLevel.INITIAL
    if basic < 80:
        return MaturityLevel.INTERMEDIATE
    if advanced < 20:
        return MaturityLevel.INTERMEDIATE
    if advanced < 50:
        return MaturityLevel.ADVANCED
    return MaturityLevel.OPTIMIZING


def _check_range(score: float, what: str) -> None:
    if not (isinstance(score, (int, float)) and math.isfinite(score) and 0 <= score <= 100):
        raise SmmError("OUT_OF_RANGE", f"{what} must lie in [0, 100], got {score!r}")


def compensatory_pa(kpa: KpaDef, scores: LevelMap) -> tuple[float, MaturityLevel]:
    """Unweighted mean of all the KPA's goal completeness values, plus its level."""
    if not kpa.goals:
        raise SmmError("EMPTY_KPA", f'KPA "{kpa.id}" declares no goals')
    values = [sg_completeness(goal, scores) for goal in kpa.goals]
    score = sum(values) / len(values)
    return score, interpret_compensatory(score)


def two_tier_pa(kpa: KpaDef, scores: LevelMap) -> tuple[float, float, MaturityLevel]:
    """Per-tier means of goal completeness (basic, advanced) plus the level.

    Requires the KPA to have at least one goal in each tier.
    """
    basic_values = [sg_completeness(g, scores) for g in kpa.goals if g.tier is GoalTier.BASIC]
    advanced_values = [sg_completeness(g, scores) for g in kpa.goals if g.tier is GoalTier.ADVANCED]
    if not basic_values or not advanced_values:
        missing = "basic" if not basic_values else "advanced"
        raise SmmError("TIER_MISSING", f'KPA "{kpa.id}" has no {missing} goals; two-tier does not apply')
    basic = sum(basic_values) / len(basic_values)
    advanced = sum(advanced_values) / len(advanced_values)
    return basic, advanced, interpret_two_tier(basic, advanced)


def category_breakdown(
    model: MaturityModel, kpa: KpaDef, scores: LevelMap
) -> dict[ParameterCategory, float]:
    """Weighted completeness per parameter category over all the KPA's bindings.

    A binding contributes once per goal that uses it. Categories with no
    binding in the KPA are absent from the result.
    """
    params = model.parameters_by_id()
    weight_totals: dict[ParameterCategory, float] = {}
    achieved: dict[ParameterCategory, float] = {}
    for goal in kpa.goals:
        for binding in goal.bindings:
            param = params.get(binding.parameter_id)
            if param is None:
                raise SmmError("UNKNOWN_PARAM",
                               f'binding references unknown parameter "{binding.parameter_id}"')
            weight_totals[param.category] = weight_totals.get(param.category, 0.0) + binding.weight
            achieved[param.category] = (
                achieved.get(param.category, 0.0)
                + binding.weight * _level(scores, binding.parameter_id)
            )
    return {
        category: 100.0 * achieved[category] / (MAX_SCORE_LEVEL * weight_totals[category])
        for category in ParameterCategory
        if category in weight_totals
    }


def evaluate(model: MaturityModel, assessment: Assessment) -> EvaluationResult:
    """Full evaluation of an assessment: one PaEvaluation per KPA.

    Raises EvaluationError when the model or the assessment has blocking
    errors; validation warnings are carried into the result.
    """
    model_diags = validate_model(model)
    if has_errors(model_diags):
        raise EvaluationError(model_diags)
    assessment_diags = validate_assessment(assessment, model)
    if has_errors(assessment_diags):
        raise EvaluationError(assessment_diags)

    warnings = [d for d in model_diags + assessment_diags if not d.is_error]
    scores = assessment.levels()

    evaluations = []
    for kpa in model.kpas:
        sg_scores = tuple(
            SgScore(goal.id, sg_completeness(goal, scores), goal.tier) for goal in kpa.goals
        )
        comp_score, comp_level = compensatory_pa(kpa, scores)
        tiers = kpa.tiers_present()
        if GoalTier.BASIC in tiers and GoalTier.ADVANCED in tiers:
            basic, advanced, tt_level = two_tier_pa(kpa, scores)
        else:
            basic = advanced = tt_level = None
            missing = "basic" if GoalTier.BASIC not in tiers else "advanced"
            warnings.append(Diagnostic(
                Severity.WARNING, "TIER_MISSING",
                f'KPA "{kpa.id}" has no {missing} goals; two-tier scores omitted',
            ))
        evaluations.append(PaEvaluation(
            kpa_id=kpa.id,
            kpa_name=kpa.name,
            plm_stage=kpa.plm_stage,
            sg_scores=sg_scores,
            compensatory_score=comp_score,
            compensatory_level=comp_level,
            basic_score=basic,
            advanced_score=advanced,
            two_tier_level=tt_level,
            category_breakdown=category_breakdown(model, kpa, scores),
        ))

    return EvaluationResult(
        assessment_id=assessment.id,
        model_id=model.id,
        model_version=model.version,
        date=assessment.date,
        pa_evaluations=tuple(evaluations),
        diagnostics=tuple(warnings),
    )
