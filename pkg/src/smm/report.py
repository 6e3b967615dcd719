"""Rendering of evaluation results as text and JSON, plus assessment comparison.

Rendering is pure and deterministic: identical inputs produce byte-identical
output. Scores are displayed rounded to one decimal; levels are always
computed on unrounded values. JSON documents follow the schema shipped in
docs/report-schema.json and end with a newline so the CLI and the HTTP
service can emit them verbatim.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from typing import Mapping

from smm.errors import SmmError
from smm.model import MaturityLevel, MaturityModel, ParameterCategory
from smm.planner import ImprovementPlan
from smm.scoring import EvaluationResult, PaEvaluation

BAR_WIDTH = 20  # one character per 5 points

METHOD_COMPENSATORY = "compensatory"
METHOD_TWO_TIER = "two-tier"
METHOD_BOTH = "both"
_METHODS = (METHOD_COMPENSATORY, METHOD_TWO_TIER, METHOD_BOTH)

UP = "↑"
DOWN = "↓"
SAME = "="


def _check_method(method: str) -> str:
    if method not in _METHODS:
        raise SmmError("BAD_METHOD",
                       f"method must be one of {', '.join(_METHODS)}, got {method!r}")
    return method


def _bar(score: float) -> str:
    filled = int(score / (100 / BAR_WIDTH) + 0.5)
    filled = max(0, min(BAR_WIDTH, filled))
    return "#" * filled + "." * (BAR_WIDTH - filled)


def render_text(result: EvaluationResult, method: str = METHOD_BOTH) -> str:
    """Human-readable report: one section per KPA, no cross-KPA total."""
    _check_method(method)
    lines = [
        f"Maturity evaluation: {result.assessment_id}",
        f"Model: {result.model_id} v{result.model_version} | Date: {result.date.isoformat()}",
    ]
    for pa in result.pa_evaluations:
        lines.append("")
        lines.append(f"{pa.kpa_name} [{pa.kpa_id}] (PLM: {pa.plm_stage})")
        lines.append("  Goals")
        for sg in pa.sg_scores:
            lines.append(
                f"    {sg.tier.value:<8} {sg.sg_id:<12} [{_bar(sg.completeness)}] {sg.completeness:5.1f}"
            )
        if method in (METHOD_COMPENSATORY, METHOD_BOTH):
            lines.append(
                f"  Compensatory: {pa.compensatory_score:.1f} - {pa.compensatory_level.label}"
            )
        if method in (METHOD_TWO_TIER, METHOD_BOTH):
            if pa.two_tier_level is None:
                lines.append("  Two-tier: not applicable (KPA lacks a basic or advanced goal)")
            else:
                lines.append(
                    f"  Two-tier: basic {pa.basic_score:.1f}, advanced {pa.advanced_score:.1f}"
                    f" - {pa.two_tier_level.label}"
                )
        if pa.category_breakdown:
            lines.append("  Categories")
            for category, score in pa.category_breakdown.items():
                lines.append(f"    {category.label:<20} {score:5.1f}")
    if result.diagnostics:
        lines.append("")
        lines.append("Warnings")
        for diag in result.diagnostics:
            lines.append(f"  - [{diag.rule_code}] {diag.message}")
    return "\n".join(lines) + "\n"


def _pa_doc(pa: PaEvaluation, method: str) -> dict:
    doc: dict = {
        "id": pa.kpa_id,
        "name": pa.kpa_name,
        "plm_stage": pa.plm_stage,
        "goals": [
            {"id": sg.sg_id, "tier": sg.tier.value, "completeness": sg.completeness}
            for sg in pa.sg_scores
        ],
    }
    if method in (METHOD_COMPENSATORY, METHOD_BOTH):
        doc["compensatory"] = {
            "score": pa.compensatory_score,
            "level": pa.compensatory_level.label,
        }
    if method in (METHOD_TWO_TIER, METHOD_BOTH) and pa.two_tier_level is not None:
        doc["two_tier"] = {
            "basic_score": pa.basic_score,
            "advanced_score": pa.advanced_score,
            "level": pa.two_tier_level.label,
        }
    doc["categories"] = {
        category.value: score for category, score in pa.category_breakdown.items()
    }
    return doc


def render_json(result: EvaluationResult, method: str = METHOD_BOTH) -> str:
    """Machine-readable report per docs/report-schema.json. Key order is fixed;
    floats serialize at full precision; absent two-tier blocks are omitted."""
    _check_method(method)
    doc = {
        "assessment_id": result.assessment_id,
        "model_id": result.model_id,
        "model_version": result.model_version,
        "date": result.date.isoformat(),
        "method": method,
        "kpas": [_pa_doc(pa, method) for pa in result.pa_evaluations],
        "warnings": [
            {
                "severity": diag.severity.value,
                "rule_code": diag.rule_code,
                "message": diag.message,
                **(
                    {"location": {
                        "file": diag.location.file,
                        "line": diag.location.line,
                        "column": diag.location.column,
                    }}
                    if diag.location is not None else {}
                ),
            }
            for diag in result.diagnostics
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def plan_to_doc(plan: ImprovementPlan) -> dict:
    """JSON projection of an improvement plan."""
    return {
        "kpa_id": plan.kpa_id,
        "method": plan.method.value,
        "target": plan.target.label,
        "steps": [
            {
                "parameter_id": step.parameter_id,
                "from_level": int(step.from_level),
                "to_level": int(step.to_level),
                "cost": step.cost,
            }
            for step in plan.steps
        ],
        "total_cost": plan.total_cost,
        "achieved": plan.achieved,
        "exact": plan.exact,
    }


def render_plan_text(plan: ImprovementPlan, model: MaturityModel | None = None) -> str:
    """Readable plan listing; notes other KPAs that share planned parameters."""
    if not plan.steps:
        return (
            f"{plan.kpa_id}: no steps needed - already at {plan.target.label} or above "
            f"({plan.method.value})\n"
        )
    kind = "exact minimum" if plan.exact else "greedy (not guaranteed minimal)"
    lines = [f"Plan for {plan.kpa_id} - target {plan.target.label} ({plan.method.value}), {kind}"]
    for i, step in enumerate(plan.steps, start=1):
        lines.append(
            f"  {i}. {step.parameter_id}  {int(step.from_level)} -> {int(step.to_level)}"
            f"  (cost {step.cost:g})"
        )
    lines.append(f"Total cost: {plan.total_cost:g}")
    if model is not None:
        planned = {step.parameter_id for step in plan.steps}
        side = [
            kpa.id for kpa in model.kpas
            if kpa.id != plan.kpa_id and planned & set(kpa.bound_parameter_ids())
        ]
        if side:
            lines.append(f"Also benefits (shared parameters): {', '.join(side)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class KpaTrend:
    compensatory_score: float
    compensatory_level: MaturityLevel
    basic_score: float | None
    advanced_score: float | None
    two_tier_level: MaturityLevel | None


@dataclass(frozen=True)
class TrendEntry:
    """Snapshot of per-KPA scores at one date."""

    date: dt.date
    kpas: Mapping[str, KpaTrend]


@dataclass(frozen=True)
class KpaDelta:
    kpa_id: str
    compensatory_delta: float
    compensatory_flag: str
    compensatory_transition: tuple[MaturityLevel, MaturityLevel]
    basic_delta: float | None
    basic_flag: str | None
    advanced_delta: float | None
    advanced_flag: str | None
    two_tier_transition: tuple[MaturityLevel, MaturityLevel] | None


@dataclass(frozen=True)
class EvaluationDiff:
    """Comparison of two evaluations of the same model. Deltas are later minus
    earlier in argument order; entries() yields the trend sorted by date."""

    model_id: str
    model_version: int
    before: TrendEntry
    after: TrendEntry
    deltas: tuple[KpaDelta, ...]

    def entries(self) -> tuple[TrendEntry, TrendEntry]:
        pair = (self.before, self.after)
        return pair if self.before.date <= self.after.date else (pair[1], pair[0])


def _flag(delta: float) -> str:
    if delta > 0:
        return UP
    if delta < 0:
        return DOWN
    return SAME


def _trend(result: EvaluationResult) -> TrendEntry:
    return TrendEntry(
        date=result.date,
        kpas={
            pa.kpa_id: KpaTrend(
                compensatory_score=pa.compensatory_score,
                compensatory_level=pa.compensatory_level,
                basic_score=pa.basic_score,
                advanced_score=pa.advanced_score,
                two_tier_level=pa.two_tier_level,
            )
            for pa in result.pa_evaluations
        },
    )


def diff(earlier: EvaluationResult, later: EvaluationResult) -> EvaluationDiff:
    """Per-KPA score deltas and level transitions between two evaluations."""
    if earlier.model_id != later.model_id or earlier.model_version != later.model_version:
        raise SmmError(
            "MODEL_MISMATCH",
            f"cannot compare evaluations of {earlier.model_id} v{earlier.model_version} "
            f"and {later.model_id} v{later.model_version}",
        )
    before_ids = [pa.kpa_id for pa in earlier.pa_evaluations]
    after_ids = [pa.kpa_id for pa in later.pa_evaluations]
    if before_ids != after_ids:
        raise SmmError("MODEL_MISMATCH", "evaluations cover different KPA sets")

    deltas = []
    for pa_before, pa_after in zip(earlier.pa_evaluations, later.pa_evaluations):
        comp_delta = pa_after.compensatory_score - pa_before.compensatory_score
        both_two_tier = pa_before.two_tier_level is not None and pa_after.two_tier_level is not None
        if both_two_tier:
            basic_delta = pa_after.basic_score - pa_before.basic_score
            advanced_delta = pa_after.advanced_score - pa_before.advanced_score
            deltas.append(KpaDelta(
                kpa_id=pa_before.kpa_id,
                compensatory_delta=comp_delta,
                compensatory_flag=_flag(comp_delta),
                compensatory_transition=(pa_before.compensatory_level, pa_after.compensatory_level),
                basic_delta=basic_delta,
                basic_flag=_flag(basic_delta),
                advanced_delta=advanced_delta,
                advanced_flag=_flag(advanced_delta),
                two_tier_transition=(pa_before.two_tier_level, pa_after.two_tier_level),
            ))
        else:
            deltas.append(KpaDelta(
                kpa_id=pa_before.kpa_id,
                compensatory_delta=comp_delta,
                compensatory_flag=_flag(comp_delta),
                compensatory_transition=(pa_before.compensatory_level, pa_after.compensatory_level),
                basic_delta=None,
                basic_flag=None,
                advanced_delta=None,
                advanced_flag=None,
                two_tier_transition=None,
            ))
    return EvaluationDiff(
        model_id=earlier.model_id,
        model_version=earlier.model_version,
        before=_trend(earlier),
        after=_trend(later),
        deltas=tuple(deltas),
    )


def _transition(levels: tuple[MaturityLevel, MaturityLevel]) -> str:
    before, after = levels
    if before is after:
        return before.label
    return f"{before.label} -> {after.label}"


def render_diff_text(comparison: EvaluationDiff) -> str:
    lines = [
        f"Model: {comparison.model_id} v{comparison.model_version}",
        f"From {comparison.before.date.isoformat()} to {comparison.after.date.isoformat()}",
        "",
    ]
    for delta in comparison.deltas:
        before = comparison.before.kpas[delta.kpa_id]
        after = comparison.after.kpas[delta.kpa_id]
        lines.append(
            f"{delta.kpa_id}: compensatory {before.compensatory_score:.1f} -> "
            f"{after.compensatory_score:.1f} ({delta.compensatory_delta:+.1f}) "
            f"{delta.compensatory_flag}  {_transition(delta.compensatory_transition)}"
        )
        if delta.two_tier_transition is not None:
            lines.append(
                f"    two-tier basic {before.basic_score:.1f} -> {after.basic_score:.1f} "
                f"{delta.basic_flag}, advanced {before.advanced_score:.1f} -> "
                f"{after.advanced_score:.1f} {delta.advanced_flag}  "
                f"{_transition(delta.two_tier_transition)}"
            )
    return "\n".join(lines) + "\n"
