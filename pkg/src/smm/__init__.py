"""Software maturity model toolkit.

Define maturity models in a small text language, record team assessments,
evaluate per-process-area maturity with a compensatory and a two-tier
aggregation method, and plan minimum-cost improvements toward a target level.
"""

from smm.errors import (
    ConflictError,
    EvaluationError,
    NotFoundError,
    ParseError,
    SmmError,
    ValidationFailedError,
)
from smm.model import (
    Assessment,
    AssessmentStatus,
    Diagnostic,
    GoalTier,
    KpaDef,
    MaturityLevel,
    MaturityModel,
    ParameterBinding,
    ParameterCategory,
    ParameterDef,
    ScoreEntry,
    ScoreLevel,
    Severity,
    SourceSpan,
    SpecificGoalDef,
    validate_assessment,
    validate_model,
)
from smm.dsl import (
    parse_assessment,
    parse_model,
    serialize_assessment,
    serialize_model,
)
from smm.scoring import (
    EvaluationResult,
    PaEvaluation,
    SgScore,
    category_breakdown,
    compensatory_pa,
    evaluate,
    interpret_compensatory,
    interpret_two_tier,
    sg_completeness,
    two_tier_pa,
)
from smm.planner import (
    EXHAUSTIVE_THRESHOLD,
    ImprovementPlan,
    ImprovementStep,
    Method,
    plan,
    what_if,
)
from smm.report import (
    EvaluationDiff,
    KpaDelta,
    KpaTrend,
    TrendEntry,
    diff,
    render_json,
    render_text,
)
from smm.store import Store

__version__ = "0.1.0"

__all__ = [
    "Assessment",
    "AssessmentStatus",
    "ConflictError",
    "Diagnostic",
    "EvaluationDiff",
    "EvaluationError",
    "EvaluationResult",
    "EXHAUSTIVE_THRESHOLD",
    "GoalTier",
    "ImprovementPlan",
    "ImprovementStep",
    "KpaDef",
    "KpaDelta",
    "KpaTrend",
    "MaturityLevel",
    "MaturityModel",
    "Method",
    "NotFoundError",
    "PaEvaluation",
    "ParameterBinding",
    "ParameterCategory",
    "ParameterDef",
    "ParseError",
    "ScoreEntry",
    "ScoreLevel",
    "Severity",
    "SgScore",
    "SmmError",
    "SourceSpan",
    "SpecificGoalDef",
    "Store",
    "TrendEntry",
    "ValidationFailedError",
    "category_breakdown",
    "compensatory_pa",
    "diff",
    "evaluate",
    "interpret_compensatory",
    "interpret_two_tier",
    "parse_assessment",
    "parse_model",
    "plan",
    "render_json",
    "render_text",
    "serialize_assessment",
    "serialize_model",
    "sg_completeness",
    "two_tier_pa",
    "validate_assessment",
    "validate_model",
    "what_if",
]
