"""Improvement planning: minimum-cost parameter increments to reach a target level.

Small instances (at most EXHAUSTIVE_THRESHOLD available single-level
increments across the KPA's parameters) are solved exactly with a
branch-and-bound search over increment count vectors; larger instances fall
back to a greedy heuristic that is always sound but not guaranteed minimal.
Shared parameters count once: one increment advances every goal binding the
parameter.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from smm.errors import EvaluationError, SmmError
from smm.model import (
    Assessment,
    GoalTier,
    KpaDef,
    MaturityLevel,
    MaturityModel,
    ScoreEntry,
    ScoreLevel,
    has_errors,
    validate_assessment,
    validate_model,
)
from smm.scoring import (
    EvaluationResult,
    MAX_SCORE_LEVEL,
    compensatory_pa,
    evaluate,
    two_tier_pa,
)

EXHAUSTIVE_THRESHOLD = 16


class Method(str, Enum):
    COMPENSATORY = "compensatory"
    TWO_TIER = "two-tier"


# Score thresholds a KPA must meet to sit at or above each target level.
_COMPENSATORY_NEED: dict[MaturityLevel, float] = {
    MaturityLevel.INITIAL: 0.0,
    MaturityLevel.INTERMEDIATE: 30.0,
    MaturityLevel.ADVANCED: 60.0,
    MaturityLevel.OPTIMIZING: 80.0,
}
_TWO_TIER_NEED: dict[MaturityLevel, tuple[float, float]] = {
    MaturityLevel.INITIAL: (0.0, 0.0),
    MaturityLevel.INTERMEDIATE: (50.0, 0.0),
    MaturityLevel.ADVANCED: (80.0, 20.0),
    MaturityLevel.OPTIMIZING: (80.0, 50.0),
}


@dataclass(frozen=True)
class ImprovementStep:
    parameter_id: str
    from_level: ScoreLevel
    to_level: ScoreLevel
    cost: float


@dataclass(frozen=True)
class ImprovementPlan:
    kpa_id: str
    method: Method
    target: MaturityLevel
    steps: tuple[ImprovementStep, ...]
    total_cost: float
    achieved: bool
    exact: bool

    def final_levels(self) -> dict[str, ScoreLevel]:
        """Highest level each planned parameter reaches, for what-if replay."""
        final: dict[str, ScoreLevel] = {}
        for step in self.steps:
            final[step.parameter_id] = step.to_level
        return final


class _DeadlineExpired(Exception):
    pass


class _KpaScorer:
    """Incremental completeness arithmetic for one KPA under one method."""

    def __init__(self, kpa: KpaDef, method: Method, target: MaturityLevel):
        self.method = method
        self.target = target
        self.goal_weights: list[dict[str, float]] = []
        self.goal_norms: list[float] = []
        self.goal_tiers: list[GoalTier] = []
        for goal in kpa.goals:
            weights: dict[str, float] = {}
            for binding in goal.bindings:
                weights[binding.parameter_id] = weights.get(binding.parameter_id, 0.0) + binding.weight
            self.goal_weights.append(weights)
            self.goal_norms.append(MAX_SCORE_LEVEL * sum(weights.values()))
            self.goal_tiers.append(goal.tier)

    def deficit(self, levels: Mapping[str, int]) -> float:
        """Distance to the target thresholds; zero exactly when the target is met."""
        completeness = [
            100.0 * sum(w * levels.get(pid, 0) for pid, w in weights.items()) / norm
            for weights, norm in zip(self.goal_weights, self.goal_norms)
        ]
        if self.method is Method.COMPENSATORY:
            score = sum(completeness) / len(completeness)
            return max(0.0, _COMPENSATORY_NEED[self.target] - score)
        basics = [c for c, t in zip(completeness, self.goal_tiers) if t is GoalTier.BASIC]
        advs = [c for c, t in zip(completeness, self.goal_tiers) if t is GoalTier.ADVANCED]
        need_basic, need_adv = _TWO_TIER_NEED[self.target]
        basic = sum(basics) / len(basics)
        advanced = sum(advs) / len(advs)
        return max(0.0, need_basic - basic) + max(0.0, need_adv - advanced)

    def reaches_target(self, levels: Mapping[str, int]) -> bool:
        return self.deficit(levels) == 0.0


def _current_level(kpa: KpaDef, levels: Mapping[str, ScoreLevel], method: Method) -> MaturityLevel:
    if method is Method.COMPENSATORY:
        return compensatory_pa(kpa, levels)[1]
    return two_tier_pa(kpa, levels)[2]


def plan(
    model: MaturityModel,
    assessment: Assessment,
    kpa_id: str,
    method: Method | str,
    target: MaturityLevel | str,
    *,
    exhaustive_threshold: int = EXHAUSTIVE_THRESHOLD,
    deadline_ms: int | None = None,
) -> ImprovementPlan:
    """Compute an improvement plan lifting one KPA to the target level.

    Exact (provably minimal total cost) when the number of available
    increments is within `exhaustive_threshold`; greedy otherwise. A deadline
    in milliseconds caps the exhaustive search: on expiry the best plan found
    so far (or the greedy plan) is returned with exact=False.
    """
    method = Method(method)
    if isinstance(target, str):
        target = MaturityLevel.parse(target)

    _require_valid(model, assessment)
    kpa = model.kpa(kpa_id)
    if kpa is None:
        raise SmmError("UNKNOWN_KPA", f'model has no KPA "{kpa_id}"')
    if method is Method.TWO_TIER and kpa.tiers_present() != {GoalTier.BASIC, GoalTier.ADVANCED}:
        raise SmmError("TIER_MISSING",
                       f'KPA "{kpa_id}" lacks a basic or advanced goal; two-tier planning does not apply')

    levels = {pid: int(level) for pid, level in assessment.levels().items()}
    current = _current_level(kpa, assessment.levels(), method)
    if current >= target:
        return ImprovementPlan(kpa_id, method, target, (), 0.0, achieved=True, exact=True)

    params = model.parameters_by_id()
    bound = set(kpa.bound_parameter_ids())
    bound_ids = [p.id for p in model.parameters if p.id in bound]
    avail = [(pid, MAX_SCORE_LEVEL - levels.get(pid, 0), params[pid].step_cost)
             for pid in bound_ids if levels.get(pid, 0) < MAX_SCORE_LEVEL]

    scorer = _KpaScorer(kpa, method, target)

    maxed = dict(levels)
    for pid, _, _ in avail:
        maxed[pid] = MAX_SCORE_LEVEL
    if not scorer.reaches_target(maxed):
        raise SmmError("TARGET_UNREACHABLE",
                       f'target {target.label} cannot be reached for KPA "{kpa_id}" '
                       "even with every parameter explicit")

    deadline = None if deadline_ms is None else time.monotonic() + deadline_ms / 1000.0
    total_increments = sum(n for _, n, _ in avail)

    if total_increments <= exhaustive_threshold:
        try:
            counts = _search_exact(scorer, levels, avail, deadline)
            return _build_plan(kpa_id, method, target, levels, avail, counts, params, exact=True)
        except _DeadlineExpired as expired:
            best = expired.args[0]
            if best is not None:
                return _build_plan(kpa_id, method, target, levels, avail, best, params, exact=False)

    counts = _search_greedy(scorer, levels, avail)
    return _build_plan(kpa_id, method, target, levels, avail, counts, params, exact=False)


def _require_valid(model: MaturityModel, assessment: Assessment) -> None:
    diags = validate_model(model)
    if has_errors(diags):
        raise EvaluationError(diags)
    diags = validate_assessment(assessment, model)
    if has_errors(diags):
        raise EvaluationError(diags)


def _search_exact(
    scorer: _KpaScorer,
    levels: dict[str, int],
    avail: list[tuple[str, int, float]],
    deadline: float | None,
) -> list[int]:
    """Branch-and-bound over increment count vectors; returns the cheapest
    feasible vector. Raises _DeadlineExpired carrying the incumbent (or None)."""
    best_cost = [float("inf")]
    best_counts: list[list[int] | None] = [None]
    working = dict(levels)
    counts = [0] * len(avail)

    def remaining_max_feasible(index: int) -> bool:
        saved = []
        for pid, n, _ in avail[index:]:
            saved.append((pid, working.get(pid, 0)))
            working[pid] = MAX_SCORE_LEVEL
        ok = scorer.reaches_target(working)
        for pid, old in saved:
            working[pid] = old
        return ok

    def descend(index: int, cost: float) -> None:
        if deadline is not None and time.monotonic() > deadline:
            raise _DeadlineExpired(best_counts[0])
        if cost >= best_cost[0]:
            return
        if index == len(avail):
            if scorer.reaches_target(working):
                best_cost[0] = cost
                best_counts[0] = counts.copy()
            return
        if not remaining_max_feasible(index):
            return
        pid, max_n, step_cost = avail[index]
        base = working.get(pid, 0)
        for n in range(0, max_n + 1):
            counts[index] = n
            working[pid] = base + n
            descend(index + 1, cost + n * step_cost)
        counts[index] = 0
        working[pid] = base

    descend(0, 0.0)
    assert best_counts[0] is not None, "exhaustive search found no feasible plan"
    return best_counts[0]


def _search_greedy(
    scorer: _KpaScorer,
    levels: dict[str, int],
    avail: list[tuple[str, int, float]],
) -> list[int]:
    """Repeatedly apply the increment with the highest deficit reduction per
    unit cost; ties broken by parameter id order."""
    order = sorted(range(len(avail)), key=lambda i: avail[i][0])
    working = dict(levels)
    counts = [0] * len(avail)
    current_deficit = scorer.deficit(working)
    while current_deficit > 0.0:
        best_index = -1
        best_ratio = -1.0
        best_deficit = current_deficit
        for i in order:
            pid, max_n, step_cost = avail[i]
            if counts[i] >= max_n:
                continue
            working[pid] = working.get(pid, 0) + 1
            new_deficit = scorer.deficit(working)
            working[pid] -= 1
            ratio = (current_deficit - new_deficit) / step_cost
            if ratio > best_ratio:
                best_index, best_ratio, best_deficit = i, ratio, new_deficit
        assert best_index >= 0, "no increment available but target not reached"
        pid = avail[best_index][0]
        counts[best_index] += 1
        working[pid] = working.get(pid, 0) + 1
        current_deficit = best_deficit
    return counts


def _build_plan(
    kpa_id: str,
    method: Method,
    target: MaturityLevel,
    levels: dict[str, int],
    avail: list[tuple[str, int, float]],
    counts: list[int],
    params,
    exact: bool,
) -> ImprovementPlan:
    steps = []
    total = 0.0
    for (pid, _, step_cost), n in zip(avail, counts):
        base = levels.get(pid, 0)
        for k in range(n):
            steps.append(ImprovementStep(
                parameter_id=pid,
                from_level=ScoreLevel(base + k),
                to_level=ScoreLevel(base + k + 1),
                cost=step_cost,
            ))
            total += step_cost
    return ImprovementPlan(
        kpa_id=kpa_id,
        method=method,
        target=target,
        steps=tuple(steps),
        total_cost=total,
        achieved=True,
        exact=exact,
    )


def what_if(
    model: MaturityModel,
    assessment: Assessment,
    overrides: Mapping[str, ScoreLevel | int],
) -> EvaluationResult:
    """Evaluate the assessment with hypothetical score levels applied.

    The original assessment is untouched; notes on overridden parameters are
    kept. Unknown parameter ids are rejected.
    """
    pool = {p.id for p in model.parameters}
    unknown = [pid for pid in overrides if pid not in pool]
    if unknown:
        raise SmmError("UNKNOWN_PARAM", "unknown parameter(s): " + ", ".join(sorted(unknown)))

    patched = dict(assessment.scores)
    for pid, level in overrides.items():
        try:
            parsed = ScoreLevel(int(level))
        except ValueError:
            raise SmmError("SCORE_RANGE", f"score level must be 0, 1 or 2, got {level!r}") from None
        existing = patched.get(pid)
        patched[pid] = ScoreEntry(parsed, existing.note if existing else None)

    hypothetical = Assessment(
        id=assessment.id,
        model_id=assessment.model_id,
        model_version=assessment.model_version,
        date=assessment.date,
        team=assessment.team,
        status=assessment.status,
        scores=patched,
    )
    return evaluate(model, hypothetical)
