"""Acceptance suite: one test per acceptance criterion, at stated tolerances.

Each criterion prints a PASS/FAIL line (run with `pytest -s` to see them) and
enforces its runtime budget.
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager

from fastapi.testclient import TestClient

from generators import random_assessment, random_model
from oracle import (
    LEVEL_ORDER,
    oracle_evaluate,
    oracle_min_plan_cost,
)
from smm.cli import main as cli_main
from smm.dsl import parse_assessment, parse_model, serialize_assessment, serialize_model
from smm.model import (
    Assessment,
    MaturityLevel,
    ParameterCategory,
    ScoreEntry,
    ScoreLevel,
    validate_model,
)
from smm.planner import EXHAUSTIVE_THRESHOLD, plan, what_if
from smm.scoring import evaluate, interpret_compensatory, interpret_two_tier, sg_completeness
from smm.service import create_app
from smm.store import Store

PAPER_KPA_NAMES = {
    "Requirements Engineering",
    "Design and Implementation",
    "Quality Assurance",
    "Team Organization",
    "Software Maintenance",
}


@contextmanager
def criterion(name: str, budget_s: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"FAIL  {name}")
        raise
    elapsed = time.perf_counter() - start
    assert elapsed < budget_s, f"{name}: {elapsed:.2f}s exceeded the {budget_s}s budget"
    print(f"PASS  {name} ({elapsed:.2f}s < {budget_s:g}s)")


def test_level_table_reproduction():
    with criterion("level-table reproduction", 1.0):
        assert interpret_compensatory(15) is MaturityLevel.INITIAL
        assert interpret_compensatory(45) is MaturityLevel.INTERMEDIATE
        assert interpret_compensatory(70) is MaturityLevel.ADVANCED
        assert interpret_compensatory(90) is MaturityLevel.OPTIMIZING

        for advanced in (0, 10, 35, 75, 100):
            assert interpret_two_tier(25, advanced) is MaturityLevel.INITIAL
        assert interpret_two_tier(65, 10) is MaturityLevel.INTERMEDIATE
        assert interpret_two_tier(90, 35) is MaturityLevel.ADVANCED
        assert interpret_two_tier(90, 75) is MaturityLevel.OPTIMIZING


def test_oracle_equivalence():
    with criterion("oracle equivalence (1000 seeded models)", 10.0):
        rng = random.Random(20250801)
        for _ in range(1000):
            model = random_model(rng, max_kpas=3, max_goals=4, max_params=6)
            assessment = random_assessment(rng, model)
            result = evaluate(model, assessment)
            expected = oracle_evaluate(model, assessment)
            for pa in result.pa_evaluations:
                o = expected[pa.kpa_id]
                assert abs(pa.compensatory_score - o["compensatory"]) < 1e-9
                assert pa.compensatory_level.label == o["compensatory_level"]
                for sg in pa.sg_scores:
                    assert abs(sg.completeness - o["goals"][sg.sg_id]) < 1e-9
                if o["two_tier"] is None:
                    assert pa.two_tier_level is None
                else:
                    assert abs(pa.basic_score - o["two_tier"]["basic"]) < 1e-9
                    assert abs(pa.advanced_score - o["two_tier"]["advanced"]) < 1e-9
                    assert pa.two_tier_level.label == o["two_tier"]["level"]
                got = {c.value: v for c, v in pa.category_breakdown.items()}
                assert set(got) == set(o["categories"])
                for cat, value in o["categories"].items():
                    assert abs(got[cat] - value) < 1e-9


def test_monotonicity():
    with criterion("monotonicity (500 seeded increments)", 5.0):
        rng = random.Random(20250802)
        trials = 0
        while trials < 500:
            model = random_model(rng)
            assessment = random_assessment(rng, model)
            levels = assessment.levels()
            candidates = [p.id for p in model.parameters if int(levels.get(p.id, 0)) < 2]
            if not candidates:
                continue
            target = rng.choice(candidates)
            bumped_scores = dict(assessment.scores)
            bumped_scores[target] = ScoreEntry(ScoreLevel(int(levels.get(target, 0)) + 1))
            bumped = Assessment(
                id=assessment.id, model_id=assessment.model_id,
                model_version=assessment.model_version, date=assessment.date,
                team=assessment.team, status=assessment.status, scores=bumped_scores,
            )
            before = evaluate(model, assessment)
            after = evaluate(model, bumped)
            for pa_b, pa_a in zip(before.pa_evaluations, after.pa_evaluations):
                assert pa_a.compensatory_score >= pa_b.compensatory_score
                assert pa_a.compensatory_level >= pa_b.compensatory_level
                for sg_b, sg_a in zip(pa_b.sg_scores, pa_a.sg_scores):
                    assert sg_a.completeness >= sg_b.completeness
                if pa_b.two_tier_level is not None:
                    assert pa_a.basic_score >= pa_b.basic_score
                    assert pa_a.advanced_score >= pa_b.advanced_score
                    assert pa_a.two_tier_level >= pa_b.two_tier_level
            trials += 1


def test_weight_scaling_invariance():
    with criterion("weight-scaling invariance (200 seeded SGs)", 5.0):
        from smm.model import GoalTier, ParameterBinding, SpecificGoalDef

        rng = random.Random(20250803)
        for i in range(200):
            n = rng.randint(1, 6)
            weights = [rng.choice((0.5, 1.0, 2.0, 3.0)) for _ in range(n)]
            levels = {f"P{j}": ScoreLevel(rng.randint(0, 2)) for j in range(n)}

            def goal_with(ws):
                return SpecificGoalDef(
                    "G", "G", GoalTier.BASIC,
                    tuple(ParameterBinding(f"P{j}", w) for j, w in enumerate(ws)),
                )

            base = sg_completeness(goal_with(weights), levels)
            for c in (0.1, 2, 10):
                scaled = sg_completeness(goal_with([w * c for w in weights]), levels)
                assert abs(scaled - base) < 1e-9


def test_planner_optimality_and_soundness():
    with criterion("planner optimality (200 seeded exhaustive instances)", 30.0):
        rng = random.Random(20250804)
        checked = 0
        while checked < 200:
            model = random_model(rng)
            assessment = random_assessment(rng, model)
            kpa = rng.choice(model.kpas)
            method = rng.choice(["compensatory", "two-tier"])
            if method == "two-tier" and len(kpa.tiers_present()) < 2:
                method = "compensatory"
            levels = assessment.levels()
            increments = sum(2 - int(levels.get(pid, 0)) for pid in kpa.bound_parameter_ids())
            if increments > EXHAUSTIVE_THRESHOLD:
                continue
            target = rng.choice(["intermediate", "advanced", "optimizing"])
            improvement = plan(model, assessment, kpa.id, method, target)
            assert improvement.exact
            assert improvement.achieved

            oracle_cost = oracle_min_plan_cost(model, kpa, assessment, method, target)
            assert oracle_cost is not None
            assert abs(improvement.total_cost - oracle_cost) < 1e-9

            replay = what_if(model, assessment, improvement.final_levels())
            pa = replay.pa(kpa.id)
            reached = (pa.compensatory_level if method == "compensatory"
                       else pa.two_tier_level)
            assert LEVEL_ORDER.index(reached.label) >= LEVEL_ORDER.index(target)
            checked += 1


def test_round_trip(fixture_model_text, fixture_assessment_text):
    with criterion("round-trip identity and idempotence", 10.0):
        model = parse_model(fixture_model_text)
        assert parse_model(serialize_model(model)) == model
        once = serialize_model(model)
        assert serialize_model(parse_model(once)) == once

        assessment = parse_assessment(fixture_assessment_text)
        assert parse_assessment(serialize_assessment(assessment)) == assessment
        assessment_once = serialize_assessment(assessment)
        assert serialize_assessment(parse_assessment(assessment_once)) == assessment_once

        rng = random.Random(20250805)
        for _ in range(200):
            generated = random_model(rng)
            text = serialize_model(generated)
            assert parse_model(text) == generated
            assert serialize_model(parse_model(text)) == text


def test_fixture_integrity(fixture_model):
    with criterion("fixture integrity", 1.0):
        assert validate_model(fixture_model) == []
        names = {kpa.name for kpa in fixture_model.kpas}
        assert names == PAPER_KPA_NAMES
        assert len(fixture_model.kpas) == 5
        used_categories = {p.category for p in fixture_model.parameters}
        assert used_categories == set(ParameterCategory)


def test_cli_service_consistency(tmp_path, capsys, fixture_model, fixture_assessment,
                                 fixture_model_text, fixture_assessment_text):
    with criterion("CLI/service JSON consistency", 10.0):
        model_path = tmp_path / "model.smmdl"
        model_path.write_text(fixture_model_text, encoding="utf-8")
        assessment_path = tmp_path / "assessment.smma"
        assessment_path.write_text(fixture_assessment_text, encoding="utf-8")

        store = Store(tmp_path / "store")
        store.put_model(fixture_model, 0)
        store.put_assessment(fixture_assessment, 0)
        client = TestClient(create_app(store))

        for method in ("compensatory", "two-tier", "both"):
            code = cli_main([
                "evaluate",
                "--model", str(model_path),
                "--assessment", str(assessment_path),
                "--method", method,
                "--format", "json",
            ])
            cli_out = capsys.readouterr().out
            assert code == 0
            response = client.get(
                f"/api/assessments/{fixture_assessment.id}/evaluation",
                params={"method": method},
            )
            assert response.status_code == 200
            assert cli_out.encode() == response.content
